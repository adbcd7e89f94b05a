"""Nonlinear stochastic attitude filters on SO(3) (Ito and Stratonovich forms),
the passive complementary filter, SVD attitude reconstruction and a
Monte-Carlo simulation harness."""

from .errors import DegenerateGeometryError, InvalidArgumentError, SingularityError
from .filters import (
    FILTERS,
    FilterGains,
    FilterState,
    QuatFilterState,
    det_filter_step,
    ito_filter_step,
    ito_filter_step_quat,
    strat_filter_step,
    strat_filter_step_quat,
)
from .harness import compute_metrics, run_monte_carlo, run_trial
from .scenario import Scenario, preset

__version__ = "0.1.0"
