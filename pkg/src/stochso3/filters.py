"""Attitude observers on SO(3): the passive complementary filter and the
Ito / Stratonovich stochastic filters, in rotation-matrix and quaternion
form.

Every filter is a pure transition ``step(state, omega_m, meas, gains, dt)``.
Right-hand sides are evaluated at the pre-step state; the bias and noise
bound estimates take a forward Euler step and the attitude takes an exact
exponential step, so the attitude stays on SO(3).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import SingularityError
from .quaternion import quat_exp, quat_inverse, quat_product, quat_to_rotation, rotation_to_quat
from .so3 import exp_so3, normalized_distance, upsilon_a

# guard on (1 - ||R~||_I); equals q~0^2 in quaternion form
EPS_GUARD = 1e-6
EPS_Q = EPS_GUARD


@dataclass(frozen=True)
class FilterGains:
    gamma1: float = 1.0
    gamma2: float = 1.0
    k1: float = 0.5
    k2: float = 0.5
    kb: float = 0.5
    ksigma: float = 0.5
    epsilon: float = 0.5

    def __post_init__(self):
        for name in ("gamma1", "gamma2", "k1", "k2", "kb", "ksigma", "epsilon"):
            if not getattr(self, name) > 0:
                raise ValueError(f"gain {name} must be positive")
        if self.gamma1 < 1 or self.gamma2 < 1 or self.k1 < 9 / 32 or self.k2 < 1 / 8:
            warnings.warn(
                "gains outside gamma1>=1, gamma2>=1, k1>=9/32, k2>=1/8; "
                "convergence guarantees do not apply",
                stacklevel=3,
            )


def _zeros3():
    return np.zeros(3)


@dataclass(frozen=True)
class FilterState:
    r_hat: np.ndarray
    b_hat: np.ndarray = field(default_factory=_zeros3)
    sigma_hat: np.ndarray = field(default_factory=_zeros3)

    def rotation(self) -> np.ndarray:
        return self.r_hat


@dataclass(frozen=True)
class QuatFilterState:
    q_hat: np.ndarray
    b_hat: np.ndarray = field(default_factory=_zeros3)
    sigma_hat: np.ndarray = field(default_factory=_zeros3)

    def rotation(self) -> np.ndarray:
        return quat_to_rotation(self.q_hat)

    @classmethod
    def from_matrix_state(cls, state: FilterState) -> "QuatFilterState":
        return cls(rotation_to_quat(state.r_hat), state.b_hat, state.sigma_hat)


@dataclass(frozen=True)
class FilterDiagnostics:
    err_dist: float
    upsilon: np.ndarray
    rho_err: np.ndarray | None
    lyapunov_v: float


def attitude_error(r_y, r_hat):
    """Return ``(R~, upsilon_a(R~), ||R~||_I)`` with ``R~ = R_y^T R_hat``."""
    r_tilde = np.asarray(r_y).T @ np.asarray(r_hat)
    return r_tilde, upsilon_a(r_tilde), normalized_distance(r_tilde)


def _inverse_margin(margin: float, guard: float, saturate: bool) -> float:
    """``1 / margin``, saturated at ``1 / guard``."""
    if margin < guard:
        if not saturate:
            raise SingularityError(
                f"attitude error too close to a half turn (margin {margin:.3e} < {guard:.1e})"
            )
        margin = guard
    return 1.0 / margin


# ---------------------------------------------------------------------------
# right-hand sides: each returns (attitude rate, b_hat_dot, sigma_hat_dot)


def det_rates(state: FilterState, omega_m, r_y, gains: FilterGains):
    _, ups, _ = attitude_error(r_y, state.r_hat)
    w = gains.k1 * ups
    return omega_m - state.b_hat - w, gains.gamma1 * ups, np.zeros(3)


def _ito_terms(ups, dist, inv, b_hat, sigma_hat, gains):
    # D_ups = [ups, ups, ups]: D_ups @ s = ups * sum(s), D_ups^T @ ups = |ups|^2 * ones
    w = (gains.k1 / gains.epsilon) * (2.0 - dist) * inv * ups + gains.k2 * ups * sigma_hat.sum()
    b_dot = gains.gamma1 * dist * ups - gains.gamma1 * gains.kb * b_hat
    s_dot = (gains.k1 * gains.gamma2 * dist * (ups @ ups)) * np.ones(3) - gains.gamma2 * gains.ksigma * sigma_hat
    return w, b_dot, s_dot


def ito_rates(state: FilterState, omega_m, r_y, gains: FilterGains,
              guard: float = EPS_GUARD, saturate: bool = True):
    _, ups, dist = attitude_error(r_y, state.r_hat)
    inv = _inverse_margin(1.0 - dist, guard, saturate)
    w, b_dot, s_dot = _ito_terms(ups, dist, inv, state.b_hat, state.sigma_hat, gains)
    return omega_m - state.b_hat - w, b_dot, s_dot


def strat_rates(state: FilterState, omega_m, r_y, gains: FilterGains,
                guard: float = EPS_GUARD, saturate: bool = True):
    _, ups, dist = attitude_error(r_y, state.r_hat)
    inv = _inverse_margin(1.0 - dist, guard, saturate)
    w, b_dot, s_dot = _ito_terms(ups, dist, inv, state.b_hat, state.sigma_hat, gains)
    # diag(ups) / (1 - ||R~||_I) / 2, applied to sigma_hat and to ups
    half_diag = 0.5 * inv * ups
    s_dot = s_dot + gains.gamma2 * dist * half_diag * ups
    return omega_m - state.b_hat - half_diag * state.sigma_hat - w, b_dot, s_dot


def _quat_error(q_y, q_hat):
    qt = quat_product(quat_inverse(q_y), q_hat)
    return qt[0], qt[1:]


def _quat_ito_terms(q0, qv, inv_q0, b_hat, sigma_hat, gains):
    one_minus = 1.0 - q0 * q0
    # D_ups = 2 q0 [qv, qv, qv]
    w = (2.0 * gains.k1 / gains.epsilon) * (1.0 + q0 * q0) * inv_q0 * qv \
        + gains.k2 * 2.0 * q0 * qv * sigma_hat.sum()
    b_dot = 2.0 * gains.gamma1 * one_minus * q0 * qv - gains.gamma1 * gains.kb * b_hat
    d_t_qv = 2.0 * q0 * (qv @ qv)  # every entry of D_ups^T qv
    s_dot = (2.0 * gains.k1 * gains.gamma2 * one_minus * q0 * d_t_qv) * np.ones(3) \
        - gains.gamma2 * gains.ksigma * sigma_hat
    return w, b_dot, s_dot


def _saturated_inv_q0(q0: float, guard: float, saturate: bool) -> float:
    # 1/q0 written as q0 / q0^2 so the guard acts on q0^2 = 1 - ||R~||_I
    return q0 * _inverse_margin(q0 * q0, guard, saturate)


def ito_rates_quat(state: QuatFilterState, omega_m, q_y, gains: FilterGains,
                   guard: float = EPS_Q, saturate: bool = True):
    q0, qv = _quat_error(q_y, state.q_hat)
    inv_q0 = _saturated_inv_q0(q0, guard, saturate)
    w, b_dot, s_dot = _quat_ito_terms(q0, qv, inv_q0, state.b_hat, state.sigma_hat, gains)
    return omega_m - state.b_hat - w, b_dot, s_dot


def strat_rates_quat(state: QuatFilterState, omega_m, q_y, gains: FilterGains,
                     guard: float = EPS_Q, saturate: bool = True):
    q0, qv = _quat_error(q_y, state.q_hat)
    inv_q0 = _saturated_inv_q0(q0, guard, saturate)
    w, b_dot, s_dot = _quat_ito_terms(q0, qv, inv_q0, state.b_hat, state.sigma_hat, gains)
    s_dot = s_dot + 2.0 * gains.gamma2 * (1.0 - q0 * q0) * qv * qv
    gamma = omega_m - state.b_hat - inv_q0 * qv * state.sigma_hat - w
    return gamma, b_dot, s_dot


# ---------------------------------------------------------------------------
# steps


def _advance(state, rates, dt: float):
    rate, b_dot, s_dot = rates
    b_new = state.b_hat + b_dot * dt
    s_new = state.sigma_hat + s_dot * dt
    if isinstance(state, QuatFilterState):
        return QuatFilterState(quat_product(state.q_hat, quat_exp(rate, dt)), b_new, s_new)
    return FilterState(state.r_hat @ exp_so3(rate, dt), b_new, s_new)


def det_filter_step(state: FilterState, omega_m, r_y, gains: FilterGains, dt: float) -> FilterState:
    """Passive complementary filter; ``sigma_hat`` is carried unchanged."""
    return _advance(state, det_rates(state, np.asarray(omega_m, dtype=float), r_y, gains), dt)


def ito_filter_step(state: FilterState, omega_m, r_y, gains: FilterGains, dt: float,
                    guard: float = EPS_GUARD, saturate: bool = True) -> FilterState:
    """Stochastic filter in the sense of Ito.

    With ``saturate=False`` a near-half-turn error raises
    :class:`SingularityError` instead of clipping the gain.
    """
    rates = ito_rates(state, np.asarray(omega_m, dtype=float), r_y, gains, guard, saturate)
    return _advance(state, rates, dt)


def strat_filter_step(state: FilterState, omega_m, r_y, gains: FilterGains, dt: float,
                      guard: float = EPS_GUARD, saturate: bool = True) -> FilterState:
    rates = strat_rates(state, np.asarray(omega_m, dtype=float), r_y, gains, guard, saturate)
    return _advance(state, rates, dt)


def ito_filter_step_quat(state: QuatFilterState, omega_m, q_y, gains: FilterGains, dt: float,
                         guard: float = EPS_Q, saturate: bool = True) -> QuatFilterState:
    rates = ito_rates_quat(state, np.asarray(omega_m, dtype=float), q_y, gains, guard, saturate)
    return _advance(state, rates, dt)


def strat_filter_step_quat(state: QuatFilterState, omega_m, q_y, gains: FilterGains, dt: float,
                           guard: float = EPS_Q, saturate: bool = True) -> QuatFilterState:
    rates = strat_rates_quat(state, np.asarray(omega_m, dtype=float), q_y, gains, guard, saturate)
    return _advance(state, rates, dt)


def lyapunov_v(rho_err, b_err, sigma_err, gains: FilterGains, form: str = "stochastic") -> float:
    """Potential function used to analyse the filters (diagnostic only).

    ``form="stochastic"`` squares the attitude term; ``"deterministic"``
    is the classic ``||R~||_I + |b~|^2 / (2 gamma1)`` and ignores
    ``sigma_err``.
    """
    rho = np.asarray(rho_err, dtype=float)
    b = np.asarray(b_err, dtype=float)
    n2 = rho @ rho
    att = n2 / (1.0 + n2)
    if form == "deterministic":
        return float(att + b @ b / (2 * gains.gamma1))
    if form != "stochastic":
        raise ValueError(f"unknown potential form {form!r}")
    s = np.asarray(sigma_err, dtype=float)
    return float(att ** 2 + b @ b / (2 * gains.gamma1) + s @ s / (2 * gains.gamma2))


@dataclass(frozen=True)
class FilterEntry:
    name: str
    step: Callable
    quaternion: bool


FILTERS = {
    "det": FilterEntry("det", det_filter_step, False),
    "ito": FilterEntry("ito", ito_filter_step, False),
    "strat": FilterEntry("strat", strat_filter_step, False),
    "ito-quat": FilterEntry("ito-quat", ito_filter_step_quat, True),
    "strat-quat": FilterEntry("strat-quat", strat_filter_step_quat, True),
}


def initial_state(filter_id: str, r_hat0, b_hat0=None, sigma_hat0=None):
    b = np.zeros(3) if b_hat0 is None else np.asarray(b_hat0, dtype=float)
    s = np.zeros(3) if sigma_hat0 is None else np.asarray(sigma_hat0, dtype=float)
    state = FilterState(np.asarray(r_hat0, dtype=float), b, s)
    if FILTERS[filter_id].quaternion:
        return QuatFilterState.from_matrix_state(state)
    return state

