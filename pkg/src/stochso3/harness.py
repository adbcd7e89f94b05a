"""Trial execution, error metrics and Monte-Carlo aggregation.

Per seed the noise is drawn once into replay buffers (gyro readings and
reconstructed attitudes), then every requested filter consumes the same
buffers, so filter comparisons within a seed are paired.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, SingularityError
from .filters import FILTERS, initial_state, lyapunov_v
from .quaternion import rotation_to_quat
from .reconstruction import profile_matrix, svd_from_profile
from .scenario import Scenario
from .sim import body_vectors_batch, gyro_noise, inertial_reference, propagate_attitude
from .so3 import RODRIGUEZ_EPS, upsilon_a

log = logging.getLogger(__name__)

GIMBAL_GUARD = 1e-9
CONVERGENCE_LEVEL = 0.01


@dataclass
class Truth:
    t: np.ndarray
    omega: np.ndarray  # (n+1, 3) true rates
    r: np.ndarray  # (n+1, 3, 3) true attitudes


@dataclass
class Measurements:
    truth: Truth
    omega_m: np.ndarray  # (n+1, 3)
    r_y: np.ndarray  # (n+1, 3, 3)
    seed: int

    def q_y(self) -> np.ndarray:
        return np.array([rotation_to_quat(r) for r in self.r_y])


@dataclass
class TrialSeries:
    filter_id: str
    seed: int
    t: np.ndarray
    err_dist: np.ndarray
    rho_err: np.ndarray  # nan where the Rodriguez chart is invalid
    b_hat: np.ndarray
    sigma_hat: np.ndarray
    r_hat: np.ndarray
    euler_true: np.ndarray
    euler_est: np.ndarray
    valid: np.ndarray  # False where either Euler extraction is at gimbal lock
    lyapunov: np.ndarray


@dataclass(frozen=True)
class RunMetrics:
    mean_err_dist: float
    std_err_dist: float
    window: tuple
    final_err_dist: float
    convergence_time_to_0p01: float | None
    # first sample below the level, whether or not it stays there
    first_passage_0p01: float | None = None


def simulate_truth(sc: Scenario) -> Truth:
    t = sc.grid.times()
    omega = sc.omega_profile(t)
    return Truth(t, omega, propagate_attitude(sc.r0(), omega[:-1], sc.grid.dt))


def generate_measurements(sc: Scenario, seed: int, truth: Truth | None = None) -> Measurements:
    """Draw every noise sample for one seed and build the sensor streams."""
    if truth is None:
        truth = simulate_truth(sc)
    n = len(truth.t)
    m = len(sc.inertial_vectors)
    rng = np.random.default_rng(seed)
    z_gyro = rng.standard_normal((n, 3))
    z_vec = rng.standard_normal((n, m, 3))
    omega_m = truth.omega + sc.noise.gyro_bias + gyro_noise(z_gyro, sc.noise, sc.grid.dt, sc.noise_convention)
    if sc.ideal_reconstruction:
        r_y = truth.r.copy()
    else:
        vi = inertial_reference(sc.inertial_vectors)
        vb = body_vectors_batch(truth.r, sc.inertial_vectors, sc.noise, z_vec)
        r_y = svd_from_profile(profile_matrix(vi[None], vb, sc.weights))
    return Measurements(truth, omega_m, r_y, seed)


def euler_angles(r):
    """Z-Y-X (yaw-pitch-roll) angles ``(phi, theta, psi)`` of ``r``.

    ``r = Rz(psi) Ry(theta) Rx(phi)``. Accepts a stack ``(..., 3, 3)`` and
    returns ``(angles, valid)`` where ``valid`` is False within
    ``GIMBAL_GUARD`` of ``theta = +-pi/2``.
    """
    r = np.asarray(r, dtype=float)
    phi = np.arctan2(r[..., 2, 1], r[..., 2, 2])
    theta = -np.arcsin(np.clip(r[..., 2, 0], -1.0, 1.0))
    psi = np.arctan2(r[..., 1, 0], r[..., 0, 0])
    valid = np.abs(np.abs(theta) - np.pi / 2) > GIMBAL_GUARD
    return np.stack([phi, theta, psi], axis=-1), valid


def euler_to_rotation(phi: float, theta: float, psi: float) -> np.ndarray:
    cf, sf = np.cos(phi), np.sin(phi)
    ct, st = np.cos(theta), np.sin(theta)
    cp, sp = np.cos(psi), np.sin(psi)
    rz = np.array([[cp, -sp, 0], [sp, cp, 0], [0, 0, 1.0]])
    ry = np.array([[ct, 0, st], [0, 1.0, 0], [-st, 0, ct]])
    rx = np.array([[1.0, 0, 0], [0, cf, -sf], [0, sf, cf]])
    return rz @ ry @ rx


def run_filter(sc: Scenario, filter_id: str, meas: Measurements) -> TrialSeries:
    entry = FILTERS[filter_id]
    truth = meas.truth
    n = len(truth.t)
    dt = sc.grid.dt
    ys = meas.q_y() if entry.quaternion else meas.r_y
    state = initial_state(filter_id, sc.r_hat0())
    r_hat = np.empty((n, 3, 3))
    b_hat = np.empty((n, 3))
    s_hat = np.empty((n, 3))
    step = entry.step
    gains = sc.gains
    for k in range(n):
        r_hat[k] = state.rotation()
        b_hat[k] = state.b_hat
        s_hat[k] = state.sigma_hat
        if k == n - 1:
            break
        try:
            state = step(state, meas.omega_m[k], ys[k], gains, dt)
        except SingularityError as exc:
            raise type(exc)(f"{filter_id} step {k} (t={truth.t[k]:.6g}): {exc}") from exc
    return _diagnose(sc, filter_id, meas, r_hat, b_hat, s_hat)


def _diagnose(sc, filter_id, meas, r_hat, b_hat, s_hat) -> TrialSeries:
    truth = meas.truth
    r_tilde = np.swapaxes(truth.r, -1, -2) @ r_hat
    tr = np.trace(r_tilde, axis1=-2, axis2=-1)
    err = 0.25 * (3.0 - tr)
    ups = np.array([upsilon_a(x) for x in r_tilde])
    with np.errstate(divide="ignore", invalid="ignore"):
        rho = ups / (0.5 * (1.0 + tr))[:, None]
    rho[tr + 1.0 <= RODRIGUEZ_EPS] = np.nan
    b_err = sc.noise.gyro_bias - b_hat
    s_err = sc.noise.sigma_bound() - s_hat
    form = "deterministic" if filter_id == "det" else "stochastic"
    lyap = np.array([
        lyapunov_v(r, b, s, sc.gains, form) if np.all(np.isfinite(r)) else np.nan
        for r, b, s in zip(rho, b_err, s_err)
    ])
    e_true, v_true = euler_angles(truth.r)
    e_est, v_est = euler_angles(r_hat)
    return TrialSeries(filter_id, meas.seed, truth.t, err, rho, b_hat, s_hat, r_hat,
                       e_true, e_est, v_true & v_est, lyap)


def run_trial(sc: Scenario, filter_id: str, seed: int) -> TrialSeries:
    return run_filter(sc, filter_id, generate_measurements(sc, seed))


def compute_metrics(t, err_dist, window=(1.0, 15.0)) -> RunMetrics:
    """Mean and sample STD of ``||R~||_I`` over the closed ``window``.

    The convergence time is the first sample from which the error stays
    below 0.01 until the end of the run (None if it never settles).
    """
    t = np.asarray(t, dtype=float)
    e = np.asarray(err_dist, dtype=float)
    tol = 1e-9 * max(1.0, abs(window[1]))
    mask = (t >= window[0] - tol) & (t <= window[1] + tol)
    if not mask.any():
        raise InvalidArgumentError(f"no samples inside window {window}")
    sel = e[mask]
    std = float(np.std(sel, ddof=1)) if sel.size > 1 else 0.0
    above = np.nonzero(e >= CONVERGENCE_LEVEL)[0]
    if above.size == 0:
        conv = float(t[0])
    elif above[-1] + 1 < len(t):
        conv = float(t[above[-1] + 1])
    else:
        conv = None
    below = np.nonzero(e < CONVERGENCE_LEVEL)[0]
    first = float(t[below[0]]) if below.size else None
    return RunMetrics(float(sel.mean()), std, tuple(window), float(e[-1]), conv, first)


def run_monte_carlo(sc: Scenario, filter_ids=None, window=(1.0, 15.0), keep_series: bool = False):
    """Run every filter on every seed with paired noise.

    Returns a dict ``{"metrics": {filter: [RunMetrics per seed]},
    "seeds": [...], "series": {(filter, seed): TrialSeries}}``; series are
    kept only when ``keep_series`` is set.
    """
    filter_ids = tuple(filter_ids or sc.filters)
    truth = simulate_truth(sc)
    metrics = {f: [] for f in filter_ids}
    series = {}
    for seed in sc.seeds:
        meas = generate_measurements(sc, seed, truth)
        for f in filter_ids:
            s = run_filter(sc, f, meas)
            metrics[f].append(compute_metrics(s.t, s.err_dist, window))
            if keep_series:
                series[(f, seed)] = s
        log.info("seed %s done", seed)
    return {"seeds": list(sc.seeds), "metrics": metrics, "series": series, "window": tuple(window)}
