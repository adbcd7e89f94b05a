"""Ground truth and sensor synthesis.

True attitude propagation, gyro and vector-sensor measurements, and the
Rodriguez-vector SDE (Ito form, and the Ito-equivalent of the
Stratonovich form via the Wong-Zakai drift correction).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DegenerateGeometryError, InvalidArgumentError, SingularityError
from .so3 import exp_so3, hat

NOISE_CONVENTIONS = ("per-step", "white")
# |rho| beyond this means the SDE path ran into the half-turn singularity
CHART_ESCAPE = 1e9
COLLINEAR_TOL = 1e-6


@dataclass(frozen=True)
class TimeGrid:
    t0: float = 0.0
    t_end: float = 15.0
    dt: float = 1e-3

    def __post_init__(self):
        if not self.dt > 0:
            raise InvalidArgumentError("dt must be positive")
        if not self.t_end > self.t0:
            raise InvalidArgumentError("t_end must exceed t0")
        n = (self.t_end - self.t0) / self.dt
        if abs(n - round(n)) > 1e-9 * max(1.0, abs(n)):
            raise InvalidArgumentError("time span is not an integer number of steps")

    @property
    def n_steps(self) -> int:
        return int(round((self.t_end - self.t0) / self.dt))

    def times(self) -> np.ndarray:
        """Sample times, endpoints included (``n_steps + 1`` values)."""
        return self.t0 + self.dt * np.arange(self.n_steps + 1)


@dataclass(frozen=True)
class NoiseModel:
    """Gyro and vector-sensor error model.

    ``q_diag`` is the diagonal of the gyro noise intensity matrix. Under
    the ``per-step`` convention it is the per-sample standard deviation
    (rad/s); under ``white`` it scales unit Brownian increments.
    """

    q_diag: np.ndarray = field(default_factory=lambda: np.zeros(3))
    gyro_bias: np.ndarray = field(default_factory=lambda: np.zeros(3))
    vector_bias: tuple = ()
    vector_noise_std: tuple = ()

    def __post_init__(self):
        q = np.asarray(self.q_diag, dtype=float).reshape(3)
        if np.any(q < 0):
            raise InvalidArgumentError("q_diag must be nonnegative")
        object.__setattr__(self, "q_diag", q)
        object.__setattr__(self, "gyro_bias", np.asarray(self.gyro_bias, dtype=float).reshape(3))
        object.__setattr__(
            self, "vector_bias", tuple(np.asarray(b, dtype=float).reshape(3) for b in self.vector_bias)
        )
        stds = tuple(float(s) for s in self.vector_noise_std)
        if any(s < 0 for s in stds):
            raise InvalidArgumentError("vector noise std must be nonnegative")
        object.__setattr__(self, "vector_noise_std", stds)

    def sigma_bound(self) -> np.ndarray:
        """Upper bound of the squared noise intensity diagonal."""
        return self.q_diag ** 2

    def sensor_bias(self, i: int) -> np.ndarray:
        return self.vector_bias[i] if i < len(self.vector_bias) else np.zeros(3)

    def sensor_std(self, i: int) -> float:
        return self.vector_noise_std[i] if i < len(self.vector_noise_std) else 0.0


def brownian_increment(rng: np.random.Generator, dt: float) -> np.ndarray:
    if not dt > 0:
        raise InvalidArgumentError("dt must be positive")
    return np.sqrt(dt) * rng.standard_normal(3)


def gyro_noise(unit_normal, model: NoiseModel, dt: float, convention: str = "per-step") -> np.ndarray:
    """Map standard-normal draws to gyro noise samples (rad/s).

    Works on a single ``(3,)`` draw or a stacked ``(n, 3)`` buffer.
    """
    z = np.asarray(unit_normal, dtype=float)
    if convention == "per-step":
        return model.q_diag * z
    if convention == "white":
        # rate whose integral over dt is q * sqrt(dt) * N(0, I)
        return model.q_diag * z / np.sqrt(dt)
    raise InvalidArgumentError(f"unknown noise convention {convention!r}")


def measured_omega(omega_true, model: NoiseModel, rng: np.random.Generator, dt: float,
                   convention: str = "per-step") -> np.ndarray:
    """Gyro reading ``Omega + b + w``."""
    w = gyro_noise(rng.standard_normal(3), model, dt, convention)
    return np.asarray(omega_true, dtype=float) + model.gyro_bias + w


def true_attitude_step(r, omega_true, dt: float) -> np.ndarray:
    if not dt > 0:
        raise InvalidArgumentError("dt must be positive")
    return np.asarray(r, dtype=float) @ exp_so3(omega_true, dt)


def propagate_attitude(r0, omegas, dt: float) -> np.ndarray:
    """Attitude samples ``R_0 .. R_n`` driven by rates ``omegas[0..n-1]``."""
    omegas = np.asarray(omegas, dtype=float)
    out = np.empty((len(omegas) + 1, 3, 3))
    out[0] = r0
    for k, w in enumerate(omegas):
        out[k + 1] = out[k] @ exp_so3(w, dt)
    return out


def _jacobian_factor(rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=float)
    return np.eye(3) + hat(rho) + np.outer(rho, rho)


def diffusion_matrix(rho) -> np.ndarray:
    """``g(rho) = -(I + [rho]x + rho rho^T) / 2``."""
    return -0.5 * _jacobian_factor(rho)


def rodriguez_drift(rho, omega_eff) -> np.ndarray:
    return 0.5 * _jacobian_factor(rho) @ np.asarray(omega_eff, dtype=float)


def wong_zakai_correction(rho, q_squared_diag) -> np.ndarray:
    """Closed-form Wong-Zakai drift ``(I + [rho]x + rho rho^T) Q^2 rho / 4``."""
    rho = np.asarray(rho, dtype=float)
    q2 = np.asarray(q_squared_diag, dtype=float)
    if np.any(q2 < 0):
        raise InvalidArgumentError("q_squared_diag must be nonnegative")
    return 0.25 * _jacobian_factor(rho) @ (q2 * rho)


def _check_chart(rho: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(rho)) or np.linalg.norm(rho) > CHART_ESCAPE:
        raise SingularityError("Rodriguez trajectory escaped the chart")
    return rho


def sde_step_ito(rho, omega_m, b, model: NoiseModel, rng: np.random.Generator, dt: float,
                 dbeta=None) -> np.ndarray:
    """One Euler-Maruyama step of ``drho = f dt + g Q dbeta``.

    ``dbeta`` may be supplied to replay a noise stream; otherwise it is
    drawn from ``rng``.
    """
    rho = np.asarray(rho, dtype=float)
    if dbeta is None:
        dbeta = brownian_increment(rng, dt)
    drift = rodriguez_drift(rho, np.asarray(omega_m) - np.asarray(b))
    step = rho + drift * dt + diffusion_matrix(rho) @ (model.q_diag * dbeta)
    return _check_chart(step)


def sde_step_stratonovich(rho, omega_m, b, model: NoiseModel, rng: np.random.Generator, dt: float,
                          dbeta=None) -> np.ndarray:
    """Euler-Maruyama on the Ito-equivalent of the Stratonovich SDE."""
    rho = np.asarray(rho, dtype=float)
    if dbeta is None:
        dbeta = brownian_increment(rng, dt)
    drift = (rodriguez_drift(rho, np.asarray(omega_m) - np.asarray(b))
             + wong_zakai_correction(rho, model.sigma_bound()))
    step = rho + drift * dt + diffusion_matrix(rho) @ (model.q_diag * dbeta)
    return _check_chart(step)


def _normalize_rows(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def inertial_reference(v_inertial: Sequence) -> np.ndarray:
    """Normalized inertial vectors, with the cross-product third vector
    appended when exactly two are given."""
    v = np.asarray(v_inertial, dtype=float)
    if v.ndim != 2 or v.shape[1] != 3 or len(v) < 2:
        raise InvalidArgumentError("need at least two inertial 3-vectors")
    if len(v) == 2:
        c = np.cross(v[0], v[1])
        if np.linalg.norm(c) < COLLINEAR_TOL:
            raise DegenerateGeometryError("inertial vectors are collinear")
        v = np.vstack([v, c])
    return _normalize_rows(v)


def body_vectors_batch(r_true, v_inertial, model: NoiseModel, unit_normal=None) -> np.ndarray:
    """Normalized body-frame measurements for a stack of attitudes.

    Parameters
    ----------
    r_true : (n, 3, 3) array
    v_inertial : (m, 3) raw inertial vectors (m >= 2)
    unit_normal : (n, m, 3) standard-normal draws, or None for noise-free

    Returns
    -------
    (n, m', 3) array, ``m' = 3`` when ``m == 2`` (cross product appended).
    """
    r_true = np.asarray(r_true, dtype=float)
    v = np.asarray(v_inertial, dtype=float)
    inertial_reference(v)  # validates geometry
    m = len(v)
    # v_B = R^T v_I for every sample and sensor
    vb = np.einsum("nji,mj->nmi", r_true, v)
    bias = np.array([model.sensor_bias(i) for i in range(m)])
    vb = vb + bias
    if unit_normal is not None:
        std = np.array([model.sensor_std(i) for i in range(m)])
        vb = vb + std[None, :, None] * np.asarray(unit_normal, dtype=float)
    if m == 2:
        vb = np.concatenate([vb, np.cross(vb[:, 0], vb[:, 1])[:, None, :]], axis=1)
    return _normalize_rows(vb)


def synthesize_body_vectors(r_true, v_inertial, model: NoiseModel,
                            rng: np.random.Generator | None = None) -> np.ndarray:
    """Body-frame measurements ``R^T v_I + b_B + w_B`` at one instant.

    Returns normalized vectors; with two sensors the cross product of the
    two measurements is appended as a third.
    """
    m = len(v_inertial)
    z = None if rng is None else rng.standard_normal((1, m, 3))
    return body_vectors_batch(np.asarray(r_true)[None], v_inertial, model, z)[0]
