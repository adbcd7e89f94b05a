"""Fast runtime self-checks exposed as ``stochso3 selftest``.

Each check returns the worst observed error; a check passes when that is
below its tolerance.
"""

from __future__ import annotations

import numpy as np

from .filters import FilterGains, FilterState, QuatFilterState, ito_filter_step, ito_filter_step_quat
from .quaternion import quat_product, quat_to_rotation, rotation_to_quat
from .reconstruction import svd_reconstruct
from .sim import diffusion_matrix, wong_zakai_correction
from .so3 import exp_so3, hat, normalized_distance, rodriguez_to_rotation, upsilon_a


def _random_rotation(rng):
    return exp_so3(rng.uniform(-np.pi, np.pi, 3), 1.0)


def check_identities(rng, n=200):
    worst = 0.0
    for _ in range(n):
        a, b = rng.normal(size=3), rng.normal(size=3)
        r = _random_rotation(rng)
        worst = max(worst,
                    np.abs(-hat(b) @ hat(a) - ((b @ a) * np.eye(3) - np.outer(a, b))).max(),
                    np.abs(hat(r @ a) - r @ hat(a) @ r.T).max())
        rho = rng.uniform(-5, 5, 3)
        rr = rodriguez_to_rotation(rho)
        n2 = rho @ rho
        worst = max(worst, abs(normalized_distance(rr) - n2 / (1 + n2)),
                    np.abs(upsilon_a(rr) - 2 * rho / (1 + n2)).max())
    return worst


def check_wong_zakai(rng, n=50, h=1e-5):
    worst = 0.0
    for _ in range(n):
        rho = rng.uniform(-3, 3, 3)
        q2 = rng.uniform(0, 1, 3)
        g = diffusion_matrix(rho)
        fd = np.zeros(3)
        for k in range(3):
            e = np.zeros(3)
            e[k] = h
            dg = (diffusion_matrix(rho + e) - diffusion_matrix(rho - e)) / (2 * h)
            fd += (dg * (0.5 * q2 * g[k])).sum(axis=1)
        worst = max(worst, np.abs(fd - wong_zakai_correction(rho, q2)).max())
    return worst


def check_quaternions(rng, n=200):
    worst = 0.0
    for _ in range(n):
        a, b = rotation_to_quat(_random_rotation(rng)), rotation_to_quat(_random_rotation(rng))
        worst = max(worst, np.abs(quat_to_rotation(quat_product(a, b))
                                  - quat_to_rotation(a) @ quat_to_rotation(b)).max())
    return worst


def check_svd(rng, n=200):
    worst = 0.0
    for _ in range(n):
        r = _random_rotation(rng)
        vi = rng.normal(size=(4, 3))
        vi /= np.linalg.norm(vi, axis=1, keepdims=True)
        worst = max(worst, np.abs(svd_reconstruct(vi, vi @ r) - r).max())
    return worst


def check_representations(rng, steps=2000, dt=1e-3):
    gains = FilterGains()
    r_hat = _random_rotation(rng)
    sm = FilterState(r_hat)
    sq = QuatFilterState.from_matrix_state(sm)
    worst = 0.0
    for _ in range(steps):
        r_y = _random_rotation(rng) if rng.random() < 0.01 else exp_so3(rng.normal(size=3), 0.05)
        w = rng.normal(size=3)
        sm = ito_filter_step(sm, w, r_y, gains, dt)
        sq = ito_filter_step_quat(sq, w, rotation_to_quat(r_y), gains, dt)
        worst = max(worst, np.linalg.norm(sm.r_hat - sq.rotation()))
    return worst


CHECKS = (
    ("so3 identities", check_identities, 1e-12),
    ("wong-zakai vs finite differences", check_wong_zakai, 1e-6),
    ("quaternion homomorphism", check_quaternions, 1e-10),
    ("svd noise-free reconstruction", check_svd, 1e-9),
    ("matrix/quaternion ito filter", check_representations, 1e-6),
)


def run(seed: int = 0, echo=print) -> bool:
    rng = np.random.default_rng(seed)
    ok = True
    for name, fn, tol in CHECKS:
        err = fn(rng)
        passed = bool(err < tol)
        ok &= passed
        echo(f"{'PASS' if passed else 'FAIL'}  {name}: worst {err:.3e} (tol {tol:.0e})")
    return ok
