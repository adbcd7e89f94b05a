"""Rotation-group algebra: skew maps, projections and attitude charts.

Rotations are plain ``(3, 3)`` float arrays and vectors ``(3,)`` arrays.
Nothing here mutates its inputs.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidArgumentError, SingularityError

ORTHO_TOL = 1e-9
SKEW_TOL = 1e-9
UNIT_TOL = 1e-9
# guard on (Tr{R} + 1) for the Rodriguez chart
RODRIGUEZ_EPS = 1e-6
# below this rotation angle exp_so3 switches to Taylor coefficients
EXP_TAYLOR_THRESHOLD = 1e-8

I3 = np.eye(3)


def hat(alpha) -> np.ndarray:
    """Skew-symmetric matrix with ``hat(a) @ b == cross(a, b)``."""
    a1, a2, a3 = alpha
    return np.array([
        [0.0, -a3, a2],
        [a3, 0.0, -a1],
        [-a2, a1, 0.0],
    ])


def vex(a, tol: float = SKEW_TOL) -> np.ndarray:
    """Inverse of :func:`hat`.

    Raises
    ------
    InvalidArgumentError
        If ``a`` is not antisymmetric within ``tol``.
    """
    a = np.asarray(a, dtype=float)
    if np.max(np.abs(a + a.T)) > tol:
        raise InvalidArgumentError("vex expects an antisymmetric matrix")
    return np.array([a[2, 1], a[0, 2], a[1, 0]])


def anti_sym_projection(b) -> np.ndarray:
    b = np.asarray(b, dtype=float)
    return 0.5 * (b - b.T)


def upsilon_a(r) -> np.ndarray:
    """vex of the antisymmetric part of ``r``.

    For ``r = rodriguez_to_rotation(rho)`` this is ``2 rho / (1 + |rho|^2)``.
    """
    r = np.asarray(r, dtype=float)
    return 0.5 * np.array([r[2, 1] - r[1, 2], r[0, 2] - r[2, 0], r[1, 0] - r[0, 1]])


def normalized_distance(r) -> float:
    """``Tr{I - r} / 4``, in [0, 1] for rotations (1 at half turns)."""
    return 0.25 * (3.0 - float(np.trace(r)))


def is_rotation(r, tol: float = ORTHO_TOL) -> bool:
    r = np.asarray(r, dtype=float)
    if r.shape != (3, 3):
        return False
    return (np.linalg.norm(r.T @ r - I3) <= tol) and abs(np.linalg.det(r) - 1.0) <= tol


def angle_axis_to_rotation(alpha: float, u, tol: float = UNIT_TOL) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if abs(np.linalg.norm(u) - 1.0) > tol:
        raise InvalidArgumentError("rotation axis must be a unit vector")
    ux = hat(u)
    return I3 + np.sin(alpha) * ux + (1.0 - np.cos(alpha)) * (ux @ ux)


def rodriguez_to_rotation(rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=float)
    n2 = float(rho @ rho)
    return ((1.0 - n2) * I3 + 2.0 * np.outer(rho, rho) + 2.0 * hat(rho)) / (1.0 + n2)


def rotation_to_rodriguez(r, eps: float = RODRIGUEZ_EPS) -> np.ndarray:
    """Rodriguez vector of ``r``.

    Uses ``rho = upsilon_a(r) / (2 (1 - ||r||_I))``, which inverts
    :func:`rodriguez_to_rotation` away from half turns.

    Raises
    ------
    SingularityError
        If ``Tr{r} + 1 <= eps`` (rotation too close to 180 degrees).
    """
    r = np.asarray(r, dtype=float)
    tr = float(np.trace(r))
    if tr + 1.0 <= eps:
        raise SingularityError(f"Rodriguez chart undefined near half turn (Tr+1={tr + 1.0:.3e})")
    # 2 (1 - ||r||_I) == (1 + Tr) / 2
    return upsilon_a(r) / (0.5 * (1.0 + tr))


def exp_so3(omega, dt: float) -> np.ndarray:
    """Rotation through ``|omega| dt`` about ``omega``.

    Closed form of ``expm(hat(omega) * dt)``; small angles use a
    second-order expansion of the coefficients to avoid 0/0.
    """
    phi = np.asarray(omega, dtype=float) * dt
    theta2 = float(phi @ phi)
    theta = np.sqrt(theta2)
    if theta < EXP_TAYLOR_THRESHOLD:
        a = 1.0 - theta2 / 6.0
        b = 0.5 - theta2 / 24.0
    else:
        a = np.sin(theta) / theta
        b = (1.0 - np.cos(theta)) / theta2
    px = hat(phi)
    return I3 + a * px + b * (px @ px)
