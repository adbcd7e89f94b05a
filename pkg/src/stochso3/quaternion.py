"""Unit quaternions ``[q0, qx, qy, qz]`` (scalar first, Hamilton product).

``quat_to_rotation`` is a homomorphism: ``R(a * b) == R(a) @ R(b)``.
"""

from __future__ import annotations

import numpy as np

from .so3 import EXP_TAYLOR_THRESHOLD, hat

Q_IDENTITY = np.array([1.0, 0.0, 0.0, 0.0])
# renormalize products whose norm drifted more than this
RENORM_TOL = 1e-12


def _renormalize(q: np.ndarray) -> np.ndarray:
    n = np.sqrt(q @ q)
    if abs(n - 1.0) > RENORM_TOL:
        q = q / n
    return q


def _hamilton(a, b) -> np.ndarray:
    a0, av = a[0], np.asarray(a[1:], dtype=float)
    b0, bv = b[0], np.asarray(b[1:], dtype=float)
    out = np.empty(4)
    out[0] = a0 * b0 - av @ bv
    out[1:] = a0 * bv + b0 * av + np.cross(av, bv)
    return out


def quat_product(a, b) -> np.ndarray:
    return _renormalize(_hamilton(a, b))


def quat_inverse(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    return np.array([a[0], -a[1], -a[2], -a[3]])


def quat_to_rotation(a) -> np.ndarray:
    q0 = float(a[0])
    q = np.asarray(a[1:], dtype=float)
    return (q0 * q0 - q @ q) * np.eye(3) + 2.0 * np.outer(q, q) + 2.0 * q0 * hat(q)


def rotation_to_quat(r) -> np.ndarray:
    """Quaternion of a rotation matrix, sign fixed so that ``q0 >= 0``.

    Picks the largest of ``q0^2, qx^2, qy^2, qz^2`` as pivot so the
    division stays well conditioned near half turns.
    """
    r = np.asarray(r, dtype=float)
    tr = r[0, 0] + r[1, 1] + r[2, 2]
    # 4*q0^2, 4*qx^2, 4*qy^2, 4*qz^2 up to the shared "+1"
    diag = np.array([tr, 2 * r[0, 0] - tr, 2 * r[1, 1] - tr, 2 * r[2, 2] - tr])
    k = int(np.argmax(diag))
    s = np.sqrt(max(1.0 + diag[k], 0.0))  # = 2 |q_k|
    q = np.empty(4)
    if k == 0:
        q[0] = 0.5 * s
        q[1] = (r[2, 1] - r[1, 2]) / (2 * s)
        q[2] = (r[0, 2] - r[2, 0]) / (2 * s)
        q[3] = (r[1, 0] - r[0, 1]) / (2 * s)
    elif k == 1:
        q[1] = 0.5 * s
        q[0] = (r[2, 1] - r[1, 2]) / (2 * s)
        q[2] = (r[0, 1] + r[1, 0]) / (2 * s)
        q[3] = (r[0, 2] + r[2, 0]) / (2 * s)
    elif k == 2:
        q[2] = 0.5 * s
        q[0] = (r[0, 2] - r[2, 0]) / (2 * s)
        q[1] = (r[0, 1] + r[1, 0]) / (2 * s)
        q[3] = (r[1, 2] + r[2, 1]) / (2 * s)
    else:
        q[3] = 0.5 * s
        q[0] = (r[1, 0] - r[0, 1]) / (2 * s)
        q[1] = (r[0, 2] + r[2, 0]) / (2 * s)
        q[2] = (r[1, 2] + r[2, 1]) / (2 * s)
    if q[0] < 0.0:
        q = -q
    return q / np.sqrt(q @ q)


def quat_exp(omega, dt: float) -> np.ndarray:
    """Unit quaternion of the rotation ``exp_so3(omega, dt)``."""
    phi = np.asarray(omega, dtype=float) * dt
    theta2 = float(phi @ phi)
    theta = np.sqrt(theta2)
    half = 0.5 * theta
    if theta < EXP_TAYLOR_THRESHOLD:
        s = 0.5 - theta2 / 48.0  # sin(theta/2) / theta
        c = 1.0 - theta2 / 8.0
    else:
        s = np.sin(half) / theta
        c = np.cos(half)
    return np.array([c, s * phi[0], s * phi[1], s * phi[2]])


def quat_kinematics_step(qhat, gamma, dt: float, method: str = "exact") -> np.ndarray:
    """Advance ``Qdot = 0.5 * Omega(gamma) Q`` by one step of length ``dt``.

    ``method="exact"`` right-multiplies by the exponential of the body
    rate (matches ``R @ exp_so3(gamma, dt)``); ``method="euler"`` takes
    one forward Euler step of the 4x4 linear system and renormalizes.
    """
    qhat = np.asarray(qhat, dtype=float)
    if method == "exact":
        return quat_product(qhat, quat_exp(gamma, dt))
    if method == "euler":
        g = np.asarray(gamma, dtype=float)
        omega = np.zeros((4, 4))
        omega[0, 1:] = -g
        omega[1:, 0] = g
        omega[1:, 1:] = -hat(g)
        q = qhat + 0.5 * dt * (omega @ qhat)
        return q / np.sqrt(q @ q)
    raise ValueError(f"unknown quaternion integration method {method!r}")


def quat_sandwich(q, v) -> np.ndarray:
    """``Q^-1 * [0, v] * Q`` as a full 4-vector (scalar part ~ 0).

    The vector part is the body-frame image ``R_Q^T v`` of an inertial
    vector ``v``.
    """
    p = np.concatenate(([0.0], np.asarray(v, dtype=float)))
    q = np.asarray(q, dtype=float)
    return _hamilton(_hamilton(quat_inverse(q), p), q)
