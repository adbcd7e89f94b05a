"""Static attitude from paired vector observations (SVD solution of Wahba's problem)."""

from __future__ import annotations

import numpy as np

from .errors import DegenerateGeometryError, InvalidArgumentError

RANK_TOL = 1e-9
UNIT_TOL = 1e-9


def _weights(n: int, weights) -> np.ndarray:
    if weights is None:
        return np.full(n, 1.0 / n)
    s = np.asarray(weights, dtype=float)
    if s.shape != (n,) or np.any(s < 0):
        raise InvalidArgumentError("weights must be n nonnegative values")
    if abs(s.sum() - 1.0) > 1e-9:
        raise InvalidArgumentError("weights must sum to one")
    return s


def profile_matrix(v_inertial, v_body, weights=None) -> np.ndarray:
    """``B = sum_i s_i v_B,i v_I,i^T``; leading batch axes are allowed."""
    vi = np.asarray(v_inertial, dtype=float)
    vb = np.asarray(v_body, dtype=float)
    s = _weights(vi.shape[-2], weights)
    return np.einsum("i,...ij,...ik->...jk", s, vb, vi)


def wahba_cost(r, b) -> float:
    """``J(R) = 1 - Tr{R^T B^T}``."""
    return 1.0 - float(np.trace(np.asarray(r).T @ np.asarray(b).T))


def svd_from_profile(b) -> np.ndarray:
    """Rotation maximizing ``Tr{R^T B^T}``, for one or a stack of ``B``.

    Raises
    ------
    DegenerateGeometryError
        If any ``B`` has its two smallest singular values below ``RANK_TOL``.
    """
    b = np.asarray(b, dtype=float)
    u, sv, vt = np.linalg.svd(b)
    if np.any((sv[..., 1] < RANK_TOL) & (sv[..., 2] < RANK_TOL)):
        raise DegenerateGeometryError("attitude profile matrix has rank < 2")
    v = np.swapaxes(vt, -1, -2)
    # V+ U+^T = V diag(1, 1, det U det V) U^T
    d = np.linalg.det(u) * np.linalg.det(v)
    v = v.copy()
    v[..., :, 2] *= d[..., None]
    return v @ np.swapaxes(u, -1, -2)


def svd_reconstruct(v_inertial, v_body, weights=None) -> np.ndarray:
    """Reconstruct the attitude ``R_y`` from unit vector pairs.

    Parameters
    ----------
    v_inertial, v_body : (n, 3) arrays of unit vectors, n >= 3 (append
        the cross product beforehand when only two sensors exist)
    weights : confidence levels summing to one; equal weights by default
    """
    vi = np.asarray(v_inertial, dtype=float)
    vb = np.asarray(v_body, dtype=float)
    if vi.shape != vb.shape or vi.ndim != 2 or vi.shape[1] != 3:
        raise InvalidArgumentError("expected two (n, 3) arrays of equal shape")
    if len(vi) < 3:
        raise DegenerateGeometryError("need at least three vector pairs")
    for v in (vi, vb):
        if np.max(np.abs(np.linalg.norm(v, axis=1) - 1.0)) > UNIT_TOL:
            raise InvalidArgumentError("vectors must be unit norm")
    return svd_from_profile(profile_matrix(vi, vb, weights))
