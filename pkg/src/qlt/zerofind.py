"""Locating and certifying common simple zeros of a pair (f, g)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .autodiff import JacobianR, jacobian
from .errors import NoConvergence, NotCommonZero, NotSimpleZero
from .expr import Expr, evaluate

ZERO_TOL = 1e-10
RANK_TOL = 1e-6
MAX_ITER = 50


def gram_eig(j: np.ndarray) -> tuple[float, float, np.ndarray]:
    """Eigen-decomposition of the 2x2 Gram matrix ``j @ j.T``.

    Returns ``(l1, l2, V)`` with ``l1 >= l2 >= 0`` and orthonormal
    eigenvectors in the columns of ``V``.
    """
    a = float(j[0] @ j[0])
    b = float(j[0] @ j[1])
    c = float(j[1] @ j[1])
    half_gap = math.hypot((a - c) / 2, b)
    mean = (a + c) / 2
    l1 = mean + half_gap
    # det / l1 keeps the small eigenvalue accurate when l2 << l1
    det = a * c - b * b
    l2 = max(det / l1, 0.0) if l1 > 0 else 0.0
    if half_gap == 0:
        v = np.eye(2)
    elif a >= c:
        v1 = np.array([half_gap + (a - c) / 2, b])
        v1 /= np.linalg.norm(v1)
        v = np.column_stack([v1, [-v1[1], v1[0]]])
    else:
        v1 = np.array([b, half_gap - (a - c) / 2])
        v1 /= np.linalg.norm(v1)
        v = np.column_stack([v1, [-v1[1], v1[0]]])
    return l1, l2, v


def singular_values(j: np.ndarray) -> tuple[float, float]:
    """Singular values of a real 2 x n matrix, largest first."""
    l1, l2, _ = gram_eig(np.asarray(j, dtype=float))
    return math.sqrt(l1), math.sqrt(l2)


def pinv_2xn(j: np.ndarray, rcond: float = 1e-15) -> np.ndarray:
    """Moore-Penrose pseudoinverse (n x 2) of a real 2 x n matrix."""
    j = np.asarray(j, dtype=float)
    l1, l2, v = gram_eig(j)
    inv = np.zeros(2)
    if l1 > 0:
        inv[0] = 1.0 / l1
        if l2 > rcond * rcond * l1:
            inv[1] = 1.0 / l2
    return j.T @ (v * inv) @ v.T


@dataclass(frozen=True)
class SimpleZeroCheck:
    simple: bool
    sigma1: float
    sigma2: float

    def __bool__(self) -> bool:
        return self.simple


def is_simple_zero(jac: JacobianR | np.ndarray, rank_tol: float = RANK_TOL) -> SimpleZeroCheck:
    """Rank-2 test of a Jacobian via its smallest singular value."""
    entries = jac.entries if isinstance(jac, JacobianR) else np.asarray(jac, dtype=float)
    s1, s2 = singular_values(entries)
    return SimpleZeroCheck(s2 >= rank_tol, s1, s2)


@dataclass(frozen=True)
class ZeroPoint:
    location: np.ndarray
    jac_f: JacobianR
    jac_g: JacobianR
    sigma2_f: float
    sigma2_g: float
    residual_f: float
    residual_g: float

    def as_dict(self) -> dict:
        return {
            "location": [float(v) for v in self.location],
            "residual_f": self.residual_f,
            "residual_g": self.residual_g,
            "sigma2_f": self.sigma2_f,
            "sigma2_g": self.sigma2_g,
            "jac_f": self.jac_f.entries.tolist(),
            "jac_g": self.jac_g.entries.tolist(),
        }


def certify(f: Expr, g: Expr, x: Sequence[float], zero_tol: float = ZERO_TOL,
            rank_tol: float = RANK_TOL) -> ZeroPoint:
    """Build a ZeroPoint at ``x``, raising if either certificate fails."""
    x = np.asarray(x, dtype=float)
    jf = jacobian(f, x)
    rf = abs(jf.value)
    if rf > zero_tol:
        raise NoConvergence(f"|f| = {rf:.3e} exceeds zero_tol at {x.tolist()}")
    jg = jacobian(g, x)
    rg = abs(jg.value)
    if rg > zero_tol:
        raise NotCommonZero(f"|g| = {rg:.3e} at the zero of f {x.tolist()}")
    s2f = singular_values(jf.entries)[1]
    s2g = singular_values(jg.entries)[1]
    if s2f < rank_tol or s2g < rank_tol:
        raise NotSimpleZero(
            f"smallest singular values {s2f:.3e} (f), {s2g:.3e} (g) below rank_tol {rank_tol:g}"
        )
    return ZeroPoint(x.copy(), jf, jg, s2f, s2g, rf, rg)


def refine_zero(f: Expr, g: Expr, seed: Sequence[float], zero_tol: float = ZERO_TOL,
                rank_tol: float = RANK_TOL, max_iter: int = MAX_ITER) -> ZeroPoint:
    """Gauss-Newton on (Re f, Im f) = 0 with minimal-norm steps, then certify.

    The iteration follows f only; g is checked at the point found.
    """
    if zero_tol <= 0 or rank_tol <= 0:
        raise ValueError("tolerances must be positive")
    x = np.array(seed, dtype=float).ravel()
    if not np.all(np.isfinite(x)):
        raise ValueError("seed is not finite")
    for _ in range(max_iter + 1):
        jf = jacobian(f, x)
        if abs(jf.value) <= zero_tol:
            break
        if singular_values(jf.entries)[1] == 0.0:
            raise NotSimpleZero(f"Jacobian of f is rank deficient at {x.tolist()}")
        step = pinv_2xn(jf.entries) @ np.array([jf.value.real, jf.value.imag])
        x = x - step
        if not np.all(np.isfinite(x)):
            raise NoConvergence("iterate left the finite range")
    else:
        raise NoConvergence(f"no zero of f within {max_iter} iterations from seed")
    return certify(f, g, x, zero_tol, rank_tol)


def nearest_zero(f: Expr, g: Expr, x: Sequence[float], zero_tol: float = ZERO_TOL,
                 rank_tol: float = RANK_TOL, max_iter: int = MAX_ITER) -> ZeroPoint:
    """Foot point of ``x`` on the common zero set (up to curvature error).

    A point that already satisfies both residual bounds is returned as is.
    """
    x = np.array(x, dtype=float).ravel()
    if abs(evaluate(f, x)) <= zero_tol and abs(evaluate(g, x)) <= zero_tol:
        return certify(f, g, x, zero_tol, rank_tol)
    return refine_zero(f, g, x, zero_tol, rank_tol, max_iter)
