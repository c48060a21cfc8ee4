"""Stable evaluation of f/g near the common zero set and its continuous extension.

Near a zero ``a`` both functions factor exactly through the segment-averaged
Jacobian, ``f(x) = P (x - a)`` and ``g(x) = Q (x - a)``, so the quotient can
be formed from ``P u`` and ``Q u`` with the unit vector ``u`` along ``x - a``
instead of dividing two tiny numbers.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .autodiff import jacobian_batch
from .errors import NotComplexLinearError, ReconstructionFailure
from .expr import Expr, cdiv, evaluate
from .ratio import ComplexLinear, derivative_ratio
from .zerofind import RANK_TOL, ZERO_TOL, ZeroPoint, nearest_zero, singular_values

NEAR_TOL = 1e-4
FTC_TOL = 1e-9
QUAD_ORDER = int(os.environ.get("QLT_QUAD_ORDER", 32))


@lru_cache(maxsize=None)
def gauss_legendre_01(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [0, 1]."""
    if order < 1:
        raise ValueError("quadrature order must be positive")
    x, w = np.polynomial.legendre.leggauss(order)
    return (x + 1) / 2, w / 2


@dataclass(frozen=True)
class AveragedJacobian:
    P: np.ndarray
    base: np.ndarray
    target: np.ndarray
    quad_order: int
    reconstruction_error: float

    def apply(self, v: Sequence[float]) -> complex:
        w = self.P @ np.asarray(v, dtype=float)
        return complex(w[0], w[1])


def averaged_jacobian(e: Expr, a: Sequence[float], x: Sequence[float],
                      quad_order: int | None = None, ftc_tol: float = FTC_TOL) -> AveragedJacobian:
    """Integral of the Jacobian of ``e`` over the segment from ``a`` to ``x``."""
    order = QUAD_ORDER if quad_order is None else quad_order
    a = np.asarray(a, dtype=float).ravel()
    x = np.asarray(x, dtype=float).ravel()
    v = x - a
    nodes, weights = gauss_legendre_01(order)
    p = np.tensordot(weights, jacobian_batch(e, a + nodes[:, None] * v), axes=1)
    fx = evaluate(e, x)
    recon = p @ v
    err = abs(complex(recon[0], recon[1]) - fx)
    if err > 100 * ftc_tol * (1 + abs(fx)):
        raise ReconstructionFailure(
            f"||P(x-a) - f(x)|| = {err:.3e} at x={x.tolist()}; "
            "the base point is not a zero or the integrand is too rough for order "
            f"{order}"
        )
    return AveragedJacobian(p, a, x, order, err)


@dataclass(frozen=True)
class QuotientValue:
    value: complex
    method: str  # "direct", "averaged" or "on_gamma"
    zero: ZeroPoint | None = None
    stability: float | None = None  # sigma2 of Q at the zero, a proxy for |Q v| >= c |v|


def quotient_eval(f: Expr, g: Expr, x: Sequence[float], near_tol: float = NEAR_TOL,
                  quad_order: int | None = None, zero_tol: float = ZERO_TOL,
                  rank_tol: float = RANK_TOL, ftc_tol: float = FTC_TOL) -> QuotientValue:
    """Value of the continuous quotient f/g at ``x``.

    Far from the zero set this is plain division.  Closer than ``near_tol``
    (measured by |g|) the averaged factorization is used, and on the zero
    set itself the complex number of the derivative ratio is returned.
    Raises NotComplexLinearError on the zero set when no continuous value
    exists there.
    """
    x = np.asarray(x, dtype=float).ravel()
    gx = evaluate(g, x)
    if abs(gx) > near_tol:
        return QuotientValue(cdiv(evaluate(f, x), gx), "direct")

    zero = nearest_zero(f, g, x, zero_tol, rank_tol)
    stability = singular_values(zero.jac_g.entries)[1]
    v = x - zero.location
    dist = float(np.linalg.norm(v))
    if dist <= zero_tol:
        ratio = derivative_ratio(zero.jac_f, zero.jac_g, rank_tol=rank_tol)
        cls = ratio.classification
        if not isinstance(cls, ComplexLinear):
            raise NotComplexLinearError(
                f"derivative ratio at {zero.location.tolist()} is not a scaled rotation "
                f"(defect {cls.defect:.3g}, {cls.reason}); f/g has no continuous value there"
            )
        return QuotientValue(cls.lam, "on_gamma", zero, stability)

    p = averaged_jacobian(f, zero.location, x, quad_order, ftc_tol)
    q = averaged_jacobian(g, zero.location, x, quad_order, ftc_tol)
    u = v / dist
    return QuotientValue(cdiv(p.apply(u), q.apply(u)), "averaged", zero, stability)
