"""One-dimensional Hadamard factorization f(x) = f(0) + x g(x) and quotients along paths.

The derivatives of the remainder follow from the integral identity

    g^(j)(x) = x^-(j+1) * int_0^x t^j f^(j+1)(t) dt = int_0^1 s^j f^(j+1)(x s) ds,

evaluated here in the second (scale-free) form, with g^(j)(0) = f^(j+1)(0)/(j+1).
Derivatives of f come from Taylor jets, never from finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .autodiff import MAX_ORDER, taylor_jet
from .errors import NotOnZeroSet, OrderTooLarge, ZeroDerivativeOnPath
from .expr import Expr, cdiv, evaluate
from .extension import NEAR_TOL, QUAD_ORDER, gauss_legendre_01
from .limits import TRANSVERSAL_TOL, PathSpec
from .zerofind import ZERO_TOL


@lru_cache(maxsize=None)
def _identity_path() -> PathSpec:
    return PathSpec.parse("t")


@dataclass(frozen=True)
class Factor1D:
    """f composed with a path, expanded about the path's t0, of regularity order k.

    A one-variable expression may be given without a path; it is then read
    along the identity t -> t.
    """

    expr: Expr
    order: int
    path: PathSpec | None = None

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("order must be at least 1")
        if self.order > MAX_ORDER:
            raise OrderTooLarge(f"order {self.order} exceeds the jet cap {MAX_ORDER}")
        if self.path is None and self.expr.n != 1:
            raise ValueError("a path is required for expressions in more than one variable")

    @property
    def curve(self) -> PathSpec:
        return self.path if self.path is not None else _identity_path()

    @property
    def t0(self) -> float:
        return self.curve.t0

    def __call__(self, x: float) -> complex:
        return evaluate(self.expr, self.curve.point(self.t0 + x))

    def f_derivative(self, m: int, x: float = 0.0) -> complex:
        """m-th derivative of the composed function at offset ``x``."""
        return taylor_jet(self.expr, self.curve, max(m, 1), self.t0 + x).derivative(m)

    def remainder(self, x: float) -> complex:
        """g(x) = (f(x) - f(0)) / x, with g(0) = f'(0)."""
        if x == 0:
            return self.f_derivative(1)
        return (self(x) - self(0.0)) / x

    def derivative(self, j: int, x: float, quad_order: int | None = None) -> complex:
        return peano_derivatives(self, j, x, quad_order)


def peano_derivatives(f1d: Factor1D, j: int, x: float, quad_order: int | None = None) -> complex:
    """j-th derivative of the Hadamard remainder g at offset ``x``."""
    if j < 0:
        raise ValueError("j must be non-negative")
    if j > f1d.order - 1:
        raise OrderTooLarge(f"g^({j}) needs j <= order - 1 = {f1d.order - 1}")
    if x == 0:
        return f1d.f_derivative(j + 1) / (j + 1)
    nodes, weights = gauss_legendre_01(QUAD_ORDER if quad_order is None else quad_order)
    total = 0j
    for s, w in zip(nodes, weights):
        total += w * s ** j * f1d.f_derivative(j + 1, x * s)
    return total


def complex_quotient_1d(f: Expr, g: Expr, path: PathSpec, t: float,
                        near_tol: float = NEAR_TOL, quad_order: int | None = None,
                        zero_tol: float = ZERO_TOL) -> complex:
    """phi(t) with f(gamma(t)) = g(gamma(t)) phi(t) for a common zero at gamma(t0).

    Within ``near_tol`` of t0 both remainders F, G of the Hadamard factor are
    used, phi = F/G, which equals f'/g' at t0 itself.
    """
    ff = Factor1D(f, 1, path)
    gg = Factor1D(g, 1, path)
    if abs(ff(0.0)) > zero_tol or abs(gg(0.0)) > zero_tol:
        raise NotOnZeroSet(f"gamma(t0) = {path.base.tolist()} is not a common zero")
    fp, gp = ff.f_derivative(1), gg.f_derivative(1)
    if abs(fp) < TRANSVERSAL_TOL or abs(gp) < TRANSVERSAL_TOL:
        raise ZeroDerivativeOnPath(
            f"derivatives along the path vanish at t0: |f'| = {abs(fp):.3e}, |g'| = {abs(gp):.3e}"
        )
    s = t - path.t0
    if abs(s) > near_tol:
        x = path.point(t)
        return cdiv(evaluate(f, x), evaluate(g, x))
    if s == 0:
        return cdiv(fp, gp)
    return cdiv(peano_derivatives(ff, 0, s, quad_order), peano_derivatives(gg, 0, s, quad_order))


def remainder_table(f1d: Factor1D, points, quad_order: int | None = None) -> list[tuple[float, int, complex]]:
    """Rows (x, j, g^(j)(x)) for j = 0..order-1."""
    rows = []
    for x in np.asarray(points, dtype=float):
        for j in range(f1d.order):
            rows.append((float(x), j, peano_derivatives(f1d, j, float(x), quad_order)))
    return rows
