"""Forward-mode derivatives of complex-valued expressions.

Two number systems are walked over the expression tree:

* :class:`Dual` carries a value and its dense complex gradient in R^n, which
  gives the real 2 x n Jacobian (rows = gradients of Re and Im).
* :class:`Jet` carries truncated Taylor coefficients in one real parameter,
  used for derivatives of ``e(gamma(t))`` along a path.
"""

from __future__ import annotations

import cmath
import math
import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import DimensionError, DomainError, OrderTooLarge
from .expr import Expr, _check_point, evaluate, partial, walk

MAX_ORDER = int(os.environ.get("QLT_MAX_JET_ORDER", 16))
FD_STEP = 1e-5


# --------------------------------------------------------------------------
# dense first-order duals

class Dual:
    __slots__ = ("val", "grad")

    def __init__(self, val: complex, grad: np.ndarray):
        self.val = val
        self.grad = grad

    @staticmethod
    def _lift(other, n: int) -> "Dual":
        if isinstance(other, Dual):
            return other
        return Dual(complex(other), np.zeros(n, dtype=complex))

    def __neg__(self):
        return Dual(-self.val, -self.grad)

    def __add__(self, other):
        o = self._lift(other, self.grad.size)
        return Dual(self.val + o.val, self.grad + o.grad)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other, self.grad.size)
        return Dual(self.val - o.val, self.grad - o.grad)

    def __rsub__(self, other):
        return self._lift(other, self.grad.size) - self

    def __mul__(self, other):
        o = self._lift(other, self.grad.size)
        return Dual(self.val * o.val, self.val * o.grad + o.val * self.grad)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other, self.grad.size)
        if o.val == 0:
            raise DomainError("division by zero")
        q = self.val / o.val
        return Dual(q, (self.grad - q * o.grad) / o.val)

    def __rtruediv__(self, other):
        return self._lift(other, self.grad.size) / self

    def __pow__(self, n: int):
        if n == 0:
            return Dual(1 + 0j, np.zeros_like(self.grad))
        if self.val == 0 and n < 0:
            raise DomainError("negative power of zero")
        return Dual(self.val ** n, n * self.val ** (n - 1) * self.grad)


def _dual_exp(a: Dual) -> Dual:
    v = cmath.exp(a.val)
    return Dual(v, v * a.grad)


def _dual_sin(a: Dual) -> Dual:
    return Dual(cmath.sin(a.val), cmath.cos(a.val) * a.grad)


def _dual_cos(a: Dual) -> Dual:
    return Dual(cmath.cos(a.val), -cmath.sin(a.val) * a.grad)


def _dual_log(a: Dual) -> Dual:
    if a.val == 0:
        raise DomainError("log of zero")
    return Dual(cmath.log(a.val), a.grad / a.val)


_DUAL_FUNCS = {"exp": _dual_exp, "sin": _dual_sin, "cos": _dual_cos, "log": _dual_log}


@dataclass(frozen=True)
class JacobianR:
    """Real 2 x n Jacobian of a complex function at ``point``."""

    entries: np.ndarray
    point: np.ndarray
    value: complex

    @property
    def n(self) -> int:
        return self.entries.shape[1]

    def apply(self, v: Sequence[float]) -> complex:
        """Directional derivative along ``v`` as a complex number."""
        w = self.entries @ np.asarray(v, dtype=float)
        return complex(w[0], w[1])


def _finite(arr) -> bool:
    return bool(np.all(np.isfinite(np.asarray(arr))))


def jacobian(e: Expr, point: Sequence[float]) -> JacobianR:
    """Exact (to rounding) Jacobian by forward-mode differentiation."""
    leaves_c = _check_point(e, point)
    n = e.n
    eye = np.eye(n, dtype=complex)
    leaves = [Dual(leaves_c[j], eye[j]) for j in range(n)]
    try:
        out = walk(e.root, leaves, lambda c: Dual(c, np.zeros(n, dtype=complex)), _DUAL_FUNCS)
    except (ZeroDivisionError, OverflowError) as exc:
        raise DomainError(str(exc)) from None
    entries = np.vstack([out.grad.real, out.grad.imag])
    if not (cmath.isfinite(out.val) and _finite(entries)):
        raise DomainError("non-finite value or derivative")
    return JacobianR(entries, np.array([c.real for c in leaves_c]), out.val)


_ARRAY_FUNCS = {"exp": np.exp, "sin": np.sin, "cos": np.cos, "log": np.log}


@lru_cache(maxsize=256)
def _gradient(e: Expr) -> tuple[Expr, ...]:
    return tuple(partial(e, j) for j in range(e.n))


def jacobian_batch(e: Expr, points: np.ndarray) -> np.ndarray:
    """Jacobians at the rows of ``points`` as an (m, 2, n) array.

    The symbolic partials are evaluated once over all points with numpy
    arrays, which is much faster than one dual pass per point.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != e.n:
        raise DimensionError(f"expected points of shape (m, {e.n}), got {pts.shape}")
    leaves = [pts[:, j].astype(complex) for j in range(e.n)]
    out = np.empty((pts.shape[0], 2, e.n))
    with np.errstate(all="ignore"):
        for j, d in enumerate(_gradient(e)):
            col = walk(d.root, leaves, complex, _ARRAY_FUNCS) * np.ones(pts.shape[0])
            out[:, 0, j] = col.real
            out[:, 1, j] = col.imag
    if not _finite(out):
        raise DomainError("non-finite derivative on the batch")
    return out


def fd_jacobian(e: Expr, point: Sequence[float], h: float = FD_STEP) -> JacobianR:
    """Central-difference Jacobian; an independent oracle for tests."""
    if not h > 0:
        raise ValueError("step must be positive")
    x = np.asarray(point, dtype=float).ravel()
    if x.size != e.n:
        raise DimensionError(f"point has dimension {x.size}, expression expects {e.n}")
    cols = []
    for j in range(e.n):
        step = np.zeros_like(x)
        step[j] = h
        d = (evaluate(e, x + step) - evaluate(e, x - step)) / (2 * h)
        cols.append((d.real, d.imag))
    return JacobianR(np.array(cols, dtype=float).T.reshape(2, e.n), x.copy(), evaluate(e, x))


# --------------------------------------------------------------------------
# truncated Taylor jets

class Jet:
    """Taylor coefficients c_0..c_k of a function of one real parameter."""

    __slots__ = ("c",)

    def __init__(self, c: np.ndarray):
        self.c = c

    @property
    def order(self) -> int:
        return self.c.size - 1

    def _lift(self, other) -> "Jet":
        if isinstance(other, Jet):
            return other
        c = np.zeros_like(self.c)
        c[0] = other
        return Jet(c)

    def __neg__(self):
        return Jet(-self.c)

    def __add__(self, other):
        return Jet(self.c + self._lift(other).c)

    __radd__ = __add__

    def __sub__(self, other):
        return Jet(self.c - self._lift(other).c)

    def __rsub__(self, other):
        return Jet(self._lift(other).c - self.c)

    def __mul__(self, other):
        o = self._lift(other)
        return Jet(np.convolve(self.c, o.c)[: self.c.size])

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._lift(other).c
        a = self.c
        if b[0] == 0:
            raise DomainError("division by a jet with zero constant term")
        q = np.zeros_like(a)
        for m in range(a.size):
            q[m] = (a[m] - np.dot(b[1 : m + 1], q[m - 1 :: -1][:m])) / b[0]
        return Jet(q)

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def __pow__(self, n: int):
        if n < 0:
            return 1.0 / (self ** (-n))
        out = self._lift(1.0)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out


def _jet_exp(a: Jet) -> Jet:
    c = a.c
    e = np.zeros_like(c)
    e[0] = cmath.exp(c[0])
    j = np.arange(c.size)
    for m in range(1, c.size):
        e[m] = np.dot(j[1 : m + 1] * c[1 : m + 1], e[m - 1 :: -1][:m]) / m
    return Jet(e)


def _jet_sincos(a: Jet) -> tuple[Jet, Jet]:
    c = a.c
    s = np.zeros_like(c)
    co = np.zeros_like(c)
    s[0], co[0] = cmath.sin(c[0]), cmath.cos(c[0])
    j = np.arange(c.size)
    for m in range(1, c.size):
        jc = j[1 : m + 1] * c[1 : m + 1]
        s[m] = np.dot(jc, co[m - 1 :: -1][:m]) / m
        co[m] = -np.dot(jc, s[m - 1 :: -1][:m]) / m
    return Jet(s), Jet(co)


def _jet_log(a: Jet) -> Jet:
    c = a.c
    if c[0] == 0:
        raise DomainError("log of zero")
    out = np.zeros_like(c)
    out[0] = cmath.log(c[0])
    j = np.arange(c.size)
    for m in range(1, c.size):
        # a * l' = a'  ->  m a0 l_m = m a_m - sum_{j<m} j l_j a_{m-j}
        acc = np.dot(j[1:m] * out[1:m], c[m - 1 : 0 : -1]) if m > 1 else 0
        out[m] = (c[m] - acc / m) / c[0]
    return Jet(out)


_JET_FUNCS = {
    "exp": _jet_exp,
    "sin": lambda a: _jet_sincos(a)[0],
    "cos": lambda a: _jet_sincos(a)[1],
    "log": _jet_log,
}


@dataclass(frozen=True)
class TaylorJet:
    """c_j = (1/j!) d^j/dt^j e(gamma(t)) at ``t0``."""

    coefficients: np.ndarray
    t0: float

    @property
    def order(self) -> int:
        return self.coefficients.size - 1

    def derivative(self, j: int) -> complex:
        return complex(self.coefficients[j] * math.factorial(j))


def _check_order(k: int) -> None:
    if k < 0:
        raise ValueError("order must be non-negative")
    if k > MAX_ORDER:
        raise OrderTooLarge(f"order {k} exceeds the cap {MAX_ORDER}")


def eval_jet(e: Expr, leaves: Sequence[Jet]) -> Jet:
    """Walk ``e`` with jet-valued variables."""
    if len(leaves) != e.n:
        raise DimensionError(f"{len(leaves)} jets given, expression expects {e.n}")
    size = leaves[0].c.size

    def const(v: complex) -> Jet:
        c = np.zeros(size, dtype=complex)
        c[0] = v
        return Jet(c)

    try:
        out = walk(e.root, list(leaves), const, _JET_FUNCS)
    except (ZeroDivisionError, OverflowError) as exc:
        raise DomainError(str(exc)) from None
    if not _finite(out.c):
        raise DomainError("non-finite Taylor coefficient")
    return out


def parameter_jet(t0: float, k: int) -> Jet:
    c = np.zeros(k + 1, dtype=complex)
    c[0] = t0
    if k >= 1:
        c[1] = 1.0
    return Jet(c)


def component_jets(components: Sequence[Expr], t0: float, k: int) -> list[Jet]:
    """Jets of each path component at ``t0``; components are one-variable expressions."""
    _check_order(k)
    t = parameter_jet(t0, k)
    jets = []
    for comp in components:
        if comp.n != 1:
            raise DimensionError("path components must be expressions in one variable")
        jets.append(eval_jet(comp, [t]))
    return jets


def taylor_jet(e: Expr, path, order: int, t0: float | None = None) -> TaylorJet:
    """Taylor coefficients of ``e`` composed with ``path`` at parameter ``t0``.

    ``path`` is anything with a ``components`` sequence of one-variable
    expressions (see :class:`qlt.limits.PathSpec`) and a default ``t0``.
    """
    if order < 1:
        raise ValueError("order must be at least 1")
    if t0 is None:
        t0 = getattr(path, "t0", 0.0)
    comps = path.components
    if len(comps) != e.n:
        raise DimensionError(f"path has {len(comps)} components, expression expects {e.n}")
    jets = component_jets(comps, float(t0), order)
    out = eval_jet(e, jets)
    return TaylorJet(out.c.copy(), float(t0))
