"""Directional limits of f/g along paths through the common zero set."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .autodiff import component_jets, jacobian
from .errors import DegeneratePath, NotOnZeroSet, NotTransversal, SampleOnZeroSet
from .expr import Binary, Call, Const, Expr, Neg, Pow, Var, cdiv, evaluate, parse, split_top_level
from .ratio import DerivativeRatio, derivative_ratio
from .zerofind import RANK_TOL, ZERO_TOL

TRANSVERSAL_TOL = 1e-8
DEFAULT_SAMPLES = tuple(2.0 ** -k for k in range(3, 13))
FIT_POINTS = 4


@dataclass(frozen=True)
class PathSpec:
    """A path t -> (gamma_1(t), ..., gamma_n(t)) given by one-variable expressions."""

    components: tuple[Expr, ...]
    t0: float = 0.0
    velocity: np.ndarray = field(init=False, repr=False, compare=False)
    base: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        jets = component_jets(self.components, self.t0, 1)
        c = np.array([j.c for j in jets])
        if np.any(np.abs(c.imag) > 1e-14 * (1 + np.abs(c.real))):
            raise DegeneratePath("path components must be real-valued")
        vel = c[:, 1].real.copy()
        if not np.all(np.isfinite(vel)) or not np.any(vel != 0):
            raise DegeneratePath(f"path velocity at t0={self.t0} is zero or not finite")
        object.__setattr__(self, "base", c[:, 0].real.copy())
        object.__setattr__(self, "velocity", vel)

    @classmethod
    def parse(cls, source: str | Sequence[str], t0: float = 0.0, variable: str = "t") -> "PathSpec":
        """Parse ``"t, 2*t"`` (or a list of component strings)."""
        parts = split_top_level(source) if isinstance(source, str) else list(source)
        return cls(tuple(parse(p, [variable]) for p in parts), float(t0))

    @classmethod
    def line(cls, base: Sequence[float], direction: Sequence[float]) -> "PathSpec":
        """Straight path t -> base + t*direction."""
        comps = []
        for b, d in zip(base, direction):
            comps.append(parse(f"{float(b)!r} + {float(d)!r}*t", ["t"]))
        return cls(tuple(comps))

    @property
    def n(self) -> int:
        return len(self.components)

    def point(self, t: float) -> np.ndarray:
        return np.array([evaluate(c, [t]).real for c in self.components])

    def reparametrize(self, s: float) -> "PathSpec":
        """The path t -> gamma(s*t) about t0 = 0."""
        scaled = Binary("*", Const(complex(s)), Var(0))
        comps = []
        for c in self.components:
            comps.append(Expr(_substitute(c.root, scaled), c.variables))
        return PathSpec(tuple(comps), self.t0 / s)

    def __str__(self) -> str:
        return ", ".join(str(c) for c in self.components)


def _substitute(node, replacement):
    if isinstance(node, Var):
        return replacement
    if isinstance(node, Neg):
        return Neg(_substitute(node.arg, replacement))
    if isinstance(node, Binary):
        return Binary(node.op, _substitute(node.left, replacement), _substitute(node.right, replacement))
    if isinstance(node, Pow):
        return Pow(_substitute(node.base, replacement), node.exponent)
    if isinstance(node, Call):
        return Call(node.func, _substitute(node.arg, replacement))
    return node


@dataclass(frozen=True)
class FormulaLimit:
    value: complex
    g_prime: complex
    f_prime: complex
    ratio: DerivativeRatio


def _check_on_zero_set(f: Expr, g: Expr, path: PathSpec, zero_tol: float) -> None:
    if path.n != f.n or path.n != g.n:
        raise ValueError(f"path dimension {path.n} does not match the pair (n={f.n})")
    rf, rg = abs(evaluate(f, path.base)), abs(evaluate(g, path.base))
    if rf > zero_tol or rg > zero_tol:
        raise NotOnZeroSet(
            f"gamma(t0) = {path.base.tolist()} has |f| = {rf:.3e}, |g| = {rg:.3e}"
        )


def path_limit_formula(f: Expr, g: Expr, path: PathSpec, zero_tol: float = ZERO_TOL,
                       rank_tol: float = RANK_TOL,
                       transversal_tol: float = TRANSVERSAL_TOL) -> FormulaLimit:
    """Limit of f/g along ``path``: (1/g') * (A g'), with g' = Dg gamma'(t0)."""
    _check_on_zero_set(f, g, path, zero_tol)
    jf = jacobian(f, path.base)
    jg = jacobian(g, path.base)
    ratio = derivative_ratio(jf, jg, rank_tol=rank_tol)
    g_prime = jg.apply(path.velocity)
    if abs(g_prime) < transversal_tol:
        raise NotTransversal(f"|Dg . gamma'| = {abs(g_prime):.3e} below {transversal_tol:g}")
    f_prime = ratio.apply(g_prime)
    return FormulaLimit(cdiv(f_prime, g_prime), g_prime, f_prime, ratio)


@dataclass(frozen=True)
class EmpiricalLimit:
    value: complex
    table: list[tuple[float, complex]]
    slope: complex


def path_limit_empirical(f: Expr, g: Expr, path: PathSpec,
                         samples: Sequence[float] = DEFAULT_SAMPLES) -> EmpiricalLimit:
    """Sample f/g along the path and extrapolate to t0.

    ``samples`` are offsets from t0 with strictly decreasing magnitude.  The
    limit is the intercept of an affine least-squares fit through the last
    four samples.
    """
    s = np.asarray(samples, dtype=float)
    if s.size < 2 or np.any(s == 0) or np.any(np.diff(np.abs(s)) >= 0):
        raise ValueError("samples must be nonzero with strictly decreasing magnitude")
    table = []
    for ds in s:
        x = path.point(path.t0 + ds)
        gv = evaluate(g, x)
        if gv == 0:
            raise SampleOnZeroSet(f"g vanishes at sample t0{ds:+g}")
        table.append((float(ds), cdiv(evaluate(f, x), gv)))
    tail = s[-FIT_POINTS:]
    q = np.array([v for _, v in table[-FIT_POINTS:]])
    design = np.column_stack([np.ones_like(tail), tail])
    coef, *_ = np.linalg.lstsq(design.astype(complex), q, rcond=None)
    return EmpiricalLimit(complex(coef[0]), table, complex(coef[1]))
