"""Catalog of reference function pairs and the bump-sum counterexample field."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .expr import Expr, parse


@dataclass(frozen=True)
class ExpectedZero:
    point: tuple[float, ...]
    lam: complex | None  # None: derivative ratio is not a scaled rotation
    source: str


@dataclass(frozen=True)
class ExpectedLimit:
    path: str  # components in t, comma separated
    value: complex
    source: str


@dataclass(frozen=True)
class FixturePair:
    name: str
    f: Expr
    g: Expr
    zeros: tuple[ExpectedZero, ...]
    limits: tuple[ExpectedLimit, ...] = ()
    window_radius: float | None = None  # valid only for |x| below this radius
    notes: str = ""
    f_source: str = field(default="", compare=False)
    g_source: str = field(default="", compare=False)

    @property
    def n(self) -> int:
        return self.f.n

    @property
    def variables(self) -> tuple[str, ...]:
        return self.f.variables

    def expected_at(self, point: Sequence[float]) -> complex | None:
        for z in self.zeros:
            if np.allclose(z.point, point, rtol=0, atol=1e-12):
                return z.lam
        raise KeyError(f"{self.name} has no catalogued zero at {tuple(point)}")


def _pair(name, f, g, variables, zeros, limits=(), window=None, notes=""):
    return FixturePair(
        name, parse(f, variables), parse(g, variables), tuple(zeros), tuple(limits),
        window, notes, f, g,
    )


def _line_limit(c: float, value: complex, source: str) -> ExpectedLimit:
    return ExpectedLimit(f"t, {c!r}*t", value, source)


def e1_limit(c: float) -> complex:
    return (1 + c + 1j * c) / (1 + 1j * c)


def e2_limit(c: float) -> complex:
    return (1 - 1j * c) / (1 + 1j * c)


@lru_cache(maxsize=None)
def catalog() -> tuple[FixturePair, ...]:
    xy = ("x", "y")
    origin = (0.0, 0.0)
    pairs = [
        _pair(
            "E1", "x + y + i*y", "x + i*y", xy,
            [ExpectedZero(origin, None, "A = [[1,1],[0,1]], |A01 + A10| = 1")],
            [_line_limit(c, e1_limit(c), "closed form (1+c+ic)/(1+ic) on the line (t, ct)")
             for c in (0.0, 0.5, -0.5, 1.0, 2.0, -1.0, -2.0)],
            notes="constant along every line through the origin; no value at the origin",
        ),
        _pair(
            "E2", "x - i*y", "x + i*y", xy,
            [ExpectedZero(origin, None, "A = diag(1, -1), det < 0")],
            [_line_limit(c, e2_limit(c), "closed form (1-ic)/(1+ic) on the line (t, ct)")
             for c in (0.0, 1.0, 0.5, -2.0)],
            notes="equal singular values but orientation reversing",
        ),
        _pair(
            "E3", "x + x^2 + i*x + i*y", "x + i*x + i*y", xy,
            [ExpectedZero(origin, 1 + 0j, "Df = Dg at the origin, A = I")],
            [_line_limit(c, 1 + 0j, "A = I gives the same limit on every transversal line")
             for c in (0.0, 1.0, -3.0)],
            notes="continuous quotient 1 + x^2/g, not differentiable at the origin",
        ),
        _pair(
            "OP1", "(x + i*y)*exp(i*(x^2 + y^2))", "x + i*y", xy,
            [ExpectedZero(origin, 1 + 0j, "quotient exp(i(x^2+y^2)) equals 1 at the origin")],
            [_line_limit(c, 1 + 0j, "smooth quotient with value 1 at the origin") for c in (0.0, 1.0)],
            notes="smooth quotient exp(i(x^2 + y^2))",
        ),
        _pair(
            "OP2", "(x + i*y)*(1 + x - i*y)", "x + i*y", xy,
            [ExpectedZero(origin, 1 + 0j, "quotient 1 + x - iy equals 1 at the origin")],
            [_line_limit(c, 1 + 0j, "smooth quotient with value 1 at the origin") for c in (0.0, 1.0)],
            window=0.5,
            notes="smooth quotient 1 + x - iy; restricted to |(x,y)| < 0.5 where it does not vanish",
        ),
        _pair(
            "SELF", "x + i*y", "x + i*y", xy,
            [ExpectedZero(origin, 1 + 0j, "f/f = 1")],
            [_line_limit(c, 1 + 0j, "f/f = 1") for c in (0.0, 1.0)],
            notes="f/f = 1 everywhere off the zero set",
        ),
        _pair(
            "D3", "(x + i*y)*(1 + z^2)", "x + i*y", ("x", "y", "z"),
            [ExpectedZero((0.0, 0.0, z), complex(1 + z * z), "quotient 1 + z^2 on the z-axis")
             for z in (0.0, 0.5, 1.0, -0.7)],
            [ExpectedLimit("t, 2*t, 1", 2 + 0j, "quotient 1 + z^2 at z = 1"),
             ExpectedLimit("t, 0, 0.5 + t", 1.25 + 0j, "quotient 1 + z^2 at z = 0.5")],
            notes="zero set is the z-axis; quotient 1 + z^2",
        ),
    ]
    return tuple(pairs)


def fixture(name: str) -> FixturePair:
    for p in catalog():
        if p.name.lower() == name.lower():
            return p
    raise KeyError(f"unknown fixture {name!r}; known: {', '.join(p.name for p in catalog())}")


# --------------------------------------------------------------------------
# bump-sum field: balls of radius 2^-n centred on the curve z = 2 sqrt(x)

def bump_center(n: int) -> np.ndarray:
    return np.array([2.0 ** -n, 0.0, 2.0 ** (1 - n / 2)])


def bump_radius(n: int) -> float:
    return 2.0 ** -n


def bump_profile(r: float) -> float:
    """exp(1 - 1/(1 - r^2)) on [0, 1), zero outside; equals 1 at r = 0."""
    if r >= 1:
        return 0.0
    return math.exp(1 - 1 / (1 - r * r))


def bump_sum(point: Sequence[float], truncation: int) -> float:
    """Sum of the bumps n = 0..truncation at ``point`` (indices start at 0)."""
    if truncation < 1:
        raise ValueError("truncation must be at least 1")
    p = np.asarray(point, dtype=float)
    if p.shape != (3,):
        raise ValueError("bump_sum takes a point in R^3")
    total = 0.0
    for n in range(truncation + 1):
        r = float(np.linalg.norm(p - bump_center(n))) / bump_radius(n)
        total += bump_profile(r)
    return total
