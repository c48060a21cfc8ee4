import math

import mpmath
import numpy as np
import pytest

from qlt.errors import NotOnZeroSet, OrderTooLarge, ZeroDerivativeOnPath
from qlt.expr import parse
from qlt.fixtures import catalog, fixture
from qlt.limits import PathSpec
from qlt.whitney import Factor1D, complex_quotient_1d, peano_derivatives, remainder_table

FUNCS = {
    "exp(x)": mpmath.exp,
    "sin(x)": mpmath.sin,
    "x^3 - 2*x + 1": lambda x: x ** 3 - 2 * x + 1,
    "cos(x)*exp(i*x)": lambda x: mpmath.cos(x) * mpmath.exp(1j * x),
}


def _factor(src, order=4):
    return Factor1D(parse(src, ["x"]), order)


def test_exp_examples():
    f1d = _factor("exp(x)", 2)
    assert peano_derivatives(f1d, 0, 0.0) == 1
    assert abs(peano_derivatives(f1d, 1, 0.5) - (4 - 2 * math.exp(0.5))) <= 1e-10
    # analytic g'(x) = (x e^x - e^x + 1)/x^2
    x = 0.5
    assert abs(peano_derivatives(f1d, 1, x) - (x * math.exp(x) - math.exp(x) + 1) / x ** 2) <= 1e-12


def test_sin_endpoint_values():
    f1d = _factor("sin(x)", 2)
    assert peano_derivatives(f1d, 0, 0.0) == pytest.approx(1, abs=1e-15)
    assert peano_derivatives(f1d, 1, 0.0) == pytest.approx(0, abs=1e-15)


@pytest.mark.parametrize("src", ["exp(x)", "sin(x)"])
def test_endpoint_identity(src):
    f1d = _factor(src)
    for j in range(4):
        assert abs(peano_derivatives(f1d, j, 0.0) - f1d.f_derivative(j + 1) / (j + 1)) <= 1e-10


def _mp_remainder(fn):
    return lambda x: (fn(x) - fn(mpmath.mpf(0))) / x


@pytest.mark.parametrize("src", list(FUNCS))
def test_integral_formula_matches_high_precision(src):
    f1d = _factor(src)
    mpmath.mp.dps = 40
    g = _mp_remainder(FUNCS[src])
    for x in (0.1, 0.5, 1.0):
        for j in range(4):
            ref = complex(mpmath.diff(g, mpmath.mpf(x), j))
            assert abs(peano_derivatives(f1d, j, x) - ref) <= 1e-10 * max(1, abs(ref)), (x, j)


@pytest.mark.parametrize("src", list(FUNCS))
def test_integral_formula_matches_finite_differences(src):
    f1d = _factor(src)
    h = 1e-4
    for x in (0.1, 0.5, 1.0):
        for j in range(3):
            fd = (peano_derivatives(f1d, j, x + h) - peano_derivatives(f1d, j, x - h)) / (2 * h)
            assert abs(peano_derivatives(f1d, j + 1, x) - fd) <= 1e-6


def test_factorization_identity():
    for src in FUNCS:
        f1d = _factor(src)
        for x in (-0.7, -0.01, 0.2, 0.9):
            lhs = f1d(x)
            rhs = f1d(0.0) + x * peano_derivatives(f1d, 0, x)
            assert abs(lhs - rhs) <= 1e-12 * max(1, abs(lhs))
            assert f1d.remainder(x) == pytest.approx(peano_derivatives(f1d, 0, x), rel=1e-12)


def test_limit_approached_monotonically():
    f1d = _factor("exp(x)")
    for j in range(4):
        at0 = peano_derivatives(f1d, j, 0.0)
        gaps = [abs(peano_derivatives(f1d, j, 10.0 ** -m) - at0) for m in range(1, 7)]
        assert all(b < a for a, b in zip(gaps, gaps[1:])), gaps


def test_order_limits():
    f1d = _factor("exp(x)", 2)
    with pytest.raises(OrderTooLarge):
        peano_derivatives(f1d, 2, 0.1)
    with pytest.raises(OrderTooLarge):
        _factor("exp(x)", 17)
    with pytest.raises(ValueError):
        _factor("exp(x)", 0)


def test_factor_along_path():
    # exp(x + y) along (t, t) is exp(2t)
    f1d = Factor1D(parse("exp(x + y)", ["x", "y"]), 3, PathSpec.parse("t, t"))
    assert peano_derivatives(f1d, 0, 0.0) == pytest.approx(2)
    assert peano_derivatives(f1d, 1, 0.0) == pytest.approx(2)
    assert peano_derivatives(f1d, 0, 0.5) == pytest.approx((math.e - 1) / 0.5, rel=1e-13)


def test_remainder_table_rows():
    rows = remainder_table(_factor("exp(x)", 2), [0.0, 0.5])
    assert [(x, j) for x, j, _ in rows] == [(0.0, 0), (0.0, 1), (0.5, 0), (0.5, 1)]
    assert abs(rows[3][2] - (4 - 2 * math.exp(0.5))) <= 1e-10


def test_quotient_examples():
    e1 = fixture("E1")
    diag = PathSpec.parse("t, t")
    for t in (0.0, 1e-7, 1e-5, 0.3, -0.8):
        assert abs(complex_quotient_1d(e1.f, e1.g, diag, t) - (1.5 - 0.5j)) <= 1e-12
    e3 = fixture("E3")
    axis = PathSpec.parse("t, 0")
    assert complex_quotient_1d(e3.f, e3.g, axis, 0.0) == pytest.approx(1, abs=1e-15)
    assert complex_quotient_1d(e3.f, e3.g, axis, 0.1) == pytest.approx(1.05 - 0.05j, abs=1e-14)
    x = ["x"]
    assert complex_quotient_1d(parse("sin(x)", x), parse("x", x), PathSpec.parse("t"), 0.0) == 1


def test_quotient_near_zero_matches_closed_form():
    x = ["x"]
    f, g, line = parse("sin(x)", x), parse("x", x), PathSpec.parse("t")
    for t in (1e-9, 3e-6, -5e-5):
        assert complex_quotient_1d(f, g, line, t) == pytest.approx(math.sin(t) / t, abs=1e-15)


def test_quotient_nonvanishing_on_fixtures():
    for pair in catalog():
        for lim in pair.limits:
            path = PathSpec.parse(lim.path)
            ts = np.linspace(-0.3, 0.3, 61)
            phi = [complex_quotient_1d(pair.f, pair.g, path, t) for t in ts]
            assert min(abs(p) for p in phi) >= 1e-6
            assert abs(phi[30] - lim.value) <= 1e-10


def test_quotient_errors():
    xy = ["x", "y"]
    with pytest.raises(ZeroDerivativeOnPath):
        complex_quotient_1d(parse("(x + i*y)^2", xy), parse("x + i*y", xy), PathSpec.parse("t, t"), 0.1)
    with pytest.raises(NotOnZeroSet):
        complex_quotient_1d(parse("x + 1", xy), parse("x", xy), PathSpec.parse("t, t"), 0.1)
