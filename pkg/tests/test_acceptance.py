"""Exit criteria of the toolkit.

Each test carries an ``acceptance`` marker; the terminal summary prints one
PASS/FAIL line per criterion.
"""

import cmath
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from qlt.autodiff import jacobian
from qlt.cli import GridJob, compute_grid
from qlt.expr import evaluate, parse
from qlt.extension import averaged_jacobian, quotient_eval
from qlt.fixtures import bump_sum, catalog, e1_limit, e2_limit, fixture
from qlt.limits import PathSpec, path_limit_empirical, path_limit_formula
from qlt.ratio import ComplexLinear, NotComplexLinear, classify_scaled_rotation, derivative_ratio, scaled_rotation
from qlt.whitney import Factor1D, peano_derivatives
from qlt.zerofind import nearest_zero


def _line(c):
    return PathSpec.parse(f"t, {c!r}*t")


@pytest.mark.acceptance(1, "path-limit fidelity")
def test_path_limit_fidelity():
    cases = [("E1", c, e1_limit(c)) for c in (0.0, 0.5, -0.5, 1.0, 2.0)]
    cases += [("E2", c, e2_limit(c)) for c in (0.0, 1.0)]
    for name, c, expected in cases:
        pair = fixture(name)
        formula = path_limit_formula(pair.f, pair.g, _line(c)).value
        emp = path_limit_empirical(pair.f, pair.g, _line(c)).value
        assert abs(formula - expected) <= 1e-10, (name, c)
        assert abs(emp - expected) <= 1e-6, (name, c)


def _ratio_at(pair, point):
    z = nearest_zero(pair.f, pair.g, point)
    return derivative_ratio(z.jac_f, z.jac_g)


@pytest.mark.acceptance(2, "classification")
def test_classification():
    r = _ratio_at(fixture("E1"), [0.0, 0.0])
    assert isinstance(r.classification, NotComplexLinear) and r.classification.defect >= 0.3
    r = _ratio_at(fixture("E2"), [0.0, 0.0])
    assert isinstance(r.classification, NotComplexLinear) and r.det == -1
    for name in ("E3", "OP1", "OP2", "SELF"):
        r = _ratio_at(fixture(name), [0.0, 0.0])
        assert isinstance(r.classification, ComplexLinear), name
        assert abs(r.classification.lam - 1) <= 1e-8, name
    for z in (0.0, 0.5, 1.0):
        r = _ratio_at(fixture("D3"), [0.0, 0.0, z])
        assert isinstance(r.classification, ComplexLinear)
        assert abs(r.classification.lam - (1 + z * z)) <= 1e-8


@pytest.mark.acceptance(3, "path independence under complex linearity")
def test_path_independence():
    e3 = fixture("E3")
    rng = np.random.default_rng(2024)
    values = []
    for _ in range(8):
        d = rng.normal(size=2)
        values.append(path_limit_formula(e3.f, e3.g, PathSpec.line([0.0, 0.0], d)).value)
    spread = max(abs(a - b) for a in values for b in values)
    assert spread <= 1e-10


@pytest.mark.acceptance(4, "stable extension")
def test_stable_extension():
    op1 = fixture("OP1")
    rng = np.random.default_rng(4)
    methods = set()
    for _ in range(100):
        r = 10.0 ** rng.uniform(-8, -1)
        theta = rng.uniform(0, 2 * math.pi)
        x = np.array([r * math.cos(theta), r * math.sin(theta)])
        q = quotient_eval(op1.f, op1.g, x)
        methods.add(q.method)
        assert abs(q.value - cmath.exp(1j * float(x @ x))) <= 1e-8
    assert methods == {"direct", "averaged"}
    # |g| = r for this pair, so the switch sits at r = near_tol
    for theta in np.linspace(0, 2 * math.pi, 12, endpoint=False):
        u = np.array([math.cos(theta), math.sin(theta)])
        below = quotient_eval(op1.f, op1.g, u * (1e-4 * (1 - 1e-9)))
        above = quotient_eval(op1.f, op1.g, u * (1e-4 * (1 + 1e-9)))
        assert below.method == "averaged" and above.method == "direct"
        assert abs(below.value - above.value) <= 1e-9


@pytest.mark.acceptance(5, "FTC reconstruction")
def test_ftc_reconstruction():
    rng = np.random.default_rng(5)
    for pair in catalog():
        radius = 0.5 if pair.window_radius is None else 0.9 * pair.window_radius
        for _ in range(50):
            x = rng.uniform(-radius, radius, size=pair.n) / math.sqrt(pair.n)
            a = nearest_zero(pair.f, pair.g, x).location
            for e in (pair.f, pair.g):
                aj = averaged_jacobian(e, a, x, quad_order=32)
                fx = evaluate(e, x)
                assert abs(aj.apply(x - a) - fx) <= 1e-9 * (1 + abs(fx)), pair.name


@pytest.mark.acceptance(6, "integral formula for the remainder")
def test_whitney_integral():
    exp1d = Factor1D(parse("exp(x)", ["x"]), 4)
    sin1d = Factor1D(parse("sin(x)", ["x"]), 4)
    assert abs(peano_derivatives(exp1d, 1, 0.5) - (4 - 2 * math.exp(0.5))) <= 1e-10
    sin_derivs = [1.0, 0.0, -1.0, 0.0]  # sin^(j+1)(0)
    for j in range(4):
        assert abs(peano_derivatives(exp1d, j, 0.0) - 1 / (j + 1)) <= 1e-10
        assert abs(peano_derivatives(sin1d, j, 0.0) - sin_derivs[j] / (j + 1)) <= 1e-10


@pytest.mark.acceptance(7, "radial constancy on the E1 grid")
def test_radial_constancy():
    e1 = fixture("E1")
    records = compute_grid(GridJob(e1.f, e1.g, resolution=(101, 101)))
    assert len(records) == 101 * 101
    grid = {(round(x, 12), round(y, 12)): re_ for x, y, re_, _, _ in records}
    for c in (0.0, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0):
        for sign in (1, -1):
            vals = []
            for k in range(1, 51):
                key = (round(sign * k / 50, 12), round(c * sign * k / 50, 12))
                if key in grid:
                    vals.append(grid[key])
            assert len(vals) >= 20
            assert max(vals) - min(vals) <= 1e-10, (c, sign)


@pytest.mark.acceptance(8, "coordinate invariance of A")
def test_coordinate_invariance():
    rng = np.random.default_rng(8)
    zeros = [(p, z.point) for p in catalog() for z in p.zeros]
    done = 0
    while done < 20:
        pair, point = zeros[done % len(zeros)]
        m = rng.normal(size=(pair.n, pair.n))
        if np.linalg.cond(m) > 1e3:
            continue
        jf, jg = jacobian(pair.f, point).entries, jacobian(pair.g, point).entries
        base = derivative_ratio(jf, jg).A
        moved = derivative_ratio(jf @ m, jg @ m).A
        assert np.max(np.abs(moved - base)) <= 1e-9
        done += 1


@pytest.mark.acceptance(9, "scaled rotations closed under product and inverse")
def test_equivalence_algebra():
    rng = np.random.default_rng(9)
    for _ in range(100):
        l1 = complex(*rng.uniform(-3, 3, size=2))
        l2 = complex(*rng.uniform(-3, 3, size=2))
        a1, a2 = scaled_rotation(l1), scaled_rotation(l2)
        prod = classify_scaled_rotation(a1 @ a2)
        inv = classify_scaled_rotation(np.linalg.inv(a1))
        assert isinstance(prod, ComplexLinear) and isinstance(inv, ComplexLinear)
        assert abs(prod.lam - l1 * l2) <= 1e-12 * max(1, abs(l1 * l2))
        assert abs(inv.lam - 1 / l1) <= 1e-12 * max(1, abs(1 / l1))


@pytest.mark.acceptance(10, "bump-sum dichotomy")
def test_bump_dichotomy():
    for k in range(1, 21):
        assert abs(bump_sum([2.0 ** -k, 0.0, 0.0], 20)) <= 1e-12
    failures = []
    for n in range(1, 11):
        t = 2.0 ** -n
        v = bump_sum([t, 0.0, 2 * math.sqrt(t)], 20)
        if abs(v - 1) > 1e-12:
            failures.append((n, v))
    assert not failures, f"curve values off 1 at (n, value): {failures}"


@pytest.mark.acceptance(11, "grid determinism across worker counts")
def test_grid_determinism():
    outputs = []
    for threads in ("1", "4"):
        env = dict(os.environ, QLT_THREADS=threads)
        proc = subprocess.run(
            [sys.executable, "-m", "qlt", "grid", "--fixture", "OP1", "--window=-0.0002,0.0002,-0.0002,0.0002",
             "--res", "101,101"],
            capture_output=True, env=env, check=True,
        )
        outputs.append(proc.stdout)
    assert outputs[0] == outputs[1]
    assert outputs[0].count(b"\n") == 101 * 101 + 1
    assert b"averaged" in outputs[0] and b"on_gamma" in outputs[0]
