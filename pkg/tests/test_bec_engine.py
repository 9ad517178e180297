from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from polar_po.bec_engine import (
    default_grid,
    degenerate_positions,
    initial_vector,
    path_bhattacharyya,
    path_function,
    path_log,
    path_polynomial,
    path_table,
    path_value_exact,
    polarize_log,
    polarize_vector,
    traditional_f,
    traditional_f_inverse,
    traditional_f_log,
)
from polar_po.path_algebra import all_paths, path_position
from polar_po.polynomial import BernsteinPoly
from polar_po.ratematch import RateMatchSpec

P = BernsteinPoly.from_power
E = BernsteinPoly.identity()

specs = st.sampled_from(["none", "punc:1/2", "punc:1/4", "punc:3/4", "short:1/2", "short:1/4",
                         "short:3/4", "punc:3/8", "short:5/8"])


def spec_and_path(max_len=6):
    return specs.flatmap(lambda s: st.integers(max(RateMatchSpec.parse(s).m, 1), max_len).flatmap(
        lambda n: st.tuples(st.just(s), st.text("01", min_size=n, max_size=n))))


# --------------------------------------------------------------- fixtures with exact expressions
def test_four_point_fixture():
    h = polarize_vector([BernsteinPoly.constant(1), E, E, E])
    want = [P([1]), P([0, 2, -1]), P([0, 1, 1, -1]), P([0, 0, 0, 1])]
    assert h == want


def test_eight_point_expansion():
    h4 = polarize_vector([BernsteinPoly.constant(1), E, E, E])
    h8 = polarize_vector(initial_vector("punc:1/4", 8))
    want = []
    for z in h4:
        want += [z * 2 - z.square(), z.square()]
    assert h8 == want


def test_example_tables():
    x2 = {"00": P([1]), "01": P([0, 0, 2, 0, -1]), "10": P([0, 0, 1, 0, 1, 0, -1]), "11": P([0] * 6 + [1])}
    g = P([0, 1, 1, -1])
    one = BernsteinPoly.constant(1)
    long_ = {"00": one - (one - g).square(), "01": g.square(), "10": P([0, 0, 0, 2, 0, 0, -1]), "11": P([0] * 6 + [1])}
    sq = E.square()
    for beta in all_paths(2):
        assert path_bhattacharyya("punc:1/4", beta, sq) == x2[beta]
        assert path_polynomial("punc:1/4", "1" + beta) == long_[beta]


# --------------------------------------------------------------- structural properties
@given(st.integers(1, 6).flatmap(lambda n: st.lists(st.floats(0, 1), min_size=2**n, max_size=2**n)))
def test_conservation(z):
    h = polarize_vector(z)
    assert abs(h.sum() - sum(z)) <= 1e-9 * len(z)


@given(st.integers(1, 5).flatmap(lambda n: st.tuples(
    st.lists(st.floats(0, 1), min_size=2**n, max_size=2**n),
    st.lists(st.floats(0, 1), min_size=2**n, max_size=2**n))))
def test_polarization_is_monotone(pair):
    lo = np.minimum(*map(np.array, pair))
    hi = np.maximum(*map(np.array, pair))
    assert np.all(polarize_vector(lo) <= polarize_vector(hi) + 1e-15)


@given(spec_and_path(7))
def test_path_function_monotone_in_x(sp):
    spec, alpha = sp
    x = np.linspace(0, 1, 101)
    z = path_bhattacharyya(spec, alpha, x)
    assert np.all(np.diff(z) >= -1e-15)
    assert np.all((z >= 0) & (z <= 1))


@given(spec_and_path(7))
def test_shortcut_equals_full_evolution(sp):
    spec, alpha = sp
    assert path_polynomial(spec, alpha, shortcut=True) == path_polynomial(spec, alpha, shortcut=False)
    g = default_grid(65, tail_points=20)
    a = path_log(spec, alpha, g.lx, g.lw, shortcut=True)
    b = path_log(spec, alpha, g.lx, g.lw, shortcut=False)
    # an absolute log difference is a relative difference of z (or of 1 - z)
    for u, v in zip(a, b):
        fin = np.isfinite(u)
        assert np.array_equal(fin, np.isfinite(v))
        assert np.allclose(u[fin], v[fin], rtol=1e-12, atol=1e-12)


@given(spec_and_path(8), st.fractions(0, 1, max_denominator=50))
def test_backend_agreement(sp, x):
    spec, alpha = sp
    exact = path_value_exact(spec, alpha, x)
    assert path_polynomial(spec, alpha).evaluate_exact(x) == exact
    f = float(path_bhattacharyya(spec, alpha, float(x)))
    assert abs(f - float(exact)) <= 1e-12 * max(float(exact), 1e-300) + 1e-300


def test_grid_backend_keeps_relative_accuracy_in_tails():
    g = default_grid()
    fn = path_function("punc:1/4", "1011011011", backend="grid", grid=g)
    tiny = g.x < 1e-20
    assert tiny.any()
    sel = np.nonzero(tiny)[0][:5]
    for i in sel:
        exact = path_value_exact("punc:1/4", "1011011011", Fraction(g.x[i]))
        got = np.exp(fn.lz[i])
        assert abs(got - float(exact)) <= 1e-10 * float(exact)


def test_path_table_matches_individual_paths():
    g = default_grid(33, tail_points=10)
    lz, _ = path_table("short:3/4", 5, g)
    for alpha in all_paths(5):
        one, _ = path_log("short:3/4", alpha, g.lx, g.lw)
        row = lz[path_position(alpha) - 1]
        fin = np.isfinite(one)
        assert np.allclose(row[fin], one[fin], rtol=1e-12)
        assert np.all(~np.isfinite(row[~fin]))


def test_polarize_log_matches_linear():
    rng = np.random.default_rng(1)
    z = rng.uniform(0.01, 0.99, (16, 7))
    lz, _ = polarize_log(np.log(z), np.log1p(-z))
    assert np.allclose(np.exp(lz), polarize_vector(z), rtol=1e-12)


@given(st.text("01", min_size=1, max_size=6), st.floats(0, 1))
def test_traditional_inverse(alpha, y):
    x = traditional_f_inverse(alpha, y)
    assert abs(traditional_f(alpha, x) - y) <= 1e-9


def test_traditional_log_agrees():
    x = np.linspace(0.05, 0.95, 19)
    lz, lw = traditional_f_log("0110", np.log(x), np.log1p(-x))
    assert np.allclose(np.exp(lz), traditional_f("0110", x), rtol=1e-12)
    assert np.allclose(np.exp(lw), 1 - traditional_f("0110", x), rtol=1e-10)


# --------------------------------------------------------------- degenerate positions
def test_degenerate_positions_small():
    assert degenerate_positions("punc:1/4", 4) == {1}
    assert degenerate_positions("punc:1/4", 8) == {1, 2}
    assert degenerate_positions("short:1/4", 4) == {4}
    assert degenerate_positions("none", 16) == set()


@pytest.mark.parametrize("spec", ["punc:1/4", "punc:3/8", "short:1/2", "short:5/8"])
def test_degenerate_positions_match_polynomials(spec):
    const = 1 if spec.startswith("punc") else 0
    n = 5
    found = {path_position(a) for a in all_paths(n) if path_polynomial(spec, a) == BernsteinPoly.constant(const)}
    assert found == degenerate_positions(spec, 2**n)
    assert len(found) == RateMatchSpec.parse(spec).count(2**n)


def test_input_validation():
    with pytest.raises(ValueError):
        path_polynomial("punc:1/4", "0")
    with pytest.raises(ValueError):
        initial_vector("punc:1/4", 4, 1.5)
    with pytest.raises(ValueError):
        path_function("none", "0" * 13)
    with pytest.raises(ValueError):
        path_function("none", "01", backend="magic")
