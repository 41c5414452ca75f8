import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from csverify.catalog import ALPHA, make_xn, xn_matrix
from csverify.normal_form import (
    UV,
    MonomialSubalgebra,
    NotTriangular,
    TriangularSubstitution,
    WeightShapeError,
    bracket_uv,
    closure_check,
    five_generator_algebra,
    invert_triangular,
    lifted_algebra,
    offending_terms,
    random_homogeneous_triangular,
    steps_strictly_decrease,
    transport_poisson,
    w_homogenize,
    w_weight_obstruction,
    w_weights_from,
    weighted_monomials,
)
from csverify.poisson import PoissonMatrix, bracket, jacobiators, surface_bracket_from_f
from csverify.poly import GradingData, Polynomial, PolyRing, homogeneous_degree, is_homogeneous, substitute

XYZ = PolyRing("x y z")


def sub(mapping, ring=XYZ, order=None):
    return TriangularSubstitution.from_map(ring, mapping, order)


def test_inverse_examples():
    s = sub({"z": "z + y^2"})
    assert invert_triangular(s) == sub({"z": "z - y^2"})
    s = sub({"y": "y + x^2", "z": "z + y"})
    assert invert_triangular(s) == sub({"y": "y - x^2", "z": "z - y + x^2"})
    ident = TriangularSubstitution.identity(3)
    assert invert_triangular(ident).is_identity()


def test_non_triangular_maps_are_rejected():
    with pytest.raises(NotTriangular):
        sub({"x": "x + y"})
    with pytest.raises(NotTriangular):
        sub({"y": "x"})
    # a different declared order makes the same map legal
    assert sub({"x": "x + y"}, order=["y", "x", "z"]).invert().apply(XYZ.parse("x + y")) == XYZ["x"]


def test_transport_identity_and_naturality():
    f = XYZ.parse("x^2 + y*z")
    theta = surface_bracket_from_f(f)
    assert transport_poisson(theta, TriangularSubstitution.identity(3)) == theta
    s = sub({"z": "z + y"})
    moved = transport_poisson(theta, s)
    # f in the new coordinates is f composed with the inverse change
    f_new = s.invert().apply(f)
    assert moved == surface_bracket_from_f(f_new)


def test_transport_recovers_the_normalized_surface_bracket():
    # with {x, y} = y, {x, z} = -z + a x^k y^l becomes -z' after z' = z - a/(l+1) x^k y^l
    r = XYZ
    theta = PoissonMatrix(r, {(0, 1): "y", (0, 2): "-z + 3*x^2*y + 5*x*y^3"})
    s = sub({"z": "z - 3/2*x^2*y - 5/4*x*y^3"})
    moved = transport_poisson(theta, s)
    assert moved.entry(0, 2) == -r["z"]


def test_w_homogenize_fixes_already_homogeneous_theta():
    sl = make_xn(3)
    total, out, steps = w_homogenize(sl.theta, sl.grading, ALPHA[0])
    assert total.is_identity() and out == sl.theta and steps == []


def test_w_homogenize_single_step_example():
    theta = PoissonMatrix(XYZ, {(0, 1): "y + x^2"})
    grading = GradingData(1, (1, 2, 1), (0, 1, 0))
    total, out, steps = w_homogenize(theta, grading, 0)
    assert total.images[1] == XYZ.parse("y + x^2")
    assert out.entry(0, 1) == XYZ["y"]
    assert len(steps) == 1 and steps[0].coefficient == 1


def test_w_homogenize_rejects_wrong_linear_coefficient():
    theta = PoissonMatrix(XYZ, {(0, 1): "2*y + x^2"})
    with pytest.raises(WeightShapeError):
        w_homogenize(theta, GradingData(1, (1, 2, 1), (0, 1, 0)), 0)


def test_w_weights_of_theta_n():
    assert w_weights_from(xn_matrix(2), ALPHA[0]) == (2, 0, -2, 1, -1)


@pytest.mark.parametrize("n,s,t", [(2, 2, 0), (2, 4, 1), (3, 6, 2), (3, 8, 3)])
def test_w_homogenize_round_trip(n, s, t):
    rng = random.Random(1000 * n + 10 * s + t)
    sl = make_xn(n, s, t)
    for _ in range(3):
        pert = random_homogeneous_triangular(5, sl.degrees, rng, fixed=[ALPHA[0]])
        theta = transport_poisson(sl.theta, pert)
        g = GradingData(s, sl.degrees, w_weights_from(theta, ALPHA[0]))
        total, out, steps = w_homogenize(theta, g, ALPHA[0])
        w = list(g.w)
        assert all(not offending_terms(out, w, ALPHA[0], i) for i in range(5))
        assert steps_strictly_decrease(steps)
        for i in range(5):
            for j in range(i + 1, 5):
                assert is_homogeneous(out.entry(i, j), w, w[i] + w[j])
        assert transport_poisson(theta, total) == out


def test_weighted_monomials():
    ms = weighted_monomials((1, 2, 3), 4, range(3))
    assert set(ms) == {(4, 0, 0), (2, 1, 0), (0, 2, 0), (1, 0, 1)}
    assert weighted_monomials((1, 2), 3, [1]) == []


def test_bracket_uv_examples():
    assert bracket_uv((1, 1), (2, 0)) == UV.parse("-2*u^2")
    assert not bracket_uv((3, 4), (3, 4))
    for n in range(1, 5):
        assert bracket_uv((n + 1, 0), (0, n + 1)) == UV.parse(f"{(n + 1) ** 2}*u^{n}*v^{n}")


def test_closure_examples():
    for n in range(1, 5):
        for m in range(1, n + 1):
            assert closure_check(lifted_algebra(n, m)).closed
        res = closure_check(lifted_algebra(n, n + 1))
        assert not res.closed
    res = closure_check(five_generator_algebra(2))
    assert not res.closed
    x3, y2 = (9, 0), (0, 6)
    assert any({a, b} == {x3, y2} for a, b, _ in res.witnesses)
    assert closure_check(MonomialSubalgebra(((1, 0), (0, 1)))).closed


def test_w_weight_obstruction():
    assert w_weight_obstruction(1) == -10
    assert w_weight_obstruction(2) == -15
    assert all(w_weight_obstruction(n) == -5 * (n + 1) for n in range(1, 21))


# -- properties ------------------------------------------------------------------------------


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_inverse_composes_to_identity(seed):
    rng = random.Random(seed)
    s = random_homogeneous_triangular(5, (1, 1, 2, 3, 4), rng)
    inv = s.invert()
    gens = [Polynomial.variable(5, i) for i in range(5)]
    assert [substitute(inv.images[i], s.images) for i in range(5)] == gens
    assert [substitute(s.images[i], inv.images) for i in range(5)] == gens


@settings(max_examples=15, deadline=None)
@given(st.integers(min_value=0, max_value=10_000), st.booleans())
def test_transport_preserves_jacobi_both_ways(seed, broken):
    sl = make_xn(2)
    theta = sl.theta
    if broken:
        theta = theta.with_entry(0, 3, "x*h")
    rng = random.Random(seed)
    s = random_homogeneous_triangular(5, sl.degrees, rng)
    moved = transport_poisson(theta, s)
    before = all(not J for J in jacobiators(theta).values())
    after = all(not J for J in jacobiators(moved).values())
    assert before == after == (not broken)
    assert transport_poisson(moved, s.invert()) == theta


@settings(max_examples=50, deadline=None)
@given(st.tuples(st.integers(0, 6), st.integers(0, 6)), st.tuples(st.integers(0, 6), st.integers(0, 6)))
def test_bracket_uv_matches_generic_bracket(m1, m2):
    theta = PoissonMatrix(UV, {(0, 1): "1"})
    assert bracket_uv(m1, m2) == bracket(theta, Polynomial(2, {m1: 1}), Polynomial(2, {m2: 1}))


@settings(deadline=None, max_examples=20)
@given(st.integers(min_value=1, max_value=30))
def test_full_polynomial_ring_is_always_closed(bound):
    assert closure_check(MonomialSubalgebra(((1, 0), (0, 1))), bound).closed
