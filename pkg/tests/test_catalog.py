from itertools import combinations_with_replacement
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from csverify.catalog import (
    IllegalWeights,
    NonIntegralDegrees,
    SURFACE_RING,
    SurfaceFamily,
    check_condition_star,
    enumerate_degree_tuples,
    exceptional_ansatz,
    exceptional_case_elimination,
    jacobi_coefficient_ideal,
    load_fixture,
    make_surface,
    make_xn,
    parameter_ring,
    reconstructed_matrix,
    specialize,
    surface_rows,
    verify_reconstructed,
    verify_surface,
    verify_surface_data,
    verify_xn,
    xn_degrees,
)
from csverify.ideals import TermOrder, buchberger, saturate
from csverify.normal_form import weighted_monomials
from csverify.poisson import PoissonMatrix, jacobiators
from csverify.poly import GradingData, PolyRing, homogeneous_degree

# -- surfaces --------------------------------------------------------------------------------------


def test_make_surface_examples():
    f, theta, g = make_surface(SurfaceFamily("A", 2, (1, 1, 1, 2)))
    assert f == SURFACE_RING.parse("x^3 + y*z")
    f, _, g = make_surface(SurfaceFamily("E6"))
    assert f == SURFACE_RING.parse("x^4 + y^3 + z^2") and (g.s, g.d) == (1, (3, 4, 6))
    f, _, g = make_surface(SurfaceFamily("D", 4, (1, 2, 2, 3)))
    assert f == SURFACE_RING.parse("x^3 + x*y^2 + z^2")


@pytest.mark.parametrize(
    "family",
    [
        SurfaceFamily("A", 2, (1, 1, 2, 2)),
        SurfaceFamily("A", 2, (2, 1, 1, 2)),
        SurfaceFamily("D", 5, (1, 2, 3, 5)),
        SurfaceFamily("E8", None, (1, 6, 10, 14)),
        SurfaceFamily("smooth", None, (3, 1, 1, 1)),
    ],
)
def test_illegal_weights_are_rejected(family):
    with pytest.raises(IllegalWeights):
        make_surface(family)


def test_every_catalog_row_verifies():
    rows = surface_rows()
    assert {r.name for r in rows} >= {"smooth", "A1", "D4", "E6", "E7", "E8"}
    for fam in rows:
        assert verify_surface(fam).passed, fam


def test_smooth_surface_skips_the_radical_check():
    rep = verify_surface(SurfaceFamily("smooth", None, (5, 2, 3, 1)))
    assert rep.passed
    assert {rep.get(f"radical {v}").status for v in "xyz"} == {"skip"}


def test_tampered_e6_polynomial_fails_radical_check_for_z():
    f = SURFACE_RING.parse("x^4 + y^3")
    rep = verify_surface_data(f, GradingData(1, (3, 4, 6)), singular=True)
    assert rep.get("radical z").status == "fail"
    assert rep.get("radical x").status == "pass"


def test_non_effective_weights_are_accepted():
    assert verify_surface(SurfaceFamily("E7", None, (2, 8, 12, 18))).passed


# -- X_n ------------------------------------------------------------------------------------------


def test_xn_degrees():
    assert make_xn(2).degrees == (2, 2, 2, 3, 3)
    assert make_xn(3).degrees == (2, 2, 2, 5, 5)
    assert make_xn(2, 4, 1).sorted_degrees == (2, 4, 5, 6, 7)
    with pytest.raises(NonIntegralDegrees):
        xn_degrees(2, 3, 0)
    with pytest.raises(ValueError):
        xn_degrees(2, 4, 2)
    with pytest.raises(ValueError):
        xn_degrees(1)


@pytest.mark.parametrize("n", range(2, 7))
def test_verify_xn_passes(n):
    rep = verify_xn(make_xn(n))
    assert rep.passed, rep.failures()
    assert rep.data["lambda"] == "-1"


def test_verify_xn_detects_wrong_top_entry():
    sl = make_xn(3)
    delta = sl.ring.parse("h^2 + 4*x*y")
    bad = sl.with_theta(sl.theta.with_entry(3, 4, (delta ** 2).scale(7)))
    rep = verify_xn(bad)
    assert rep.get("pfaffian").status == "fail"


def test_reconstructed_matrix_needs_the_relation():
    for n in (2, 3, 4):
        assert all(c.passed for c in verify_reconstructed(n))
    theta = reconstructed_matrix(2)
    gb = buchberger([theta.ring.parse("c1*c2 - 1/2")])
    j234 = jacobiators(theta)[(1, 2, 3)]
    assert j234 and gb.contains(j234)


# -- degree tuples ----------------------------------------------------------------------------------


def _pattern_oracle(s, a_max):
    """Match every sorted 5-tuple with entries below 4*a_max against the three patterns."""
    found = set()
    top = 4 * a_max
    for d in combinations_with_replacement(range(1, top + 1), 5):
        d1, d2, d3, d4, d5 = d
        if d1 >= 2 * s and d1 <= a_max and (d2, d3, d4, d5) == (2 * d1 - 2 * s, 2 * d1 - s, 3 * d1 - 3 * s, 4 * d1 - 4 * s):
            found.add((1, d1, d))
        if d1 == 2 * s and d3 == 3 * s and 2 * s <= d2 <= min(3 * s, a_max) and (d4, d5) == (d2 + s, d2 + 2 * s):
            found.add((2, d2, d))
        if (d1, d2) == (2 * s, 3 * s) and 3 * s <= d3 <= a_max and (d4, d5) == (d3 + s, d3 + 2 * s):
            found.add((3, d3, d))
    return found


@pytest.mark.parametrize("s,a_max", [(1, 6), (2, 7)])
def test_degree_tuples_match_pattern_oracle(s, a_max):
    got = {(t.case, t.a, t.raw) for t in enumerate_degree_tuples(s, a_max)}
    assert got == _pattern_oracle(s, a_max)


def test_degree_tuple_examples():
    tuples = enumerate_degree_tuples(1, 8)
    case1 = {t.d: t for t in tuples if t.case == 1}
    assert (2, 2, 3, 3, 4) in case1
    assert case1[(3, 4, 5, 6, 8)].exceptional and case1[(3, 4, 5, 6, 8)].a == 3
    assert sorted(t.a for t in tuples if t.case == 2) == [2, 3]
    t = [x for x in enumerate_degree_tuples(2, 4) if x.case == 1 and x.a == 4][0]
    assert t.raw == (4, 4, 6, 6, 8) and t.d == (2, 2, 3, 3, 4) and t.s == 1
    assert [x for x in tuples if x.exceptional] == [case1[(3, 4, 5, 6, 8)]]


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=1, max_value=5), st.integers(min_value=1, max_value=25))
def test_degree_tuples_are_normalized(s, a_max):
    for t in enumerate_degree_tuples(s, a_max):
        assert list(t.d) == sorted(t.d)
        g = 0
        for x in t.d:
            g = gcd(g, x)
        assert g == 1
        assert all(x * (t.raw[0] // t.d[0]) == r for x, r in zip(t.d, t.raw))


# -- the exceptional case ----------------------------------------------------------------------------


def test_ansatz_fixture_matches_its_generating_constraints():
    data = load_fixture("exceptional_ansatz.json")
    theta = exceptional_ansatz()
    d, s = data["d"], data["s"]
    assert d == [3, 4, 5, 6, 8] and s == 1
    fixed = {tuple(int(k) - 1 for k in key.split(",")) for key in data["fixed"]}
    assert fixed == {(0, 1), (0, 3)}
    assert theta.entry(0, 1) == theta.ring.var("x4") and theta.entry(0, 3) == theta.ring.var("x5")
    weights = d + [0] * 27
    seen_params = set()
    for i in range(5):
        for j in range(i + 1, 5):
            e = theta.entry(i, j)
            assert homogeneous_degree(e, weights) == d[i] + d[j] - s
            if (i, j) in fixed:
                continue
            xs = {m[:5] for m in e.monomials()}
            assert xs == set(weighted_monomials(d, d[i] + d[j] - s, range(5)))
            for m in e.monomials():
                params = [k for k, x in enumerate(m[5:]) if x]
                assert len(params) <= 1
                seen_params.update(params)
    assert seen_params == set(range(27))


def test_ansatz_satisfies_condition_star():
    assert check_condition_star(exceptional_ansatz(), 4)


def test_condition_star_on_theta_n_and_zero():
    theta = make_xn(2).theta
    # Theta[2,5] = -e1 and Theta[3,4] = e1 sit on disjoint index pairs
    assert check_condition_star(theta, 4)
    assert not check_condition_star(PoissonMatrix(theta.ring, {}), 4)
    assert not check_condition_star(PoissonMatrix(theta.ring, {}), 3)


def test_coefficient_ideal_size_and_saturation():
    theta = exceptional_ansatz()
    params = parameter_ring(theta)
    gens = jacobi_coefficient_ideal(theta)
    assert len(gens) == 66
    sat = saturate(gens, params.parse("a4*a15"), TermOrder.grevlex(27))
    # relations obtained independently with a general-purpose computer algebra system
    zeros = [1, 2, 3, 6, 12, 13, 14, 16, 17, 18, 19, 20, 21, 22, 24, 26, 27]
    expected = [params.var(f"a{k}") for k in zeros] + [
        params.parse(t)
        for t in [
            "a23 - 2*a4", "a5 - 4*a4", "a7 + 2*a4", "a8 - 4*a4", "a10 + 2*a4",
            "a11 - 4*a4", "a15 + a4", "a25 + 10*a4^2", "a9 + 40*a4^2",
        ]
    ]
    ref = buchberger(expected, TermOrder.grevlex(27))
    assert sat.generators == ref.generators


def test_elimination_report():
    rep = exceptional_case_elimination()
    assert rep.data["verdict"] == "eliminated"
    assert rep.get("a18 in saturation").passed
    assert rep.get("computed component point satisfies Jacobi").passed
    assert rep.get("ansatz degrees").passed
    # the displayed relations a25 = -5 a4 and a9 = -20 a4 are not those of the Jacobi system
    assert not rep.get("line ideal in saturation").passed
    assert not rep.get("line point satisfies Jacobi").passed
    assert rep.data["component_point_a4_1"]["a25"] == "-10"


def test_elimination_is_deterministic():
    a = exceptional_case_elimination().to_dict()
    b = exceptional_case_elimination().to_dict()
    assert a == b


def test_specialize_drops_parameters():
    theta = exceptional_ansatz()
    values = {v: 0 for v in theta.ring.names[5:]}
    t = specialize(theta, values)
    assert t.nvars == 5 and t.entry(0, 1) == t.ring.var("x4")
