"""One test per acceptance criterion; all comparisons are exact."""

import random
import time
from fractions import Fraction

from csverify.catalog import (
    SurfaceFamily,
    enumerate_degree_tuples,
    exceptional_ansatz,
    jacobi_coefficient_ideal,
    load_fixture,
    make_xn,
    parameter_ring,
    surface_rows,
    verify_surface,
)
from csverify.ideals import TermOrder, buchberger, first_non_member, saturate
from csverify.jobs import whomog_trial
from csverify.normal_form import (
    UV,
    bracket_uv,
    closure_check,
    five_generator_algebra,
    lifted_algebra,
    w_weight_obstruction,
)
from csverify.orbifold import (
    OrbifoldTuple,
    deg_canonical,
    divisor_condition_equiv,
    expected_indices,
    fano_tuples,
    ramification_data,
    ramification_indices,
    taut_bundle_solutions,
)
from csverify.poisson import (
    PoissonMatrix,
    bracket,
    check_degree_homogeneity,
    check_pfaffian_condition,
    jacobiators,
    pfaffian_vector,
    surface_bracket_from_f,
)
from csverify.poly import Polynomial, PolyRing, gradient


def test_criterion_01_xn_jacobi_and_pfaffian():
    start = time.perf_counter()
    for n in range(2, 11):
        sl = make_xn(n)
        J = jacobiators(sl.theta)
        assert len(J) == 10 and all(not p for p in J.values()), n
        lam = check_pfaffian_condition(sl.theta, sl.f)
        assert isinstance(lam, Fraction) and lam != 0
    assert time.perf_counter() - start < 10


def test_criterion_02_degree_homogeneity():
    start = time.perf_counter()
    for n in range(2, 11):
        for s, t in ((2, 0), (4, 1)):
            sl = make_xn(n, s, t)
            if (s, t) == (2, 0):
                assert sl.degrees == (2, 2, 2, 2 * n - 1, 2 * n - 1)
            checks = check_degree_homogeneity(sl.theta, sl.grading, sl.f)
            assert all(c.passed for c in checks), (n, s, t, [c for c in checks if not c.passed])
            assert checks[-1].name == "deg f"
    assert time.perf_counter() - start < 1


def test_criterion_03_surface_suite():
    start = time.perf_counter()
    rows = surface_rows()
    kinds = {r.kind for r in rows}
    assert kinds == {"smooth", "A", "D", "E6", "E7", "E8"}
    for fam in rows:
        rep = verify_surface(fam)
        assert rep.passed, (fam, rep.failures())
        if fam.kind != "smooth":
            assert all(rep.get(f"radical {v}").status == "pass" for v in "xyz")
    assert time.perf_counter() - start < 30


def test_criterion_04_exceptional_case_elimination():
    start = time.perf_counter()
    data = load_fixture("exceptional_ansatz.json")
    theta = exceptional_ansatz()
    params = parameter_ring(theta)
    order = TermOrder.grevlex(params.nvars)
    gens = jacobi_coefficient_ideal(theta)
    sat = saturate(gens, params.parse("a4*a15"), order, timeout=1800)
    line = [params.parse(t) for t in data["line"]]
    assert len(line) == 26
    line_gb = buchberger(line, order)
    assert sat.contains(params.parse("a18"))
    assert first_non_member(line_gb, sat.generators) is None
    assert first_non_member(sat, line) is None
    assert time.perf_counter() - start < 1800


def test_criterion_05_degree_tuples():
    start = time.perf_counter()
    s, a_max = 1, 10
    got = {(t.case, t.a, t.raw) for t in enumerate_degree_tuples(s, a_max)}
    want = set()
    for a in range(2 * s, a_max + 1):
        want.add((1, a, (a, 2 * a - 2 * s, 2 * a - s, 3 * a - 3 * s, 4 * a - 4 * s)))
    for a in range(2 * s, 3 * s + 1):
        want.add((2, a, (2 * s, a, 3 * s, a + s, a + 2 * s)))
    for a in range(3 * s, a_max + 1):
        want.add((3, a, (2 * s, 3 * s, a, a + s, a + 2 * s)))
    assert got == want
    flagged = [t.d for t in enumerate_degree_tuples(s, a_max) if t.exceptional]
    assert flagged == [(3, 4, 5, 6, 8)]
    assert time.perf_counter() - start < 1


def test_criterion_06_w_homogenization_round_trip():
    start = time.perf_counter()
    rng = random.Random(20240601)
    combos = [(n, s, t) for n in (2, 3) for s, t in ((2, 0), (4, 1), (6, 1), (6, 2), (8, 3))]
    for k in range(50):
        n, s, t = combos[k % len(combos)]
        r = whomog_trial(n, s, t, rng)
        assert r["restored"] and r["decreasing"], (k, n, s, t)
    assert time.perf_counter() - start < 60


def test_criterion_07_monomial_closure():
    start = time.perf_counter()
    for n in range(1, 5):
        for m in range(1, n + 1):
            alg = lifted_algebra(n, m)
            res = closure_check(alg)
            assert res.closed, (n, m, res.describe())
            assert res.bound == 4 * max(alg.degree(g) for g in alg.generators)
    res = closure_check(five_generator_algebra(2))
    assert not res.closed and res.witnesses
    assert time.perf_counter() - start < 30


def test_criterion_08_w_obstruction():
    start = time.perf_counter()
    for n in range(1, 21):
        v = w_weight_obstruction(n)
        assert v == -5 * (n + 1) and v != 0
    assert time.perf_counter() - start < 1


def test_criterion_09_orbifold_atlas():
    start = time.perf_counter()
    got = {t.e for t in fano_tuples(30)}
    want = {()} | {(a,) for a in range(2, 31)}
    want |= {(a, b) for a in range(2, 31) for b in range(a, 31)}
    want |= {(2, 2, n) for n in range(2, 31)} | {(2, 3, 3), (2, 3, 4), (2, 3, 5)}
    assert got == want
    assert deg_canonical((2, 3, 5)) == Fraction(-1, 30)
    for e in [(2, 3, 5), (2, 3, 4), (2, 3, 3)] + [(2, 2, n) for n in range(2, 31, 2)]:
        sols = taut_bundle_solutions(OrbifoldTuple(e))
        assert [(s.c, s.exists, s.unique) for s in sols] == [(1, True, True)], e
    for n in range(3, 31, 2):
        sols = {s.c: s for s in taut_bundle_solutions(OrbifoldTuple((2, 2, n)))}
        assert sols[2].exists is False
    assert all(divisor_condition_equiv(a, b) for a in range(1, 41) for b in range(1, 41))
    table = {"E6": (2, 3, 3), "E7": (2, 3, 4), "E8": (2, 3, 5)}
    for fam in surface_rows():
        got_idx = ramification_indices(ramification_data(fam))
        assert got_idx == expected_indices(fam), fam
        if fam.kind in table:
            assert got_idx == table[fam.kind]
        if fam.kind == "D":
            assert got_idx == tuple(sorted((fam.n - 2, 2, 2)))
    assert ramification_data(SurfaceFamily("A", 1, (1, 1, 1, 1))) == []
    assert ramification_indices(ramification_data(SurfaceFamily("smooth", None, (5, 2, 3, 1)))) == (2, 3)
    assert time.perf_counter() - start < 10


def test_criterion_10_cross_oracles():
    start = time.perf_counter()
    theta = PoissonMatrix(UV, {(0, 1): "1"})
    monos = [(a, b) for a in range(13) for b in range(13) if a + b <= 12]
    for m1 in monos:
        p1 = Polynomial(2, {m1: 1})
        for m2 in monos:
            assert bracket_uv(m1, m2) == bracket(theta, p1, Polynomial(2, {m2: 1}))
    rng = random.Random(10)
    xyz = PolyRing("x y z")
    for _ in range(100):
        terms = {}
        for _ in range(rng.randint(1, 6)):
            m = tuple(rng.randint(0, 4) for _ in range(3))
            terms[m] = Fraction(rng.randint(-9, 9), rng.randint(1, 5))
        f = Polynomial(3, terms)
        fx, fy, fz = gradient(f)
        t = surface_bracket_from_f(f, xyz)
        assert (t.entry(0, 1), t.entry(0, 2), t.entry(1, 2)) == (fz, -fy, fx)
        assert pfaffian_vector(t) == [fx, fy, fz]
    assert time.perf_counter() - start < 30
