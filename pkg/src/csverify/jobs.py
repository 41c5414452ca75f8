"""Report builders behind the command-line subcommands."""

from __future__ import annotations

import random
from fractions import Fraction
from math import gcd

from . import catalog, orbifold
from .normal_form import (
    closure_check,
    five_generator_algebra,
    lifted_algebra,
    offending_terms,
    random_homogeneous_triangular,
    steps_strictly_decrease,
    transport_poisson,
    w_homogenize,
    w_weight_obstruction,
    w_weights_from,
)
from .poisson import jacobiators
from .poly import GradingData, is_homogeneous
from .report import Report, check

DEFAULT_SEED = 20240601
# (s, t) gradings used for the round trip; all give integral degrees for every n
WHOMOG_GRADINGS = ((2, 0), (4, 1), (6, 1), (6, 2), (8, 3))


def parse_family(text: str, weights=None) -> catalog.SurfaceFamily:
    """``smooth``, ``A3``, ``D5``, ``E6`` ... (case-insensitive)."""
    t = text.strip()
    up = t.upper()
    if t.lower() == "smooth":
        return catalog.SurfaceFamily("smooth", None, weights)
    if up in ("E6", "E7", "E8"):
        return catalog.SurfaceFamily(up, None, weights)
    if up[:1] in ("A", "D") and up[1:].isdigit():
        return catalog.SurfaceFamily(up[0], int(up[1:]), weights)
    raise ValueError(f"unknown surface family {text!r}")


def xn_job(n: int, s: int = 2, t: int = 0) -> Report:
    return catalog.verify_xn(catalog.make_xn(n, s, t))


def surface_job(family: catalog.SurfaceFamily, timeout=None) -> Report:
    rep = catalog.verify_surface(family, timeout)
    data = orbifold.ramification_data(family)
    got = orbifold.ramification_indices(data)
    want = orbifold.expected_indices(family)
    rep.add(check("ramification indices", got == want, f"got {list(got)}, expected {list(want)}"))
    rep.data["ramification"] = [
        {"point": x.label, "stabilizer": x.stabilizer, "index": x.index, "count": x.count} for x in data
    ]
    return rep


def degree_tuples_job(s: int = 1, a_max: int = 10) -> Report:
    rep = Report(f"degree-tuples s={s} a_max={a_max}")
    tuples = catalog.enumerate_degree_tuples(s, a_max)
    ok_norm = all(list(t.d) == sorted(t.d) and _gcd(t.d) == 1 for t in tuples)
    rep.add(check("normalized and sorted", ok_norm))
    exc = [t for t in tuples if t.exceptional]
    rep.add(check("exceptional tuple flagged", any(t.d == (3, 4, 5, 6, 8) for t in exc) or 3 * s > a_max,
                  "(3,4,5,6,8) missing"))
    rep.data["tuples"] = [
        {"case": t.case, "a": t.a, "d": list(t.d), "s": t.s, "exceptional": t.exceptional} for t in tuples
    ]
    return rep


def _gcd(xs) -> int:
    g = 0
    for x in xs:
        g = gcd(g, x)
    return g


def eliminate_job(order: str = "grevlex", timeout=None) -> Report:
    return catalog.exceptional_case_elimination(order, timeout)


def whomog_trial(n: int, s: int, t: int, rng: random.Random) -> dict:
    """Perturb Theta_n by a random homogeneous triangular change and w-homogenize it back."""
    sl = catalog.make_xn(n, s, t)
    alpha1 = catalog.ALPHA[0]
    sub = random_homogeneous_triangular(5, sl.degrees, rng, fixed=[alpha1])
    theta = transport_poisson(sl.theta, sub)
    grading = GradingData(s, sl.degrees, w_weights_from(theta, alpha1))
    total, out, steps = w_homogenize(theta, grading, alpha1)
    w = list(grading.w)
    return {
        "steps": len(steps),
        "restored": all(not offending_terms(out, w, alpha1, i) for i in range(5)),
        "fully_w_homogeneous": all(
            is_homogeneous(out.entry(i, j), w, w[i] + w[j]) for i in range(5) for j in range(i + 1, 5)
        ),
        "decreasing": steps_strictly_decrease(steps),
        "jacobi": all(not J for J in jacobiators(out).values()),
    }


def whomog_job(seed: int = DEFAULT_SEED, count: int = 50, ns=(2, 3)) -> Report:
    rep = Report(f"whomog seed={seed} count={count}")
    rng = random.Random(seed)
    combos = [(n, s, t) for n in ns for s, t in WHOMOG_GRADINGS]
    results = []
    for k in range(count):
        n, s, t = combos[k % len(combos)]
        r = whomog_trial(n, s, t, rng)
        r.update({"n": n, "s": s, "t": t})
        results.append(r)
    for key, name in (
        ("restored", "w-homogeneity restored"),
        ("decreasing", "steps strictly decrease"),
        ("fully_w_homogeneous", "all entries w-homogeneous"),
        ("jacobi", "jacobi preserved"),
    ):
        bad = [r for r in results if not r[key]]
        wit = f"trial n={bad[0]['n']} s={bad[0]['s']} t={bad[0]['t']}" if bad else None
        rep.add(check(name, not bad, wit))
    rep.data["total_steps"] = sum(r["steps"] for r in results)
    return rep


def closure_job(max_n: int = 4) -> Report:
    rep = Report(f"closure max_n={max_n}")
    rows = []
    for n in range(1, max_n + 1):
        for m in range(1, n + 2):
            res = closure_check(lifted_algebra(n, m))
            expect = m <= n
            rep.add(check(f"n={n} m={m} closed={expect}", res.closed == expect, res.describe()))
            rows.append({"n": n, "m": m, "closed": res.closed, "detail": res.describe()})
    res = closure_check(five_generator_algebra(2))
    rep.add(check("five generators x^2,x^3,y^2,y^3,z not closed", not res.closed, "no witness found"))
    rows.append({"family": "x^2,x^3,y^2,y^3,z (n=2)", "closed": res.closed, "detail": res.describe()})
    for n in range(1, 21):
        v = w_weight_obstruction(n)
        if v != -5 * (n + 1):
            rep.add(check(f"w obstruction n={n}", False, f"got {v}"))
            break
    else:
        rep.add(check("w obstruction -5(n+1) for n<=20", True))
    rep.data["algebras"] = rows
    return rep


def orbifold_job(max_index: int = 30) -> Report:
    rep = Report(f"orbifold max_index={max_index}")
    tuples = orbifold.fano_tuples(max_index)
    odd = [t for t in tuples if t.family == "other"]
    rep.add(check("fano tuples in the four families", not odd, f"unexpected {odd[:1]}"))
    rep.add(check("deg K (2,3,5) = -1/30", orbifold.deg_canonical((2, 3, 5)) == Fraction(-1, 30)))
    for t in tuples:
        if len(t.e) == 3:
            sols = orbifold.taut_bundle_solutions(t)
            found = [s.c for s in sols if s.exists]
            if found != [1] or not all(s.unique for s in sols if s.exists):
                rep.add(check(f"tautological bundle for {t.e}", False, f"roots for c in {found}"))
                break
    else:
        rep.add(check("three-point tuples: tautological bundle is -K", True))
    bad = [(a, b) for a in range(1, 41) for b in range(1, 41) if not orbifold.divisor_condition_equiv(a, b)]
    rep.add(check("divisor conditions agree for a,b <= 40", not bad, f"differ at {bad[:1]}"))
    rep.data["atlas"] = orbifold.build_atlas(max_index)
    return rep
