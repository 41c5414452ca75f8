"""Concrete objects and their verifiers: ADE surfaces, the slices X_n, degree
tuples, and the 27-parameter exceptional case."""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from itertools import combinations
from math import gcd
from typing import Sequence

from .ideals import TermOrder, buchberger, first_non_member, order_from_name, radical_membership, saturate
from .poisson import (
    PfaffianMismatch,
    PoissonMatrix,
    check_degree_homogeneity,
    check_pfaffian_condition,
    jacobi_checks,
    jacobiators,
    kernel_check,
    surface_bracket_from_f,
)
from .poly import GradingData, Polynomial, PolyRing, gradient, substitute
from .report import Check, Report, check, shorten, skipped


class IllegalWeights(ValueError):
    pass


class NonIntegralDegrees(ValueError):
    pass


def load_fixture(name: str):
    return json.loads(resources.files("csverify").joinpath("fixtures").joinpath(name).read_text())


# -- surfaces ------------------------------------------------------------------------

SURFACE_RING = PolyRing("x y z")
SURFACE_KINDS = ("smooth", "A", "D", "E6", "E7", "E8")
_E_WEIGHTS = {"E6": (1, 3, 4, 6), "E7": (1, 4, 6, 9), "E8": (1, 6, 10, 15)}


@dataclass(frozen=True)
class SurfaceFamily:
    """One row of the surface classification with weights ``(s, d1, d2, d3)``."""

    kind: str
    n: int | None = None
    weights: tuple[int, int, int, int] | None = None

    def __post_init__(self):
        if self.kind not in SURFACE_KINDS:
            raise ValueError(f"unknown surface family {self.kind!r}")
        if self.kind == "A" and (self.n is None or self.n < 1):
            raise ValueError("A_n needs n >= 1")
        if self.kind == "D" and (self.n is None or self.n < 4):
            raise ValueError("D_n needs n >= 4")
        if self.weights is None:
            object.__setattr__(self, "weights", self.default_weights())
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
        if len(self.weights) != 4 or any(w <= 0 for w in self.weights):
            raise IllegalWeights("weights must be four positive integers (s, d1, d2, d3)")

    @property
    def name(self) -> str:
        if self.kind in ("A", "D"):
            return f"{self.kind}{self.n}"
        return self.kind

    def default_weights(self) -> tuple[int, int, int, int]:
        if self.kind == "smooth":
            return (3, 1, 2, 1)
        if self.kind == "A":
            return (1, 1, 1, self.n)
        if self.kind == "D":
            return (1, 2, self.n - 2, self.n - 1)
        return _E_WEIGHTS[self.kind]

    @property
    def s(self) -> int:
        return self.weights[0]

    @property
    def d(self) -> tuple[int, int, int]:
        return tuple(self.weights[1:])

    @property
    def singular(self) -> bool:
        return self.kind != "smooth"

    def polynomial_text(self) -> str:
        if self.kind == "smooth":
            return "z"
        if self.kind == "A":
            return f"x^{self.n + 1} + y*z"
        if self.kind == "D":
            return f"x^{self.n - 1} + x*y^2 + z^2"
        return {"E6": "x^4 + y^3 + z^2", "E7": "x^3*y + y^3 + z^2", "E8": "x^5 + y^3 + z^2"}[self.kind]

    def check_weights(self) -> None:
        s, d1, d2, d3 = self.weights
        if self.kind == "smooth":
            if d1 + d2 != s:
                raise IllegalWeights(f"smooth surface needs d1 + d2 = s, got {self.weights}")
        elif self.kind == "A":
            if d1 != s or (self.n + 1) * d1 != d2 + d3:
                raise IllegalWeights(f"A_{self.n} needs d1 = s and (n+1) d1 = d2 + d3, got {self.weights}")
        else:
            base = (1, 2, self.n - 2, self.n - 1) if self.kind == "D" else _E_WEIGHTS[self.kind]
            # a common multiple of the listed weights is a non-effective action of the same surface
            k = s
            if tuple(k * b for b in base) != self.weights:
                raise IllegalWeights(f"{self.name} needs weights proportional to {base}, got {self.weights}")


def make_surface(family: SurfaceFamily) -> tuple[Polynomial, PoissonMatrix, GradingData]:
    family.check_weights()
    f = SURFACE_RING.parse(family.polynomial_text())
    grading = GradingData(family.s, family.d)
    theta = surface_bracket_from_f(f, SURFACE_RING, grading)
    return f, theta, grading


def verify_surface_data(
    f: Polynomial, grading: GradingData, singular: bool = True, job: str = "surface", timeout: float | None = None
) -> Report:
    """Jacobi, degree, isolated-singularity and Pfaffian checks for ``f`` in ``x, y, z``."""
    theta = surface_bracket_from_f(f, SURFACE_RING, grading)
    rep = Report(job)
    jac = jacobi_checks(theta)
    bad = [c for c in jac if not c.passed]
    rep.add(check("jacobi", not bad, bad[0].witness if bad else None))
    degs = check_degree_homogeneity(theta, grading)
    bad = [c for c in degs if not c.passed]
    rep.add(check("degrees", not bad, f"{bad[0].name}: {bad[0].witness}" if bad else None))
    if singular:
        grad = gradient(f)
        for name in SURFACE_RING.names:
            ok = radical_membership(SURFACE_RING.var(name), grad, timeout=timeout)
            rep.add(check(f"radical {name}", ok, f"{name} is not in the radical of the Jacobian ideal"))
    else:
        for name in SURFACE_RING.names:
            rep.add(skipped(f"radical {name}", "smooth surface"))
    deg = check_degree_homogeneity(theta, grading, f)[-1]
    rep.add(Check("deg f", deg.status, deg.witness))
    try:
        lam = check_pfaffian_condition(theta, f)
        rep.add(check("pfaffian", lam == 1, f"scalar {lam}"))
    except PfaffianMismatch as exc:
        rep.add(check("pfaffian", False, str(exc)))
    return rep


def verify_surface(family: SurfaceFamily, timeout: float | None = None) -> Report:
    f, _, grading = make_surface(family)
    rep = verify_surface_data(f, grading, family.singular, f"surface {family.name} {list(family.weights)}", timeout)
    rep.data["f"] = SURFACE_RING.format(f)
    return rep


def surface_rows() -> list[SurfaceFamily]:
    rows = []
    for row in load_fixture("surfaces.json"):
        rows.append(SurfaceFamily(row["family"], row.get("n"), tuple(row["weights"])))
    return rows


# -- the slices X_n ----------------------------------------------------------------------

XN_RING = PolyRing("x h y e0 e1")
# positions of x_alpha1 .. x_alpha5 in the variable order (x, h, y, e0, e1)
ALPHA = (1, 0, 2, 3, 4)
XN_W = (Fraction(2), Fraction(0), Fraction(-2), Fraction(1), Fraction(-1))


def xn_degrees(n: int, s: int = 2, t: int = 0) -> tuple[int, ...]:
    """Degrees of ``(x, h, y, e0, e1)``."""
    if n < 2:
        raise ValueError("n must be at least 2")
    if not (0 <= 2 * t < s):
        raise ValueError("need 0 <= t < s/2")
    if ((2 * n - 1) * s) % 2:
        raise NonIntegralDegrees(f"(n - 1/2) s is not an integer for n={n}, s={s}; use an even s")
    mid = (2 * n - 1) * s // 2
    return (s - 2 * t, s, s + 2 * t, mid - t, mid + t)


def xn_polynomial(n: int) -> Polynomial:
    delta = XN_RING.parse("h^2 + 4*x*y")
    return XN_RING.parse("-y*e0^2 + h*e0*e1 + x*e1^2") + delta ** n


def xn_matrix(n: int, grading: GradingData | None = None) -> PoissonMatrix:
    top = (XN_RING.parse("h^2 + 4*x*y") ** (n - 1)).scale(2 * n)
    entries = {
        (0, 1): "-2*x",
        (0, 2): "h",
        (0, 4): "e0",
        (1, 2): "-2*y",
        (1, 3): "e0",
        (1, 4): "-e1",
        (2, 3): "e1",
        (3, 4): top,
    }
    return PoissonMatrix(XN_RING, entries, grading=grading)


@dataclass(frozen=True)
class SliceXn:
    n: int
    s: int
    t: int
    f: Polynomial
    theta: PoissonMatrix
    grading: GradingData

    @property
    def ring(self) -> PolyRing:
        return XN_RING

    @property
    def degrees(self) -> tuple[int, ...]:
        return self.grading.d

    @property
    def sorted_degrees(self) -> tuple[int, ...]:
        return tuple(sorted(self.grading.d))

    def with_theta(self, theta: PoissonMatrix) -> "SliceXn":
        return replace(self, theta=theta)


def make_xn(n: int, s: int = 2, t: int = 0) -> SliceXn:
    d = xn_degrees(n, s, t)
    grading = GradingData(s, d, XN_W)
    return SliceXn(n, s, t, xn_polynomial(n), xn_matrix(n, grading), grading)


RECON_RING = PolyRing("u1 u2 u3 u4 u5 c1 c2 kappa")


def reconstructed_matrix(n: int) -> PoissonMatrix:
    """The normal form with symbolic ``c1, c2, kappa`` in ``x_alpha1 .. x_alpha5 = u1 .. u5``.

    Entries are read from the upper triangle.
    """
    r = RECON_RING
    delta = r.parse("1/2*u1^2 + u2*u3")
    top = (delta ** (n - 1)) * r.parse(f"{n}*kappa")
    entries = {
        (0, 1): "u2",
        (0, 2): "-u3",
        (0, 3): "1/2*u4",
        (0, 4): "-1/2*u5",
        (1, 2): "u1",
        (1, 4): "c1*u4",
        (2, 3): "c2*u5",
        (3, 4): top,
    }
    return PoissonMatrix(r, entries, n=5)


def verify_reconstructed(n: int) -> list[Check]:
    theta = reconstructed_matrix(n)
    relation = buchberger([RECON_RING.parse("c1*c2 - 1/2")])
    out = []
    J = jacobiators(theta)
    bad = [(ijk, p) for ijk, p in J.items() if not relation.contains(p)]
    wit = None
    if bad:
        (i, j, k), p = bad[0]
        wit = f"J[{i + 1},{j + 1},{k + 1}] = {shorten(RECON_RING.format(p))}"
    out.append(check("reconstructed jacobi mod c1*c2 - 1/2", not bad, wit))
    # the relation is really needed: J[2,3,4] does not vanish without it
    j234 = J[(1, 2, 3)]
    out.append(check("reconstructed J[2,3,4] forces c1*c2 = 1/2", bool(j234), "J[2,3,4] vanishes identically"))
    return out


def verify_xn(sl: SliceXn) -> Report:
    rep = Report(f"xn n={sl.n} s={sl.s} t={sl.t}")
    theta, f = sl.theta, sl.f
    rep.extend(jacobi_checks(theta))
    try:
        lam = check_pfaffian_condition(theta, f)
        rep.add(check("pfaffian", lam != 0))
        rep.data["lambda"] = str(lam)
    except PfaffianMismatch as exc:
        rep.add(check("pfaffian", False, str(exc)))
    degs = check_degree_homogeneity(theta, sl.grading, f)
    bad = [c for c in degs if not c.passed]
    rep.add(check("degrees", not bad, f"{bad[0].name}: {bad[0].witness}" if bad else None))
    rep.add(check("kernel", kernel_check(theta, gradient(f, 5)), "Theta . grad f != 0"))
    rep.extend(verify_reconstructed(sl.n))
    rep.data["degrees"] = list(sl.degrees)
    return rep


# -- degree tuples ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DegreeTuple:
    """Normalized degrees ``d`` (gcd 1, sorted) with weight ``s`` and the case they come from."""

    s: int
    d: tuple[int, ...]
    case: int
    a: int
    exceptional: bool
    raw: tuple[int, ...]


def _case_tuple(case: int, s: int, a: int) -> tuple[int, ...]:
    if case == 1:
        return (a, 2 * a - 2 * s, 2 * a - s, 3 * a - 3 * s, 4 * a - 4 * s)
    if case == 2:
        return (2 * s, a, 3 * s, a + s, a + 2 * s)
    return (2 * s, 3 * s, a, a + s, a + 2 * s)


def _case_range(case: int, s: int, a_max: int) -> range:
    if case == 1:
        return range(2 * s, a_max + 1)
    if case == 2:
        return range(2 * s, min(3 * s, a_max) + 1)
    return range(3 * s, a_max + 1)


def enumerate_degree_tuples(s: int, a_max: int) -> list[DegreeTuple]:
    """All tuples of the three cases with ``a <= a_max``, normalized by their gcd."""
    if s <= 0:
        raise ValueError("s must be positive")
    out = []
    for case in (1, 2, 3):
        for a in _case_range(case, s, a_max):
            raw = _case_tuple(case, s, a)
            g = 0
            for x in raw:
                g = gcd(g, x)
            d = tuple(sorted(x // g for x in raw))
            out.append(DegreeTuple(s // g, d, case, a, case == 1 and a == 3 * s, raw))
    return out


# -- the exceptional case ----------------------------------------------------------------------


def exceptional_ansatz() -> PoissonMatrix:
    return PoissonMatrix.from_json_dict(load_fixture("exceptional_ansatz.json"))


def parameter_ring(theta: PoissonMatrix) -> PolyRing:
    return PolyRing(theta.ring.names[theta.n:])


def jacobi_coefficient_ideal(theta: PoissonMatrix) -> list[Polynomial]:
    """Coefficients (in the parameters) of every monomial of every Jacobiator, made monic."""
    n, k = theta.n, theta.nvars - theta.n
    seen: dict[Polynomial, None] = {}
    for J in jacobiators(theta).values():
        groups: dict[tuple, dict] = {}
        for m, c in J.items():
            groups.setdefault(m[:n], {})[m[n:]] = c
        for terms in groups.values():
            p = Polynomial(k, terms)
            lead = max(p.monomials())
            seen.setdefault(p / p.coefficient(lead), None)
    return list(seen)


def specialize(theta: PoissonMatrix, values: dict[str, Fraction]) -> PoissonMatrix:
    """Substitute numbers for the parameter variables."""
    ring = PolyRing(theta.ring.names[: theta.n])
    images = [ring.var(v) for v in ring.names]
    for name in theta.ring.names[theta.n:]:
        images.append(ring.const(values[name]))
    return PoissonMatrix(ring, {ij: substitute(p, images) for ij, p in theta.upper_items()}, n=theta.n)


def solve_point(gens: Sequence[Polynomial], ring: PolyRing, timeout=None) -> dict[str, Fraction] | None:
    """The unique rational point of a zero-dimensional linear-looking ideal, if there is one."""
    gb = buchberger(list(gens), TermOrder.lex(ring.nvars), timeout)
    if gb.is_unit():
        return None
    values: dict[str, Fraction] = {}
    for g in gb.generators:
        if g.total_degree() != 1 or len(g.variables()) != 1:
            return None
        (i,) = g.variables()
        m = tuple(1 if k == i else 0 for k in range(ring.nvars))
        values[ring.names[i]] = -g.coefficient((0,) * ring.nvars) / g.coefficient(m)
    if len(values) != ring.nvars:
        return None
    return values


def _nonzero_coefficients(theta: PoissonMatrix) -> int:
    return sum(len(J) for J in jacobiators(theta).values())


def exceptional_case_elimination(order: str | TermOrder = "grevlex", timeout: float | None = None) -> Report:
    data = load_fixture("exceptional_ansatz.json")
    theta = PoissonMatrix.from_json_dict(data)
    params = parameter_ring(theta)
    if isinstance(order, str):
        order = order_from_name(order, params.nvars)
    rep = Report("eliminate-exceptional")
    degs = check_degree_homogeneity(theta)
    bad = [c for c in degs if not c.passed]
    rep.add(check("ansatz degrees", not bad, f"{bad[0].name}: {bad[0].witness}" if bad else None))
    rep.add(check("ansatz condition (*)_5", check_condition_star(theta, 4)))

    gens = jacobi_coefficient_ideal(theta)
    q = params.parse(data["saturate_by"])
    sat = saturate(gens, q, order, timeout)
    line = [params.parse(t) for t in data["line"]]
    line_gb = buchberger(line, order, timeout)

    missing = first_non_member(sat, line)
    rep.add(
        check(
            "line ideal in saturation",
            missing is None,
            None if missing is None else f"{params.format(missing)} is not in the saturation",
        )
    )
    extra = first_non_member(line_gb, sat.generators)
    rep.add(
        check(
            "saturation in line ideal",
            extra is None,
            None if extra is None else f"{params.format(extra)} is not in the line ideal",
        )
    )
    target = params.parse(data["target"])
    eliminated = sat.contains(target)
    rep.add(check(f"{data['target']} in saturation", eliminated, f"{data['target']} is not in the saturation"))

    # points at a4 = 1 on the computed component and on the displayed line
    a4 = params.parse("a4 - 1")
    point = solve_point(list(sat.generators) + [a4], params, timeout)
    if point is None:
        rep.add(check("computed component point satisfies Jacobi", False, "no unique rational point at a4 = 1"))
    else:
        left = _nonzero_coefficients(specialize(theta, point))
        rep.add(check("computed component point satisfies Jacobi", left == 0, f"{left} nonzero Jacobiator terms"))
    line_point = solve_point(line + [a4], params, timeout)
    left = _nonzero_coefficients(specialize(theta, line_point))
    rep.add(check("line point satisfies Jacobi", left == 0, f"{left} nonzero Jacobiator terms at a4 = 1"))

    sat_a4 = saturate(gens, params.var("a4"), order, timeout)
    missing4 = first_non_member(sat_a4, line)
    rep.add(
        check(
            "line ideal in saturation by a4",
            missing4 is None,
            None if missing4 is None else f"{params.format(missing4)} is not in the saturation by a4",
        )
    )

    rep.data.update(
        {
            "verdict": "eliminated" if eliminated else "not eliminated",
            "order": order.name,
            "coefficient_generators": len(gens),
            "saturation": [params.format(g) for g in sat.generators],
            "saturation_by_a4": [params.format(g) for g in sat_a4.generators],
            "component_point_a4_1": None if point is None else {k: str(v) for k, v in point.items() if v},
        }
    )
    return rep


# -- conditions (*) ---------------------------------------------------------------------------------


def _contains_pure_power(theta: PoissonMatrix, entry: Polynomial, var: int, power: int) -> bool:
    n = theta.n
    want = tuple(power if k == var else 0 for k in range(n))
    return any(m[:n] == want for m in entry.monomials())


def check_condition_star(theta: PoissonMatrix, var_index: int, powers: Sequence[int] | None = None) -> bool:
    """True iff two entries on disjoint index pairs contain ``x_v`` and ``x_v^l`` (``l`` in ``powers``).

    ``var_index`` is 0-based.  Parameters are allowed: an entry contains a
    monomial when its coefficient (a polynomial in the parameters) is nonzero.
    Defaults: ``powers = (1,)`` for the last variable, ``(1, 2)`` otherwise.
    """
    n = theta.n
    if not 0 <= var_index < n:
        raise IndexError("variable index out of range")
    if powers is None:
        powers = (1,) if var_index == n - 1 else (1, 2)
    pairs = list(combinations(range(n), 2))
    linear = [p for p in pairs if _contains_pure_power(theta, theta.entry(*p), var_index, 1)]
    for p in linear:
        for q in pairs:
            if set(p) & set(q):
                continue
            if any(_contains_pure_power(theta, theta.entry(*q), var_index, l) for l in powers):
                return True
    return False


@lru_cache(maxsize=None)
def golden_xn(n: int) -> tuple[PoissonMatrix, Polynomial]:
    data = load_fixture(f"theta_n{n}.json")
    theta = PoissonMatrix.from_json_dict(data)
    return theta, theta.ring.parse(data["f"])
