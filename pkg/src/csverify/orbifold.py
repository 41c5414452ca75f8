"""Ramification points of projectivized surfaces and line-bundle arithmetic on
orbifold projective lines."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, combinations_with_replacement
from math import gcd, lcm
from typing import Sequence

from .catalog import SURFACE_RING, SurfaceFamily, make_surface
from .poly import Polynomial


def stabilizer_order(support: Sequence[int], degrees: Sequence[int]) -> int:
    """gcd of the degrees of the coordinates in ``support`` (0-based indices)."""
    support = list(support)
    if not support:
        raise ValueError("support must be nonempty")
    g = 0
    for i in support:
        g = gcd(g, int(degrees[i]))
    return g


# -- univariate helpers over Q -------------------------------------------------------------


def _trim(p: list[Fraction]) -> list[Fraction]:
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_mod(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    a = list(a)
    while len(a) >= len(b) and a:
        q = a[-1] / b[-1]
        shift = len(a) - len(b)
        for k, c in enumerate(b):
            a[shift + k] -= q * c
        _trim(a)
    return a


def _poly_gcd(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _poly_mod(a, b)
    return a


def distinct_nonzero_roots(coeffs: Sequence[Fraction]) -> int:
    """Number of distinct nonzero complex roots of ``sum coeffs[k] X^k``."""
    p = _trim([Fraction(c) for c in coeffs])
    while p and p[0] == 0:
        p.pop(0)
    if len(p) <= 1:
        return 0
    dp = [k * c for k, c in enumerate(p)][1:]
    g = _poly_gcd(p, dp)
    return (len(p) - 1) - (len(g) - 1)


# -- ramification ---------------------------------------------------------------------------------


@dataclass(frozen=True)
class RamificationDatum:
    """Ramification points sharing one support pattern, e.g. ``[*:0:*]``."""

    label: str
    support: tuple[int, ...]
    stabilizer: int
    index: int
    count: int = 1


def _label(support: Sequence[int], nvars: int) -> str:
    return "[" + ":".join("*" if i in support else "0" for i in range(nvars)) + "]"


def _restrict(f: Polynomial, support: Sequence[int]) -> Polynomial:
    keep = set(support)
    return Polynomial(f.nvars, {m: c for m, c in f.items() if all(e == 0 or i in keep for i, e in enumerate(m))})


def ramification_points(f: Polynomial, degrees: Sequence[int]) -> list[RamificationDatum]:
    """Ramification points of ``Proj C[x,y,z]/(f)`` for a weighted homogeneous ``f``."""
    nv = f.nvars
    # coordinates vanishing on the whole surface are not generators of the coordinate ring
    dead = {i for i in range(nv) if len(f) == 1 and f.total_degree() == 1 and f.variables() == {i}}
    live = [i for i in range(nv) if i not in dead]
    d = stabilizer_order(live, degrees)
    out = []
    for size in (1, 2):
        for support in combinations(live, size):
            g = _restrict(f, support)
            if size == 1:
                if g:
                    continue
                count = 1
            else:
                if not g:
                    continue  # the whole stratum lies on the surface: generic points
                i, j = support
                coeffs: dict[int, Fraction] = {}
                for m, c in g.items():
                    coeffs[m[i]] = coeffs.get(m[i], Fraction(0)) + c
                roots = distinct_nonzero_roots([coeffs.get(k, 0) for k in range(max(coeffs) + 1)])
                if roots == 0:
                    continue
                orbit = degrees[j] // gcd(degrees[i], degrees[j])
                count = roots // orbit
            stab = stabilizer_order(support, degrees)
            r = stab // d
            if r > 1:
                out.append(RamificationDatum(_label(support, nv), tuple(support), stab, r, count))
    out.sort(key=lambda x: (x.index, x.support))
    return out


def ramification_data(family: SurfaceFamily) -> list[RamificationDatum]:
    f, _, grading = make_surface(family)
    return ramification_points(f, grading.d)


def ramification_indices(data: Sequence[RamificationDatum]) -> tuple[int, ...]:
    out = []
    for x in data:
        out.extend([x.index] * x.count)
    return tuple(sorted(out))


# -- orbifold projective lines -------------------------------------------------------------------


@dataclass(frozen=True)
class OrbifoldTuple:
    """Ramification indices of an orbifold P^1, sorted ascending."""

    e: tuple[int, ...]

    def __post_init__(self):
        e = tuple(sorted(int(x) for x in self.e))
        if len(e) > 3 or any(x < 2 for x in e):
            raise ValueError("at most three ramification indices, each at least 2")
        object.__setattr__(self, "e", e)

    @property
    def lcm(self) -> int:
        return lcm(*self.e) if self.e else 1

    @property
    def family(self) -> str:
        e = self.e
        if len(e) == 0:
            return "smooth"
        if len(e) == 1:
            return "(a)"
        if len(e) == 2:
            return "(a,b)"
        if e[:2] == (2, 2):
            return "(2,2,n)"
        if e in ((2, 3, 3), (2, 3, 4), (2, 3, 5)):
            return str(e).replace(" ", "")
        return "other"

    def is_fano(self) -> bool:
        return deg_canonical(self) < 0


def deg_canonical(t: OrbifoldTuple | Sequence[int]) -> Fraction:
    e = t.e if isinstance(t, OrbifoldTuple) else tuple(t)
    return -2 + sum((1 - Fraction(1, x) for x in e), Fraction(0))


def fano_tuples(e_max: int) -> list[OrbifoldTuple]:
    """All sorted tuples of length at most 3 with entries in ``[2, e_max]`` and ``deg K < 0``."""
    if e_max < 2:
        raise ValueError("e_max must be at least 2")
    out = []
    for r in range(4):
        for e in combinations_with_replacement(range(2, e_max + 1), r):
            if deg_canonical(e) < 0:
                out.append(OrbifoldTuple(e))
    return out


def tau_power(tau: int, m: int) -> int:
    if tau <= 0 or m <= 0:
        raise ValueError("tau and m must be positive")
    return tau // gcd(m, tau)


@dataclass(frozen=True)
class OrbiLineBundle:
    """``n P + sum k_i Q_i`` with ``0 <= k_i < e_i``: degree ``n + sum k_i/e_i``."""

    orbifold: OrbifoldTuple
    n: int
    k: tuple[int, ...]

    def __post_init__(self):
        e = self.orbifold.e
        k = tuple(int(x) for x in self.k)
        if len(k) != len(e):
            raise ValueError("one local index per ramification point")
        carry = sum(x // ei for x, ei in zip(k, e))
        object.__setattr__(self, "k", tuple(x % ei for x, ei in zip(k, e)))
        object.__setattr__(self, "n", int(self.n) + carry)

    @property
    def degree(self) -> Fraction:
        return self.n + sum((Fraction(x, ei) for x, ei in zip(self.k, self.orbifold.e)), Fraction(0))

    @property
    def tau(self) -> tuple[int, ...]:
        return tuple(ei // gcd(x, ei) for x, ei in zip(self.k, self.orbifold.e))

    def power(self, m: int) -> "OrbiLineBundle":
        return OrbiLineBundle(self.orbifold, m * self.n, tuple(m * x for x in self.k))

    def __mul__(self, other: "OrbiLineBundle") -> "OrbiLineBundle":
        if other.orbifold != self.orbifold:
            raise ValueError("bundles on different orbifolds")
        return OrbiLineBundle(self.orbifold, self.n + other.n, tuple(a + b for a, b in zip(self.k, other.k)))

    def is_usual(self) -> bool:
        return all(t == 1 for t in self.tau)


def anticanonical(t: OrbifoldTuple) -> OrbiLineBundle:
    return OrbiLineBundle(t, 2 - len(t.e), (1,) * len(t.e))


def _divisors(n: int) -> list[int]:
    return [c for c in range(1, n + 1) if n % c == 0]


@dataclass(frozen=True)
class RootSolution:
    """Whether ``L^c = -K`` has a solution ``L``, whether it is unique, and the root."""

    c: int
    exists: bool
    unique: bool
    root: OrbiLineBundle | None = None


def taut_bundle_solutions(t: OrbifoldTuple) -> list[RootSolution]:
    """For every candidate ``c`` (a divisor of ``lcm(e) deg(-K)``) solve ``L^c = -K``.

    The local index of a root is forced by ``c k_i = 1 mod e_i``, which needs
    ``gcd(c, e_i) = 1``; the integral part is then forced by the degree.  So a
    root is unique whenever it exists.
    """
    K = anticanonical(t)
    N = t.lcm * K.degree
    assert N.denominator == 1 and N > 0
    out = []
    for c in _divisors(int(N)):
        if any(gcd(c, ei) != 1 for ei in t.e):
            out.append(RootSolution(c, False, False))
            continue
        k = tuple(pow(c, -1, ei) for ei in t.e)
        n = K.degree / c - sum((Fraction(x, ei) for x, ei in zip(k, t.e)), Fraction(0))
        if n.denominator != 1:
            out.append(RootSolution(c, False, False))
            continue
        L = OrbiLineBundle(t, int(n), k)
        assert L.power(c) == K
        out.append(RootSolution(c, True, True, L))
    return out


def divisor_condition_sets(a: int, b: int) -> tuple[set[int], set[int]]:
    if a < 1 or b < 1:
        raise ValueError("a and b must be positive")
    m = gcd(a, b)
    s1 = {c for c in _divisors(a // m + b // m) if gcd(c, a) == 1 and gcd(c, b) == 1}
    s2 = {c for c in _divisors(a + b) if gcd(gcd(c, a), b) == 1}
    return s1, s2


def divisor_condition_equiv(a: int, b: int) -> bool:
    s1, s2 = divisor_condition_sets(a, b)
    return s1 == s2


def build_atlas(max_index: int) -> list[dict]:
    """JSON-ready rows: tuple, family, deg K and the solutions of ``L^c = -K``."""
    rows = []
    for t in fano_tuples(max_index):
        rows.append(
            {
                "e": list(t.e),
                "family": t.family,
                "deg_K": str(deg_canonical(t)),
                "roots": [
                    {"c": s.c, "exists": s.exists, "unique": s.unique}
                    | ({"deg_L": str(s.root.degree), "tau": list(s.root.tau)} if s.root else {})
                    for s in taut_bundle_solutions(t)
                ],
            }
        )
    return rows


SURFACE_ORBIFOLDS = {"E6": (2, 3, 3), "E7": (2, 3, 4), "E8": (2, 3, 5)}


def expected_indices(family: SurfaceFamily) -> tuple[int, ...]:
    """Indices of the classification table (smooth and A_n depend on the weights)."""
    _, d1, d2, d3 = family.weights
    if family.kind == "smooth":
        d = gcd(d1, d2)
        return tuple(sorted(x // d for x in (d1, d2) if x > d))
    if family.kind == "A":
        d = gcd(gcd(d1, d2), d3)
        return tuple(sorted(x // d for x in (d2, d3) if x > d))
    if family.kind == "D":
        return tuple(sorted((family.n - 2, 2, 2)))
    return SURFACE_ORBIFOLDS[family.kind]


__all__ = [
    "OrbiLineBundle",
    "OrbifoldTuple",
    "RamificationDatum",
    "RootSolution",
    "SURFACE_RING",
    "anticanonical",
    "build_atlas",
    "deg_canonical",
    "distinct_nonzero_roots",
    "divisor_condition_equiv",
    "divisor_condition_sets",
    "expected_indices",
    "fano_tuples",
    "ramification_data",
    "ramification_indices",
    "ramification_points",
    "stabilizer_order",
    "tau_power",
    "taut_bundle_solutions",
]
