"""Coordinate changes: triangular substitutions, w-homogenization, monomial subalgebras.

A :class:`TriangularSubstitution` describes new coordinates in terms of old
ones: ``x'_i = c_i x_i + q_i`` where ``q_i`` only involves variables that come
before ``x_i`` in a declared order (plus parameter variables, which are never
changed).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .poisson import PoissonMatrix, bracket
from .poly import (
    GradingData,
    Monomial,
    Polynomial,
    PolyRing,
    cmp_paper_order,
    monomial_degree,
    paper_order_key,
    substitute,
)


class NotTriangular(ValueError):
    pass


class WeightShapeError(ValueError):
    """``{x_a, x_i}`` is not of the form ``w_i x_i + (earlier terms)``."""

    def __init__(self, message: str, index: int, term: Monomial | None = None):
        super().__init__(message)
        self.index = index
        self.term = term


# -- triangular substitutions ------------------------------------------------------


@dataclass(frozen=True)
class TriangularSubstitution:
    """New coordinates ``images[i]`` written in the old ones.

    ``order`` lists the first ``len(order)`` variables in triangular order;
    remaining ring variables (parameters) must map to themselves.
    """

    images: tuple[Polynomial, ...]
    order: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(self.images))
        object.__setattr__(self, "order", tuple(self.order))
        nvars = len(self.images)
        if any(p.nvars != nvars for p in self.images):
            raise NotTriangular("images must live in a ring with one variable per image")
        if sorted(self.order) != list(range(len(self.order))):
            raise NotTriangular("order must be a permutation of the leading variables")
        self._scales()  # validates

    @classmethod
    def identity(cls, nvars: int, n: int | None = None, order: Sequence[int] | None = None) -> "TriangularSubstitution":
        if order is None:
            order = range(nvars if n is None else n)
        return cls(tuple(Polynomial.variable(nvars, i) for i in range(nvars)), tuple(order))

    @classmethod
    def from_map(
        cls, ring: PolyRing, mapping: Mapping[str, Polynomial | str], order: Sequence[str] | None = None, n: int | None = None
    ) -> "TriangularSubstitution":
        """Images given by variable name; unnamed variables are left alone."""
        images = [ring.var(v) for v in ring.names]
        for name, img in mapping.items():
            images[ring.index(name)] = ring.parse(img) if isinstance(img, str) else img
        if order is None:
            pos = tuple(range(ring.nvars if n is None else n))
        else:
            pos = tuple(ring.index(v) for v in order)
        return cls(tuple(images), pos)

    @property
    def nvars(self) -> int:
        return len(self.images)

    def _scales(self) -> list[Fraction]:
        n = len(self.order)
        rank = {v: k for k, v in enumerate(self.order)}
        scales = []
        for i, img in enumerate(self.images):
            x_i = (0,) * i + (1,) + (0,) * (self.nvars - i - 1)
            c = img.coefficient(x_i)
            if i >= n:
                if img != Polynomial.variable(self.nvars, i):
                    raise NotTriangular(f"parameter variable {i + 1} must map to itself")
                scales.append(Fraction(1))
                continue
            if not c:
                raise NotTriangular(f"image of variable {i + 1} has no invertible linear term in it")
            for m in img.monomials():
                if m == x_i:
                    continue
                for j in range(n):
                    if m[j] and rank[j] >= rank[i]:
                        raise NotTriangular(f"image of variable {i + 1} involves variable {j + 1}")
            scales.append(c)
        return scales

    def apply(self, p: Polynomial) -> Polynomial:
        """``p`` rewritten by ``x_i -> images[i]``."""
        return substitute(p, self.images)

    __call__ = apply

    def is_identity(self) -> bool:
        return all(img == Polynomial.variable(self.nvars, i) for i, img in enumerate(self.images))

    def invert(self) -> "TriangularSubstitution":
        """Back-substitution along the declared order."""
        scales = self._scales()
        inv: list[Polynomial] = [Polynomial.variable(self.nvars, i) for i in range(self.nvars)]
        for i in self.order:
            x_i = Polynomial.variable(self.nvars, i)
            c = scales[i]
            q = self.images[i] - x_i.scale(c)
            inv[i] = (x_i - substitute(q, inv)) / c
        return TriangularSubstitution(tuple(inv), self.order)

    def then(self, other: "TriangularSubstitution") -> "TriangularSubstitution":
        """Change coordinates by ``self``, then by ``other`` (written in the new coordinates)."""
        if other.nvars != self.nvars:
            raise NotTriangular("substitutions on different rings")
        images = tuple(substitute(o, self.images) for o in other.images)
        return TriangularSubstitution(images, self.order)

    def to_json_dict(self, ring: PolyRing) -> dict[str, str]:
        return {ring.names[i]: ring.format(img) for i, img in enumerate(self.images)}


def invert_triangular(sub: TriangularSubstitution) -> TriangularSubstitution:
    return sub.invert()


def transport_poisson(theta: PoissonMatrix, sub: TriangularSubstitution) -> PoissonMatrix:
    """The Poisson matrix in the coordinates ``x'_i = sub.images[i]``."""
    if sub.nvars != theta.nvars:
        raise NotTriangular("substitution and matrix live in different rings")
    inv = sub.invert()
    gens = [Polynomial.variable(theta.nvars, i) for i in range(theta.nvars)]
    entries = {}
    for i in range(theta.n):
        for j in range(i + 1, theta.n):
            fi, fj = sub.images[i], sub.images[j]
            if fi == gens[i] and fj == gens[j]:
                b = theta.entry(i, j)
            else:
                b = bracket(theta, fi, fj)
            if b:
                entries[(i, j)] = inv.apply(b)
    return PoissonMatrix(theta.ring, entries, n=theta.n, grading=theta.grading)


# -- w-homogenization -------------------------------------------------------------------


@dataclass(frozen=True)
class WStep:
    """One replacement ``x_i -> x_i + coefficient * term``."""

    index: int
    term: Monomial
    coefficient: Fraction


def w_weights_from(theta: PoissonMatrix, alpha1: int) -> tuple[Fraction, ...]:
    """``w_i`` read off as the coefficient of ``x_i`` in ``{x_alpha1, x_i}``."""
    out = []
    for i in range(theta.n):
        x_i = tuple(1 if k == i else 0 for k in range(theta.nvars))
        out.append(theta.entry(alpha1, i).coefficient(x_i))
    return tuple(out)


def offending_terms(theta: PoissonMatrix, w: Sequence[Fraction], alpha1: int, i: int) -> list[Monomial]:
    """Monomials of ``{x_alpha1, x_i}`` whose w-degree differs from ``w_i``."""
    b = theta.entry(alpha1, i)
    return [m for m in b.monomials() if monomial_degree(m, w) != w[i]]


def w_homogenize(
    theta: PoissonMatrix,
    grading: GradingData,
    alpha1: int,
    order: Sequence[int] | None = None,
    max_steps: int = 100_000,
) -> tuple[TriangularSubstitution, PoissonMatrix, list[WStep]]:
    """Make every ``{x_alpha1, x_i}`` w-homogeneous of degree ``w_i``.

    Repeatedly takes the offending term ``q`` that is largest for the
    last-variable-first order and replaces ``x_i`` by ``x_i + q / (w_i - w(q))``.
    Returns the accumulated substitution (new coordinates in the original
    ones), the transported matrix and the list of steps taken.
    """
    n = theta.n
    w = grading.w_weights(theta.nvars)
    order = tuple(range(n)) if order is None else tuple(order)
    rank = {v: k for k, v in enumerate(order)}
    total = TriangularSubstitution.identity(theta.nvars, order=order)
    cur = theta
    steps: list[WStep] = []
    for i in order:
        if i == alpha1:
            continue
        x_i = tuple(1 if k == i else 0 for k in range(theta.nvars))
        if cur.entry(alpha1, i).coefficient(x_i) != w[i]:
            raise WeightShapeError(
                f"coefficient of variable {i + 1} in its bracket with variable {alpha1 + 1} is not w = {w[i]}", i
            )
        while True:
            bad = offending_terms(cur, w, alpha1, i)
            if not bad:
                break
            q = max(bad, key=paper_order_key)
            if any(q[j] and rank[j] >= rank[i] for j in range(n)):
                raise WeightShapeError(f"offending term {q} of variable {i + 1} is not in earlier variables", i, q)
            coeff = cur.entry(alpha1, i).coefficient(q) / (w[i] - monomial_degree(q, w))
            images = [Polynomial.variable(theta.nvars, k) for k in range(theta.nvars)]
            images[i] = images[i] + Polynomial(theta.nvars, {q: coeff})
            step = TriangularSubstitution(tuple(images), order)
            cur = transport_poisson(cur, step)
            total = total.then(step)
            steps.append(WStep(i, q, coeff))
            if len(steps) > max_steps:
                raise RuntimeError("w-homogenization did not terminate within max_steps")
    return total, cur, steps


def steps_strictly_decrease(steps: Sequence[WStep]) -> bool:
    """Per variable, the replaced terms form a strictly decreasing chain."""
    last: dict[int, Monomial] = {}
    for st in steps:
        prev = last.get(st.index)
        if prev is not None and cmp_paper_order(st.term, prev) >= 0:
            return False
        last[st.index] = st.term
    return True


def weighted_monomials(degrees: Sequence[int], target: int, allowed: Iterable[int]) -> list[Monomial]:
    """All monomials in the ``allowed`` variables of weighted degree ``target``."""
    allowed = sorted(allowed)
    n = len(degrees)
    out: list[Monomial] = []

    def rec(k: int, remaining: int, exps: list[int]) -> None:
        if k == len(allowed):
            if remaining == 0:
                out.append(tuple(exps))
            return
        v = allowed[k]
        e = 0
        while e * degrees[v] <= remaining:
            exps[v] = e
            rec(k + 1, remaining - e * degrees[v], exps)
            e += 1
        exps[v] = 0

    if target > 0 and all(degrees[v] > 0 for v in allowed):
        rec(0, target, [0] * n)
    return sorted(out, key=paper_order_key)


def random_homogeneous_triangular(
    nvars: int, degrees: Sequence[int], rng: random.Random, fixed: Iterable[int] = (), coeff_range: int = 3
) -> TriangularSubstitution:
    """Random ``x_i -> x_i + q_i`` with ``q_i`` of degree ``d_i`` in earlier variables.

    Variables in ``fixed`` are left alone.  Parameter variables beyond
    ``len(degrees)`` are never touched.
    """
    n = len(degrees)
    fixed = set(fixed)
    images = [Polynomial.variable(nvars, i) for i in range(nvars)]
    padded = list(degrees) + [0] * (nvars - n)
    for i in range(n):
        if i in fixed:
            continue
        terms = {}
        for m in weighted_monomials(padded, degrees[i], range(i)):
            c = rng.randint(-coeff_range, coeff_range)
            if c:
                terms[m] = Fraction(c)
        images[i] = images[i] + Polynomial(nvars, terms)
    return TriangularSubstitution(tuple(images), tuple(range(n)))


# -- monomial subalgebras of C[u, v] ---------------------------------------------------

UV = PolyRing("u v")


def bracket_uv(m1: Sequence[int], m2: Sequence[int]) -> Polynomial:
    """``{u^a v^b, u^c v^d} = (a d - c b) u^(a+c-1) v^(b+d-1)`` for ``{u, v} = 1``."""
    a, b = m1
    c, d = m2
    coeff = a * d - c * b
    if not coeff:
        return UV.zero()
    return Polynomial(2, {(a + c - 1, b + d - 1): coeff})


@dataclass(frozen=True)
class MonomialSubalgebra:
    """Subalgebra of ``C[u, v]`` generated by monic monomials ``(a, b) = u^a v^b``."""

    generators: tuple[tuple[int, int], ...]
    deg_u: Fraction = Fraction(1)
    deg_v: Fraction = Fraction(1)

    def __post_init__(self):
        gens = tuple(sorted({(int(a), int(b)) for a, b in self.generators}))
        if any(a < 0 or b < 0 or a + b == 0 for a, b in gens):
            raise ValueError("generators must be non-constant monomials")
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "deg_u", Fraction(self.deg_u))
        object.__setattr__(self, "deg_v", Fraction(self.deg_v))
        if self.deg_u <= 0 or self.deg_v <= 0:
            raise ValueError("degrees of u and v must be positive")

    def degree(self, m: Sequence[int]) -> Fraction:
        return m[0] * self.deg_u + m[1] * self.deg_v

    def contains(self, m: Sequence[int]) -> bool:
        return _semigroup_member(self.generators, (int(m[0]), int(m[1])))

    def elements(self, bound) -> list[tuple[int, int]]:
        """Monomials of the algebra (including 1) of degree at most ``bound``."""
        bound = Fraction(bound)
        seen = {(0, 0)}
        frontier = [(0, 0)]
        while frontier:
            nxt = []
            for m in frontier:
                for g in self.generators:
                    p = (m[0] + g[0], m[1] + g[1])
                    if p not in seen and self.degree(p) <= bound:
                        seen.add(p)
                        nxt.append(p)
            frontier = nxt
        return sorted(seen, key=lambda m: (self.degree(m), m))


@lru_cache(maxsize=None)
def _semigroup_member(gens: tuple[tuple[int, int], ...], m: tuple[int, int]) -> bool:
    if m == (0, 0):
        return True
    for g in gens:
        if g[0] <= m[0] and g[1] <= m[1] and _semigroup_member(gens, (m[0] - g[0], m[1] - g[1])):
            return True
    return False


@dataclass(frozen=True)
class ClosureResult:
    closed: bool
    bound: Fraction
    witnesses: tuple[tuple[tuple[int, int], tuple[int, int], Polynomial], ...] = field(default=())

    def describe(self) -> str:
        if self.closed:
            return f"closed up to degree {self.bound}"
        a, b, r = self.witnesses[0]
        return f"{{{_uv_text(a)}, {_uv_text(b)}}} = {UV.format(r)} is outside the algebra"


def _uv_text(m: Sequence[int]) -> str:
    return UV.format(Polynomial(2, {tuple(m): 1}))


def closure_check(alg: MonomialSubalgebra, degree_bound=None) -> ClosureResult:
    """Check that brackets of algebra monomials of degree <= bound stay in the algebra.

    The default bound is four times the largest generator degree.  Witnesses
    are reported sorted by degree of the pair.
    """
    max_gen = max(alg.degree(g) for g in alg.generators)
    bound = 4 * max_gen if degree_bound is None else Fraction(degree_bound)
    if bound < max_gen:
        raise ValueError("degree bound is below the largest generator degree")
    elems = [m for m in alg.elements(bound) if m != (0, 0)]
    witnesses = []
    for k, a in enumerate(elems):
        for b in elems[k + 1:]:
            r = bracket_uv(a, b)
            if not r:
                continue
            (mono,) = r.monomials()
            if not alg.contains(mono):
                witnesses.append((a, b, r))
    witnesses.sort(key=lambda w: (alg.degree(w[0]) + alg.degree(w[1]), w[0], w[1]))
    return ClosureResult(not witnesses, bound, tuple(witnesses))


def an_generators(n: int) -> dict[str, tuple[int, int]]:
    """``x = u^(n+1)``, ``y = v^(n+1)``, ``z = uv`` as exponent pairs."""
    return {"x": (n + 1, 0), "y": (0, n + 1), "z": (1, 1)}


def uv_power(base: tuple[int, int], k: int) -> tuple[int, int]:
    return (base[0] * k, base[1] * k)


def uv_mul(*ms: tuple[int, int]) -> tuple[int, int]:
    return (sum(m[0] for m in ms), sum(m[1] for m in ms))


def lifted_algebra(n: int, m: int) -> MonomialSubalgebra:
    """``C[z, x z^m, x^2, x^3, y]`` inside ``C[u, v]``."""
    g = an_generators(n)
    x, y, z = g["x"], g["y"], g["z"]
    return MonomialSubalgebra((z, uv_mul(x, uv_power(z, m)), uv_power(x, 2), uv_power(x, 3), y))


def lifted_generators(n: int, m: int = 1) -> list[tuple[int, int]]:
    """Images of ``x_1..x_5`` under ``(x_1, .., x_5) -> (z, x z^m, x^2, x^3, y)``."""
    g = an_generators(n)
    x, y, z = g["x"], g["y"], g["z"]
    return [z, uv_mul(x, uv_power(z, m)), uv_power(x, 2), uv_power(x, 3), y]


def w_weight_obstruction(n: int, m: int = 1) -> Fraction:
    """Sum of the w-weights defined by ``{z, phi(x_i)} = w_i phi(x_i)``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    z = an_generators(n)["z"]
    total = Fraction(0)
    for g in lifted_generators(n, m):
        b = bracket_uv(z, g)
        # b is w * g with w = (b_g - a_g)
        total += b.coefficient(g) if b else 0
    return total


def five_generator_algebra(n: int, k: int = 2, kp: int = 3, l: int = 2, lp: int = 3) -> MonomialSubalgebra:
    """``C[x^k, x^k', y^l, y^l', z]`` with ``x, y, z`` as in :func:`an_generators`."""
    g = an_generators(n)
    x, y, z = g["x"], g["y"], g["z"]
    return MonomialSubalgebra((uv_power(x, k), uv_power(x, kp), uv_power(y, l), uv_power(y, lp), z))
