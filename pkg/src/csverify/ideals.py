"""Groebner bases over Q: term orders, reduction, Buchberger, and ideal questions.

Internally polynomials are dicts ``monomial -> int`` kept primitive (content
removed), which is much faster than rational arithmetic.  The public API takes
and returns :class:`~csverify.poly.Polynomial` values; bases are reduced and
monic.

Buchberger uses the normal selection strategy (smallest lcm of leading
monomials first, ties broken by pair index) with the Gebauer-Moeller update,
which covers both the coprime criterion and the chain criterion.  Given the
same input the output is byte-for-byte reproducible.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from .poly import ArityError, Monomial, Polynomial, PolyRing

_CHECK_EVERY = 512


class ComputationTimeout(RuntimeError):
    """The deadline passed before the computation finished."""


# -- term orders -----------------------------------------------------------------


@dataclass(frozen=True)
class TermOrder:
    """A term order on ``nvars`` variables.

    ``kind`` is ``"lex"`` or ``"grevlex"``.  ``priority`` lists variable indices
    from most to least significant (default: ``x1 > x2 > ...``).  ``block``
    makes an elimination order: the first ``block`` variables of ``priority``
    are compared first (with ``kind``), then the rest (with ``rest_kind``).
    """

    kind: str
    nvars: int
    priority: tuple[int, ...] | None = None
    block: int = 0
    rest_kind: str = "grevlex"

    def __post_init__(self):
        if self.kind not in ("lex", "grevlex") or self.rest_kind not in ("lex", "grevlex"):
            raise ValueError(f"unknown term order {self.kind!r}")
        pri = tuple(range(self.nvars)) if self.priority is None else tuple(self.priority)
        if sorted(pri) != list(range(self.nvars)):
            raise ValueError("priority must be a permutation of the variable indices")
        object.__setattr__(self, "priority", pri)
        if not 0 <= self.block <= self.nvars:
            raise ValueError("block size out of range")

    @classmethod
    def lex(cls, nvars: int, priority: Sequence[int] | None = None) -> "TermOrder":
        return cls("lex", nvars, None if priority is None else tuple(priority))

    @classmethod
    def grevlex(cls, nvars: int, priority: Sequence[int] | None = None) -> "TermOrder":
        return cls("grevlex", nvars, None if priority is None else tuple(priority))

    @classmethod
    def elimination(cls, nvars: int, eliminate: Sequence[int], rest: str = "grevlex") -> "TermOrder":
        """Block order making every variable in ``eliminate`` bigger than the others."""
        elim = list(eliminate)
        others = [i for i in range(nvars) if i not in elim]
        return cls("grevlex", nvars, tuple(elim + others), block=len(elim), rest_kind=rest)

    @property
    def name(self) -> str:
        if self.block:
            return f"block({self.kind}:{self.block},{self.rest_kind})"
        return self.kind

    def key(self, m: Monomial):
        """Sort key: ``key(a) < key(b)`` iff ``a < b`` in this order.  Flat int tuple."""
        pri = self.priority
        if self.block:
            head = pri[: self.block]
            tail = pri[self.block:]
            return _part_key(m, head, self.kind) + _part_key(m, tail, self.rest_kind)
        return _part_key(m, pri, self.kind)

    def restrict(self, keep: Sequence[int]) -> "TermOrder":
        """The order induced on the variables ``keep``, renumbered 0..len(keep)-1."""
        pos = {v: i for i, v in enumerate(keep)}
        pri = [pos[v] for v in self.priority if v in pos]
        if self.block:
            head = [pos[v] for v in self.priority[: self.block] if v in pos]
            kind = self.kind if head else self.rest_kind
            if head and len(head) < len(pri):
                return TermOrder(self.kind, len(keep), tuple(pri), block=len(head), rest_kind=self.rest_kind)
            return TermOrder(kind, len(keep), tuple(pri))
        return TermOrder(self.kind, len(keep), tuple(pri))


def _part_key(m: Monomial, pri: Sequence[int], kind: str) -> tuple[int, ...]:
    if kind == "lex":
        return tuple(m[i] for i in pri)
    return (sum(m[i] for i in pri),) + tuple(-m[i] for i in reversed(pri))


def order_from_name(name: str, nvars: int) -> TermOrder:
    if name == "lex":
        return TermOrder.lex(nvars)
    if name == "grevlex":
        return TermOrder.grevlex(nvars)
    raise ValueError(f"unknown term order {name!r}")


# -- integer polynomial kernel ----------------------------------------------------


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple([x + y for x, y in zip(a, b)])


def _mono_div(a: Monomial, b: Monomial) -> Monomial | None:
    out = []
    for x, y in zip(a, b):
        if x < y:
            return None
        out.append(x - y)
    return tuple(out)


def _mono_lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple([x if x > y else y for x, y in zip(a, b)])


def _divides(b: Monomial, a: Monomial) -> bool:
    for x, y in zip(a, b):
        if x < y:
            return False
    return True


def _coprime(a: Monomial, b: Monomial) -> bool:
    for x, y in zip(a, b):
        if x and y:
            return False
    return True


def _mask(m: Monomial) -> int:
    bits = 0
    for i, e in enumerate(m):
        if e:
            bits |= 1 << i
    return bits


def _primitive(terms: dict[Monomial, int], lead: Monomial) -> dict[Monomial, int]:
    g = 0
    for c in terms.values():
        g = gcd(g, c)
        if g == 1:
            break
    if terms[lead] < 0:
        g = -g
    if g != 1:
        terms = {m: c // g for m, c in terms.items()}
    return terms


def _to_int_terms(p: Polynomial) -> tuple[dict[Monomial, int], Fraction]:
    """Integer coefficients and the factor ``k`` with ``p == k * result``."""
    den = 1
    for _, c in p.items():
        den = den * c.denominator // gcd(den, c.denominator)
    terms = {m: int(c * den) for m, c in p.items()}
    g = 0
    for c in terms.values():
        g = gcd(g, c)
    terms = {m: c // g for m, c in terms.items()}
    return terms, Fraction(g, den)


class _Elem:
    __slots__ = ("lm", "lc", "tail", "mask", "terms")

    def __init__(self, terms: dict[Monomial, int], order: TermOrder):
        items = sorted(terms.items(), key=lambda mc: order.key(mc[0]), reverse=True)
        self.terms = terms
        self.lm, self.lc = items[0]
        self.tail = items[1:]
        self.mask = _mask(self.lm)


class _Engine:
    """Division and Buchberger over one term order, with a shared key cache."""

    def __init__(self, order: TermOrder, deadline: float | None = None):
        self.order = order
        self.deadline = deadline
        self._keys: dict[Monomial, tuple] = {}
        self._ticks = 0

    def tick(self) -> None:
        self._ticks += 1
        if self.deadline is not None and self._ticks % _CHECK_EVERY == 0 and time.monotonic() > self.deadline:
            raise ComputationTimeout("Groebner computation exceeded its time limit")

    def negkey(self, m: Monomial):
        k = self._keys.get(m)
        if k is None:
            k = tuple(-x for x in self.order.key(m))
            self._keys[m] = k
        return k

    def lead(self, terms: dict[Monomial, int]) -> Monomial:
        return min(terms, key=self.negkey)

    def elem(self, terms: dict[Monomial, int]) -> _Elem:
        return _Elem(terms, self.order)

    def reduce(self, terms: dict[Monomial, int], basis: Sequence[_Elem], full: bool = True):
        """Remainder of ``terms`` modulo ``basis``.

        Returns ``(r, scale)`` with ``r == scale * (true remainder)`` where the
        true remainder is taken over Q with monic divisors.  ``r`` keeps integer
        coefficients.
        """
        p = dict(terms)
        heap = [(self.negkey(m), m) for m in p]
        heapq.heapify(heap)
        queued = set(p)
        r: dict[Monomial, int] = {}
        scale = Fraction(1)
        while heap:
            _, m = heapq.heappop(heap)
            queued.discard(m)
            c = p.pop(m, 0)
            if not c:
                continue
            self.tick()
            g = None
            mm = _mask(m)
            for b in basis:
                if b.mask & mm == b.mask and _divides(b.lm, m):
                    g = b
                    break
            if g is None:
                r[m] = c
                if not full:
                    # keep the rest untouched
                    for mo, co in p.items():
                        r[mo] = co
                    break
                continue
            q = _mono_div(m, g.lm)
            d = gcd(c, g.lc)
            a, b = g.lc // d, c // d
            if a < 0:
                a, b = -a, -b
            if a != 1:
                for k in p:
                    p[k] *= a
                for k in r:
                    r[k] *= a
                scale *= a
            for gm, gc in g.tail:
                nm = _mono_mul(q, gm)
                v = p.get(nm, 0) - b * gc
                if v:
                    p[nm] = v
                    if nm not in queued:
                        queued.add(nm)
                        heapq.heappush(heap, (self.negkey(nm), nm))
                else:
                    p.pop(nm, None)
            if a != 1 and c.bit_length() > 512:
                g2 = 0
                for v in p.values():
                    g2 = gcd(g2, v)
                for v in r.values():
                    g2 = gcd(g2, v)
                if g2 > 1:
                    for k in p:
                        p[k] //= g2
                    for k in r:
                        r[k] //= g2
                    scale /= g2
        return r, scale

    def spoly(self, f: _Elem, g: _Elem) -> dict[Monomial, int]:
        lcm = _mono_lcm(f.lm, g.lm)
        uf = _mono_div(lcm, f.lm)
        ug = _mono_div(lcm, g.lm)
        d = gcd(f.lc, g.lc)
        cf, cg = g.lc // d, f.lc // d
        out: dict[Monomial, int] = {}
        for m, c in f.tail:
            nm = _mono_mul(uf, m)
            out[nm] = out.get(nm, 0) + cf * c
        for m, c in g.tail:
            nm = _mono_mul(ug, m)
            v = out.get(nm, 0) - cg * c
            if v:
                out[nm] = v
            else:
                out.pop(nm, None)
        return {m: c for m, c in out.items() if c}

    # -- Buchberger ---------------------------------------------------------

    def groebner(self, gens: Iterable[dict[Monomial, int]]) -> list[_Elem]:
        polys: list[_Elem] = []
        seen = set()
        for t in gens:
            if not t:
                continue
            t = _primitive(t, self.lead(t))
            key = frozenset(t.items())
            if key in seen:
                continue
            seen.add(key)
            polys.append(self.elem(t))
        if not polys:
            return []
        # start from an interreduced list, smallest leading monomial first
        polys.sort(key=lambda e: self.negkey(e.lm), reverse=True)
        f: list[_Elem] = []
        G: list[int] = []
        B: dict[tuple[int, int], tuple] = {}
        for e in polys:
            r, _ = self.reduce(e.terms, [f[i] for i in G])
            if not r:
                continue
            r = _primitive(r, self.lead(r))
            f.append(self.elem(r))
            if _is_unit(f[-1]):
                return [f[-1]]
            G, B = self._update(f, G, B, len(f) - 1)
        while B:
            self.tick()
            pair = min(B, key=lambda ij: (B[ij], ij))
            del B[pair]
            i, j = pair
            s = self.spoly(f[i], f[j])
            if not s:
                continue
            r, _ = self.reduce(s, [f[k] for k in G])
            if not r:
                continue
            r = _primitive(r, self.lead(r))
            f.append(self.elem(r))
            if _is_unit(f[-1]):
                return [f[-1]]
            G, B = self._update(f, G, B, len(f) - 1)
        return self._reduced([f[k] for k in G])

    def _update(self, f: list[_Elem], G: list[int], B: dict, ih: int):
        mh = f[ih].lm
        lcm = _mono_lcm
        # pairs (g, h): drop those whose lcm is a proper multiple of another candidate lcm
        C = sorted(G)
        D: list[int] = []
        while C:
            ig = C.pop(0)
            mg = f[ig].lm
            lhg = lcm(mh, mg)
            if _coprime(mh, mg):
                D.append(ig)
                continue
            redundant = any(_divides(lcm(mh, f[ip].lm), lhg) for ip in C) or any(
                _divides(lcm(mh, f[ip].lm), lhg) for ip in D
            )
            if not redundant:
                D.append(ig)
        E = [ig for ig in D if not _coprime(mh, f[ig].lm)]
        newB: dict[tuple[int, int], tuple] = {}
        for (i1, i2), k in B.items():
            m1, m2 = f[i1].lm, f[i2].lm
            l12 = lcm(m1, m2)
            if not _divides(mh, l12) or lcm(m1, mh) == l12 or lcm(m2, mh) == l12:
                newB[(i1, i2)] = k
        for ig in E:
            pair = (ig, ih) if ig < ih else (ih, ig)
            newB[pair] = self.order.key(lcm(mh, f[ig].lm))
        newG = [ig for ig in G if not _divides(mh, f[ig].lm)]
        newG.append(ih)
        return newG, newB

    def _reduced(self, basis: list[_Elem]) -> list[_Elem]:
        # minimal: drop elements whose leading monomial another one divides
        basis = sorted(basis, key=lambda e: self.negkey(e.lm), reverse=True)
        minimal: list[_Elem] = []
        for e in basis:
            if not any(_divides(o.lm, e.lm) for o in minimal):
                minimal.append(e)
        out = []
        for k, e in enumerate(minimal):
            others = minimal[:k] + minimal[k + 1:]
            r, _ = self.reduce(e.terms, others)
            r = _primitive(r, self.lead(r))
            out.append(self.elem(r))
        return out


def _is_unit(e: _Elem) -> bool:
    return not any(e.lm)


# -- public API ----------------------------------------------------------------------


def _deadline(timeout: float | None) -> float | None:
    return None if timeout is None else time.monotonic() + timeout


def _from_elem(e: _Elem, nvars: int) -> Polynomial:
    lc = e.lc
    return Polynomial(nvars, {m: Fraction(c, lc) for m, c in e.terms.items()})


def _check_arity(polys: Sequence[Polynomial], nvars: int) -> None:
    for p in polys:
        if p.nvars != nvars:
            raise ArityError(f"polynomial in {p.nvars} variables, order on {nvars}")


@dataclass(frozen=True)
class GroebnerBasis:
    """Reduced Groebner basis; generators are monic and sorted by leading monomial."""

    order: TermOrder
    generators: tuple[Polynomial, ...]

    @property
    def nvars(self) -> int:
        return self.order.nvars

    def is_unit(self) -> bool:
        return len(self.generators) == 1 and self.generators[0].is_constant() and bool(self.generators[0])

    def leading_monomial(self, p: Polynomial) -> Monomial:
        return max(p.monomials(), key=self.order.key)

    def reduce(self, p: Polynomial) -> Polynomial:
        return normal_form(p, self)

    def contains(self, p: Polynomial) -> bool:
        return normal_form(p, self).is_zero()

    def __len__(self) -> int:
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    def to_json_dict(self, ring: PolyRing) -> dict:
        return {"order": self.order.name, "vars": list(ring.names), "generators": [ring.format(g) for g in self.generators]}


def _elements(gb: GroebnerBasis, engine: _Engine) -> list[_Elem]:
    return [engine.elem(_to_int_terms(g)[0]) for g in gb.generators]


def normal_form(p: Polynomial, gb: GroebnerBasis) -> Polynomial:
    """Remainder of ``p`` on division by ``gb`` (exact, over Q)."""
    _check_arity([p], gb.nvars)
    if not p:
        return p
    engine = _Engine(gb.order)
    terms, k = _to_int_terms(p)
    r, scale = engine.reduce(terms, _elements(gb, engine))
    factor = k / scale
    return Polynomial(p.nvars, {m: c * factor for m, c in r.items()})


def buchberger(gens: Sequence[Polynomial], order: TermOrder | None = None, timeout: float | None = None) -> GroebnerBasis:
    """Reduced Groebner basis of the ideal generated by ``gens``."""
    gens = list(gens)
    if not gens:
        raise ValueError("need at least one generator")
    nvars = gens[0].nvars
    order = order or TermOrder.grevlex(nvars)
    _check_arity(gens, order.nvars)
    engine = _Engine(order, _deadline(timeout))
    basis = engine.groebner(_to_int_terms(g)[0] for g in gens if g)
    polys = [_from_elem(e, nvars) for e in basis]
    polys.sort(key=lambda q: order.key(max(q.monomials(), key=order.key)))
    return GroebnerBasis(order, tuple(polys))


def ideal_membership(p: Polynomial, gens: Sequence[Polynomial], order: TermOrder | None = None, timeout=None) -> bool:
    return buchberger(gens, order, timeout).contains(p)


def _adjoin_variable(polys: Sequence[Polynomial], front: bool = True) -> list[Polynomial]:
    out = []
    for p in polys:
        out.append(Polynomial(p.nvars + 1, {((0,) + m if front else m + (0,)): c for m, c in p.items()}))
    return out


def radical_membership(p: Polynomial, gens: Sequence[Polynomial], order: TermOrder | None = None, timeout=None) -> bool:
    """Rabinowitsch trick: ``p`` is in the radical iff ``(gens, 1 - t p)`` is the unit ideal."""
    nvars = p.nvars
    _check_arity(gens, nvars)
    order = order or TermOrder.grevlex(nvars)
    lifted = _adjoin_variable(list(gens) + [p])
    t = Polynomial.variable(nvars + 1, 0)
    extra = 1 - t * lifted[-1]
    big = TermOrder(order.kind, nvars + 1, (0,) + tuple(i + 1 for i in order.priority))
    gb = buchberger(lifted[:-1] + [extra], big, timeout)
    return gb.is_unit()


def saturate(gens: Sequence[Polynomial], q: Polynomial, order: TermOrder | None = None, timeout=None) -> GroebnerBasis:
    """Groebner basis of ``(gens) : q^infinity``.

    Adjoins a fresh variable ``t`` with ``t q - 1``, computes a basis for a
    block order with ``t`` above everything else (``order`` on the remaining
    variables) and keeps the elements free of ``t``.
    """
    if not q:
        raise ValueError("cannot saturate by zero")
    nvars = q.nvars
    _check_arity(gens, nvars)
    order = order or TermOrder.grevlex(nvars)
    lifted = _adjoin_variable(list(gens) + [q])
    t = Polynomial.variable(nvars + 1, 0)
    extra = t * lifted[-1] - 1
    big = TermOrder(
        "lex", nvars + 1, (0,) + tuple(i + 1 for i in order.priority), block=1, rest_kind=order.kind
    )
    gb = buchberger(lifted[:-1] + [extra], big, timeout)
    kept = []
    for g in gb.generators:
        if all(m[0] == 0 for m in g.monomials()):
            kept.append(Polynomial(nvars, {m[1:]: c for m, c in g.items()}))
    kept.sort(key=lambda p: order.key(max(p.monomials(), key=order.key)))
    return GroebnerBasis(order, tuple(kept))


def eliminate(
    gens: Sequence[Polynomial], keep_vars: Iterable[int], order: TermOrder | None = None, timeout=None
) -> list[Polynomial]:
    """Generators of ``(gens)`` intersected with ``Q[keep_vars]``.

    By default uses lex with the eliminated variables greater than the kept
    ones.  Results stay in the ambient ring.
    """
    gens = list(gens)
    if not gens:
        return []
    nvars = gens[0].nvars
    keep = sorted(set(keep_vars))
    if any(not 0 <= k < nvars for k in keep):
        raise IndexError("keep_vars out of range")
    drop = [i for i in range(nvars) if i not in keep]
    if order is None:
        order = TermOrder.lex(nvars, drop + keep)
    gb = buchberger(gens, order, timeout)
    dropset = set(drop)
    return [g for g in gb.generators if not any(m[i] for m in g.monomials() for i in dropset)]


def first_non_member(gb: GroebnerBasis, polys: Iterable[Polynomial]) -> Polynomial | None:
    """The first of ``polys`` outside the ideal of ``gb``, or None when all are members."""
    for p in polys:
        if not gb.contains(p):
            return p
    return None
