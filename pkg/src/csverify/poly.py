"""Sparse multivariate polynomials with exact rational coefficients.

A :class:`Polynomial` is an immutable map from exponent tuples to nonzero
:class:`fractions.Fraction` coefficients.  Variable names live in a
:class:`PolyRing`, which handles parsing and formatting; the arithmetic itself
only needs the arity.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Iterator, Mapping, Sequence

Monomial = tuple[int, ...]
Coefficient = Fraction | int


class ArityError(ValueError):
    pass


class ParseError(ValueError):
    def __init__(self, message: str, text: str, position: int):
        super().__init__(f"{message} at position {position}: {text!r}")
        self.text = text
        self.position = position


class UnknownVariable(ParseError):
    pass


class NotHomogeneous(ValueError):
    """Raised by :func:`homogeneous_degree`; carries two terms of different degree."""

    def __init__(self, first: Monomial, second: Monomial, degrees: tuple[Fraction, Fraction]):
        super().__init__(f"terms {first} and {second} have degrees {degrees[0]} != {degrees[1]}")
        self.witnesses = (first, second)
        self.degrees = degrees


class _AnyDegree:
    """Degree of the zero polynomial: compatible with every degree."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "AnyDegree"


AnyDegree = _AnyDegree()


def _frac(c: Coefficient) -> Fraction:
    return c if isinstance(c, Fraction) else Fraction(c)


class Polynomial:
    """Immutable sparse polynomial in ``nvars`` variables over Q."""

    __slots__ = ("nvars", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Monomial, Coefficient] | None = None):
        if nvars < 0:
            raise ValueError("nvars must be non-negative")
        self.nvars = nvars
        clean: dict[Monomial, Fraction] = {}
        if terms:
            for m, c in terms.items():
                if len(m) != nvars:
                    raise ArityError(f"monomial {m} does not have {nvars} exponents")
                if c:
                    clean[tuple(m)] = _frac(c)
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, nvars: int, terms: dict[Monomial, Fraction]) -> "Polynomial":
        # caller guarantees: no zeros, correct lengths, Fraction coefficients
        p = cls.__new__(cls)
        p.nvars = nvars
        p._terms = terms
        p._hash = None
        return p

    # -- construction helpers -------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> "Polynomial":
        return cls._raw(nvars, {})

    @classmethod
    def constant(cls, nvars: int, c: Coefficient) -> "Polynomial":
        c = _frac(c)
        return cls._raw(nvars, {(0,) * nvars: c} if c else {})

    @classmethod
    def variable(cls, nvars: int, index: int) -> "Polynomial":
        if not 0 <= index < nvars:
            raise IndexError(f"variable index {index} out of range for {nvars} variables")
        e = [0] * nvars
        e[index] = 1
        return cls._raw(nvars, {tuple(e): Fraction(1)})

    @classmethod
    def monomial(cls, exponents: Sequence[int], coeff: Coefficient = 1) -> "Polynomial":
        return cls(len(exponents), {tuple(exponents): coeff})

    # -- read access ----------------------------------------------------------

    @property
    def terms(self) -> dict[Monomial, Fraction]:
        return dict(self._terms)

    def items(self) -> Iterable[tuple[Monomial, Fraction]]:
        return self._terms.items()

    def monomials(self) -> Iterable[Monomial]:
        return self._terms.keys()

    def coefficient(self, m: Sequence[int]) -> Fraction:
        return self._terms.get(tuple(m), Fraction(0))

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[tuple[Monomial, Fraction]]:
        return iter(self._terms.items())

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and not any(next(iter(self._terms))))

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self._terms.get((0,) * self.nvars, Fraction(0))

    def total_degree(self) -> int:
        if not self._terms:
            return -1
        return max(sum(m) for m in self._terms)

    def variables(self) -> set[int]:
        used: set[int] = set()
        for m in self._terms:
            used.update(i for i, e in enumerate(m) if e)
        return used

    # -- equality -------------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Polynomial):
            return self.nvars == other.nvars and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_value() == other
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    # -- arithmetic -----------------------------------------------------------

    def _coerce(self, other: object) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise ArityError(f"arity mismatch: {self.nvars} vs {other.nvars}")
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(self.nvars, other)
        raise TypeError(f"cannot combine Polynomial with {type(other).__name__}")

    def __add__(self, other: object) -> "Polynomial":
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        terms = dict(self._terms)
        for m, c in o._terms.items():
            s = terms.get(m, 0) + c
            if s:
                terms[m] = s
            else:
                terms.pop(m, None)
        return Polynomial._raw(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial._raw(self.nvars, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other: object) -> "Polynomial":
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: object) -> "Polynomial":
        return (-self) + other

    def scale(self, c: Coefficient) -> "Polynomial":
        c = _frac(c)
        if not c:
            return Polynomial.zero(self.nvars)
        return Polynomial._raw(self.nvars, {m: c * v for m, v in self._terms.items()})

    def __mul__(self, other: object) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        if not self._terms or not o._terms:
            return Polynomial.zero(self.nvars)
        terms: dict[Monomial, Fraction] = {}
        get = terms.get
        for m1, c1 in self._terms.items():
            for m2, c2 in o._terms.items():
                m = tuple([a + b for a, b in zip(m1, m2)])
                terms[m] = get(m, 0) + c1 * c2
        return Polynomial._raw(self.nvars, {m: c for m, c in terms.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other: Coefficient) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(1) / _frac(other))
        return NotImplemented

    def __pow__(self, k: int) -> "Polynomial":
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = Polynomial.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def derivative(self, i: int) -> "Polynomial":
        return partial_derivative(self, i)

    def __repr__(self) -> str:
        return f"Polynomial({format_poly(self, default_names(self.nvars))!r})"


def default_names(n: int) -> list[str]:
    return [f"x{i + 1}" for i in range(n)]


# -- core operations ----------------------------------------------------------


def partial_derivative(p: Polynomial, i: int) -> Polynomial:
    if not 0 <= i < p.nvars:
        raise IndexError(f"variable index {i} out of range for {p.nvars} variables")
    terms: dict[Monomial, Fraction] = {}
    for m, c in p.items():
        e = m[i]
        if e:
            terms[m[:i] + (e - 1,) + m[i + 1:]] = c * e
    return Polynomial._raw(p.nvars, terms)


def gradient(p: Polynomial, n: int | None = None) -> list[Polynomial]:
    """Partial derivatives with respect to the first ``n`` variables (default: all)."""
    return [partial_derivative(p, i) for i in range(p.nvars if n is None else n)]


def monomial_degree(m: Sequence[int], weights: Sequence[Coefficient]) -> Fraction:
    return sum((e * _frac(w) for e, w in zip(m, weights) if e), Fraction(0))


def homogeneous_degree(p: Polynomial, weights: Sequence[Coefficient]):
    """Common weighted degree of all terms of ``p``.

    Returns :data:`AnyDegree` for the zero polynomial and raises
    :class:`NotHomogeneous` with two witness monomials otherwise.
    """
    if len(weights) != p.nvars:
        raise ArityError(f"{len(weights)} weights for {p.nvars} variables")
    degree = None
    first = None
    for m in sorted(p.monomials(), key=paper_order_key):
        d = monomial_degree(m, weights)
        if degree is None:
            degree, first = d, m
        elif d != degree:
            raise NotHomogeneous(first, m, (degree, d))
    return AnyDegree if degree is None else degree


def is_homogeneous(p: Polynomial, weights: Sequence[Coefficient], degree: Coefficient | None = None) -> bool:
    try:
        d = homogeneous_degree(p, weights)
    except NotHomogeneous:
        return False
    return d is AnyDegree or degree is None or d == degree


def contains_monomial(p: Polynomial, m: Sequence[int]) -> bool:
    if len(m) != p.nvars:
        raise ArityError(f"monomial {tuple(m)} does not have {p.nvars} exponents")
    return bool(p.coefficient(m))


def paper_order_key(m: Sequence[int]) -> tuple[int, ...]:
    """Sort key for the order that compares exponents from the last variable down."""
    return tuple(reversed(m))


def cmp_paper_order(m1: Sequence[int], m2: Sequence[int]) -> int:
    """-1, 0 or 1 as ``m1`` is below, equal to or above ``m2``.

    ``m1 < m2`` iff at the highest index where they differ, ``m1`` has the
    smaller exponent.  This is a total order but not a term order.
    """
    if len(m1) != len(m2):
        raise ArityError("monomials of different arity")
    for a, b in zip(reversed(m1), reversed(m2)):
        if a != b:
            return -1 if a < b else 1
    return 0


def substitute(p: Polynomial, images: Sequence[Polynomial]) -> Polynomial:
    """Apply the ring map ``x_i -> images[i]``; the images may live in another ring."""
    if len(images) != p.nvars:
        raise ArityError(f"{len(images)} images for {p.nvars} variables")
    if not images:
        return p
    target = images[0].nvars
    if any(q.nvars != target for q in images):
        raise ArityError("images have different arities")
    powers: list[dict[int, Polynomial]] = [{} for _ in images]

    def power(i: int, e: int) -> Polynomial:
        cache = powers[i]
        if e not in cache:
            cache[e] = images[i] if e == 1 else power(i, e - 1) * images[i]
        return cache[e]

    acc: dict[Monomial, Fraction] = {}
    for m, c in p.items():
        term = Polynomial.constant(target, c)
        for i, e in enumerate(m):
            if e:
                term = term * power(i, e)
        for tm, tc in term.items():
            acc[tm] = acc.get(tm, 0) + tc
    return Polynomial._raw(target, {m: c for m, c in acc.items() if c})


def content(p: Polynomial) -> Fraction:
    """Positive rational with ``p / content(p)`` primitive with integer coefficients."""
    if not p:
        return Fraction(0)
    num = 0
    den = 1
    for c in p._terms.values():
        num = gcd(num, c.numerator)
        den = den * c.denominator // gcd(den, c.denominator)
    return Fraction(num, den)


# -- grading data -------------------------------------------------------------


@dataclass(frozen=True)
class GradingData:
    """Weight ``s`` of the bracket, conical degrees ``d`` and optional w-weights.

    ``d`` (and ``w``) cover the Poisson variables; extra ring variables such as
    symbolic parameters are treated as having degree 0.
    """

    s: int
    d: tuple[int, ...]
    w: tuple[Fraction, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "d", tuple(int(x) for x in self.d))
        if self.w is not None:
            object.__setattr__(self, "w", tuple(_frac(x) for x in self.w))
            if len(self.w) != len(self.d):
                raise ArityError("w and d must have the same length")
        if self.s <= 0 or any(x <= 0 for x in self.d):
            raise ValueError("s and all degrees must be positive")

    def degree_weights(self, nvars: int) -> list[int]:
        if nvars < len(self.d):
            raise ArityError(f"ring with {nvars} variables is smaller than grading")
        return list(self.d) + [0] * (nvars - len(self.d))

    def w_weights(self, nvars: int) -> list[Fraction]:
        if self.w is None:
            raise ValueError("no w-weights attached")
        return list(self.w) + [Fraction(0)] * (nvars - len(self.w))

    def gcd(self) -> int:
        g = 0
        for x in self.d:
            g = gcd(g, x)
        return g


# -- text format --------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        mt = _TOKEN.match(text, pos)
        if not mt or mt.end() == pos:
            start = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[start]!r}", text, start)
        kind = mt.lastgroup
        tokens.append((kind, mt.group(kind), mt.start(kind)))
        pos = mt.end()
    return tokens


def parse_poly(text: str, var_names: Sequence[str]) -> Polynomial:
    """Parse ``text`` (e.g. ``"x1^2*x3 - 1/2*x5"``) in the ring named by ``var_names``.

    A leading sign is accepted.  Raises :class:`ParseError` with the offending
    position, or :class:`UnknownVariable`.
    """
    index = {name: i for i, name in enumerate(var_names)}
    n = len(var_names)
    tokens = _tokenize(text)
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    def expect_int() -> int:
        nonlocal pos
        tok = peek()
        if tok is None or tok[0] != "int":
            where = tok[2] if tok else len(text)
            raise ParseError("expected integer", text, where)
        pos += 1
        return int(tok[1])

    def factor(exps: list[int]) -> None:
        nonlocal pos
        tok = peek()
        if tok is None or tok[0] != "name":
            where = tok[2] if tok else len(text)
            raise ParseError("expected variable", text, where)
        if tok[1] not in index:
            raise UnknownVariable(f"unknown variable {tok[1]!r}", text, tok[2])
        pos += 1
        e = 1
        nxt = peek()
        if nxt is not None and nxt[1] == "^":
            pos += 1
            e = expect_int()
            if e <= 0:
                raise ParseError("exponent must be positive", text, tokens[pos - 1][2])
        exps[index[tok[1]]] += e

    def term() -> tuple[Monomial, Fraction]:
        nonlocal pos
        exps = [0] * n
        coeff = Fraction(1)
        tok = peek()
        if tok is None:
            raise ParseError("expected term", text, len(text))
        if tok[0] == "int":
            num = expect_int()
            den = 1
            nxt = peek()
            if nxt is not None and nxt[1] == "/":
                pos += 1
                den = expect_int()
                if den == 0:
                    raise ParseError("zero denominator", text, tokens[pos - 1][2])
            coeff = Fraction(num, den)
        else:
            factor(exps)
        while (nxt := peek()) is not None and nxt[1] == "*":
            pos += 1
            factor(exps)
        return tuple(exps), coeff

    acc: dict[Monomial, Fraction] = {}
    sign = 1
    tok = peek()
    if tok is None:
        raise ParseError("empty polynomial", text, 0)
    if tok[1] in "+-" and tok[0] == "op":
        sign = -1 if tok[1] == "-" else 1
        pos += 1
    while True:
        m, c = term()
        acc[m] = acc.get(m, 0) + sign * c
        tok = peek()
        if tok is None:
            break
        if tok[0] == "op" and tok[1] in "+-":
            sign = -1 if tok[1] == "-" else 1
            pos += 1
            continue
        raise ParseError(f"unexpected {tok[1]!r}", text, tok[2])
    return Polynomial(n, acc)


def _format_monomial(m: Monomial, names: Sequence[str]) -> str:
    parts = []
    for name, e in zip(names, m):
        if e == 1:
            parts.append(name)
        elif e:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def format_poly(p: Polynomial, var_names: Sequence[str]) -> str:
    """Terms in descending paper order, unit coefficients elided, rationals as p/q."""
    if len(var_names) != p.nvars:
        raise ArityError(f"{len(var_names)} names for {p.nvars} variables")
    if not p:
        return "0"
    out = []
    for m in sorted(p.monomials(), key=paper_order_key, reverse=True):
        c = p.coefficient(m)
        mono = _format_monomial(m, var_names)
        mag = abs(c)
        if not mono:
            body = str(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{mag}*{mono}"
        if not out:
            out.append(f"-{body}" if c < 0 else body)
        else:
            out.append(f"- {body}" if c < 0 else f"+ {body}")
    return " ".join(out)


@dataclass(frozen=True)
class PolyRing:
    """Variable names for a polynomial ring over Q."""

    names: tuple[str, ...]
    _index: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __init__(self, names: Iterable[str] | str):
        if isinstance(names, str):
            names = names.replace(",", " ").split()
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(names)})

    @classmethod
    def default(cls, n: int) -> "PolyRing":
        return cls(default_names(n))

    @property
    def nvars(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        return self._index[name]

    def gens(self) -> list[Polynomial]:
        return [Polynomial.variable(self.nvars, i) for i in range(self.nvars)]

    def var(self, name: str) -> Polynomial:
        return Polynomial.variable(self.nvars, self.index(name))

    def __getitem__(self, name: str) -> Polynomial:
        return self.var(name)

    def const(self, c: Coefficient) -> Polynomial:
        return Polynomial.constant(self.nvars, c)

    def zero(self) -> Polynomial:
        return Polynomial.zero(self.nvars)

    def parse(self, text: str) -> Polynomial:
        return parse_poly(text, self.names)

    def format(self, p: Polynomial) -> str:
        return format_poly(p, self.names)

    def extend(self, *names: str) -> "PolyRing":
        return PolyRing(self.names + tuple(names))

    def embed(self, p: Polynomial, target: "PolyRing") -> Polynomial:
        """Map ``p`` into ``target`` by variable name."""
        pos = [target.index(n) for n in self.names]
        terms = {}
        for m, c in p.items():
            e = [0] * target.nvars
            for i, k in enumerate(m):
                if k:
                    e[pos[i]] += k
            terms[tuple(e)] = c
        return Polynomial(target.nvars, terms)

