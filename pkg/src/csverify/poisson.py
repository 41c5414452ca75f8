"""Poisson matrices, brackets, Jacobiators and the Pfaffian condition.

Indices are 0-based in the Python API.  Entry labels in reports and the keys
of the JSON format are 1-based, matching the usual ``Theta[i,j]`` notation.

The first ``n`` ring variables are the Poisson variables.  Any further ring
variables are parameters (symbolic constants): they bracket to zero with
everything.
"""

from __future__ import annotations

import json
from fractions import Fraction
from itertools import combinations
from pathlib import Path
from typing import Mapping, Sequence

from .poly import (
    AnyDegree,
    ArityError,
    GradingData,
    NotHomogeneous,
    Polynomial,
    PolyRing,
    gradient,
    homogeneous_degree,
)
from .report import Check, check, shorten


class NotSkew(ValueError):
    pass


class PfaffianMismatch(ValueError):
    """No single scalar relates grad(f) and the Pfaffian vector."""

    def __init__(self, component: int, gradient_entry: Polynomial, pfaffian_entry: Polynomial, reason: str):
        super().__init__(f"component {component + 1}: {reason}")
        self.component = component
        self.gradient_entry = gradient_entry
        self.pfaffian_entry = pfaffian_entry


class PoissonMatrix:
    """Skew matrix ``Theta[i][j] = {x_i, x_j}`` over a :class:`PolyRing`.

    Only the strict upper triangle is stored.  ``grading`` is optional and is
    used by the degree checks.
    """

    __slots__ = ("ring", "n", "_upper", "grading")

    def __init__(
        self,
        ring: PolyRing,
        entries: Mapping[tuple[int, int], Polynomial | str],
        n: int | None = None,
        grading: GradingData | None = None,
    ):
        self.ring = ring
        self.n = ring.nvars if n is None else n
        if not 0 < self.n <= ring.nvars:
            raise ArityError(f"{self.n} Poisson variables in a ring of {ring.nvars}")
        upper: dict[tuple[int, int], Polynomial] = {}
        for (i, j), v in entries.items():
            if not (0 <= i < self.n and 0 <= j < self.n) or i == j:
                raise IndexError(f"bad entry index ({i}, {j})")
            p = ring.parse(v) if isinstance(v, str) else v
            if p.nvars != ring.nvars:
                raise ArityError("entry lives in a different ring")
            if i > j:
                i, j, p = j, i, -p
            if (i, j) in upper and upper[(i, j)] != p:
                raise NotSkew(f"conflicting values for entry ({i + 1},{j + 1})")
            if p:
                upper[(i, j)] = p
        self._upper = upper
        self.grading = grading

    @classmethod
    def from_rows(cls, ring: PolyRing, rows: Sequence[Sequence[Polynomial | str | int]], grading=None) -> "PoissonMatrix":
        """Build from a full square matrix, rejecting anything that is not skew."""
        n = len(rows)
        mat = [[_coerce(ring, v) for v in row] for row in rows]
        if any(len(r) != n for r in mat):
            raise ValueError("matrix is not square")
        for i in range(n):
            if mat[i][i]:
                raise NotSkew(f"nonzero diagonal entry at ({i + 1},{i + 1})")
            for j in range(i + 1, n):
                if mat[j][i] != -mat[i][j]:
                    raise NotSkew(f"entries ({i + 1},{j + 1}) and ({j + 1},{i + 1}) are not opposite")
        entries = {(i, j): mat[i][j] for i in range(n) for j in range(i + 1, n)}
        return cls(ring, entries, n=n, grading=grading)

    @property
    def nvars(self) -> int:
        return self.ring.nvars

    def entry(self, i: int, j: int) -> Polynomial:
        if i == j:
            return self.ring.zero()
        if i < j:
            return self._upper.get((i, j)) or self.ring.zero()
        p = self._upper.get((j, i))
        return -p if p is not None else self.ring.zero()

    def __getitem__(self, ij: tuple[int, int]) -> Polynomial:
        return self.entry(*ij)

    def upper_items(self):
        """Nonzero entries ``((i, j), value)`` with ``i < j``, in index order."""
        return sorted(self._upper.items())

    def rows(self) -> list[list[Polynomial]]:
        return [[self.entry(i, j) for j in range(self.n)] for i in range(self.n)]

    def map_entries(self, fn) -> "PoissonMatrix":
        return PoissonMatrix(self.ring, {ij: fn(v) for ij, v in self._upper.items()}, n=self.n, grading=self.grading)

    def with_entry(self, i: int, j: int, value: Polynomial | str) -> "PoissonMatrix":
        entries = dict(self._upper)
        if i > j:
            i, j = j, i
            value = -_coerce(self.ring, value)
        entries[(i, j)] = _coerce(self.ring, value)
        return PoissonMatrix(self.ring, entries, n=self.n, grading=self.grading)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PoissonMatrix):
            return NotImplemented
        return self.n == other.n and self.ring == other.ring and self._upper == other._upper

    def __repr__(self) -> str:
        body = ", ".join(f"({i + 1},{j + 1}): {self.ring.format(v)}" for (i, j), v in self.upper_items())
        return f"PoissonMatrix({body})"

    # -- serialization ---------------------------------------------------------

    def to_json_dict(self) -> dict:
        out: dict = {"vars": list(self.ring.names[: self.n])}
        if self.nvars > self.n:
            out["params"] = list(self.ring.names[self.n:])
        if self.grading is not None:
            out["s"] = self.grading.s
            out["d"] = list(self.grading.d)
        out["entries"] = {f"{i + 1},{j + 1}": self.ring.format(v) for (i, j), v in self.upper_items()}
        return out

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "PoissonMatrix":
        names = list(data["vars"])
        n = len(names)
        ring = PolyRing(names + list(data.get("params", [])))
        grading = None
        if "s" in data and "d" in data:
            grading = GradingData(int(data["s"]), tuple(data["d"]))
        entries = {}
        for key, text in data["entries"].items():
            i, j = (int(k) for k in key.split(","))
            if not 1 <= i < j <= n:
                raise ValueError(f"entry key {key!r} must satisfy 1 <= i < j <= {n}")
            entries[(i - 1, j - 1)] = ring.parse(text)
        return cls(ring, entries, n=n, grading=grading)


def _coerce(ring: PolyRing, v) -> Polynomial:
    if isinstance(v, Polynomial):
        return v
    if isinstance(v, str):
        return ring.parse(v)
    return ring.const(v)


def load_poisson_json(path: str | Path) -> PoissonMatrix:
    return PoissonMatrix.from_json_dict(json.loads(Path(path).read_text()))


def dump_poisson_json(theta: PoissonMatrix) -> str:
    return json.dumps(theta.to_json_dict(), indent=2)


# -- brackets ------------------------------------------------------------------


def bracket(theta: PoissonMatrix, f: Polynomial, g: Polynomial) -> Polynomial:
    """``{f, g} = sum_{i,j} df/dx_i dg/dx_j Theta[i,j]``."""
    if f.nvars != theta.nvars or g.nvars != theta.nvars:
        raise ArityError("bracket operands live in a different ring")
    df = gradient(f, theta.n)
    dg = gradient(g, theta.n)
    acc = Polynomial.zero(theta.nvars)
    for (i, j), t in theta.upper_items():
        cross = df[i] * dg[j] - df[j] * dg[i]
        if cross:
            acc = acc + t * cross
    return acc


def bracket_with_var(theta: PoissonMatrix, i: int, g: Polynomial) -> Polynomial:
    """``{x_i, g} = sum_j dg/dx_j Theta[i,j]``."""
    acc = Polynomial.zero(theta.nvars)
    for j in range(theta.n):
        if j == i:
            continue
        t = theta.entry(i, j)
        if t:
            dg = g.derivative(j)
            if dg:
                acc = acc + t * dg
    return acc


def jacobiator(theta: PoissonMatrix, i: int, j: int, k: int) -> Polynomial:
    if len({i, j, k}) != 3 or not all(0 <= a < theta.n for a in (i, j, k)):
        raise IndexError(f"jacobiator needs three distinct indices below {theta.n}")
    return (
        bracket_with_var(theta, i, theta.entry(j, k))
        + bracket_with_var(theta, j, theta.entry(k, i))
        + bracket_with_var(theta, k, theta.entry(i, j))
    )


def jacobiators(theta: PoissonMatrix) -> dict[tuple[int, int, int], Polynomial]:
    return {ijk: jacobiator(theta, *ijk) for ijk in combinations(range(theta.n), 3)}


def jacobi_checks(theta: PoissonMatrix) -> list[Check]:
    out = []
    for (i, j, k), J in jacobiators(theta).items():
        out.append(check(f"J[{i + 1},{j + 1},{k + 1}]", J.is_zero(), shorten(theta.ring.format(J))))
    return out


# -- Pfaffians -------------------------------------------------------------------


def pfaffian(mat: Sequence[Sequence[Polynomial]], indices: Sequence[int] | None = None):
    """Pfaffian of the principal submatrix on ``indices`` by expansion along the first row."""
    idx = list(range(len(mat))) if indices is None else list(indices)
    if len(idx) % 2:
        raise ValueError("Pfaffian of an odd-size matrix")
    if not idx:
        return 1
    first, rest = idx[0], idx[1:]
    acc = None
    for pos, j in enumerate(rest):
        a = mat[first][j]
        if not a:
            continue
        sub = pfaffian(mat, rest[:pos] + rest[pos + 1:])
        term = a * sub
        if pos % 2:
            term = -term
        acc = term if acc is None else acc + term
    if acc is None:
        return 0 * mat[first][rest[0]]
    return acc


def pfaffian_vector(theta: PoissonMatrix) -> list[Polynomial]:
    """Component ``i`` (0-based) is ``(-1)^i`` times the Pfaffian with row/column ``i`` removed."""
    if theta.n % 2 == 0:
        raise ValueError("Pfaffian vector needs an odd number of variables")
    mat = theta.rows()
    out = []
    for i in range(theta.n):
        rest = [r for r in range(theta.n) if r != i]
        p = pfaffian(mat, rest)
        if not isinstance(p, Polynomial):
            p = theta.ring.const(p)
        out.append(-p if i % 2 else p)
    return out


def check_pfaffian_condition(theta: PoissonMatrix, f: Polynomial) -> Fraction:
    """The unique rational ``lam`` with ``lam * grad(f) == pfaffian_vector(theta)``.

    Raises :class:`PfaffianMismatch` naming the first component that breaks
    proportionality.
    """
    if f.nvars != theta.nvars:
        raise ArityError("f lives in a different ring")
    if not f:
        raise ValueError("f must be nonzero")
    grad = gradient(f, theta.n)
    pf = pfaffian_vector(theta)
    lam = None
    for i, (g, p) in enumerate(zip(grad, pf)):
        if not g and not p:
            continue
        if not g or not p:
            raise PfaffianMismatch(i, g, p, "exactly one side vanishes")
        m = max(g.monomials())
        ratio = p.coefficient(m) / g.coefficient(m)
        if lam is None:
            lam = ratio
        if ratio != lam or g.scale(lam) != p:
            raise PfaffianMismatch(i, g, p, "not proportional with a common scalar")
    if lam is None:
        raise PfaffianMismatch(0, grad[0], pf[0], "gradient vanishes identically")
    return lam


def kernel_check(theta: PoissonMatrix, v: Sequence[Polynomial]) -> bool:
    """True iff ``Theta . v == 0``."""
    if len(v) != theta.n:
        raise ArityError(f"vector of length {len(v)} for {theta.n} variables")
    for i in range(theta.n):
        acc = Polynomial.zero(theta.nvars)
        for j in range(theta.n):
            t = theta.entry(i, j)
            if t and v[j]:
                acc = acc + t * v[j]
        if acc:
            return False
    return True


# -- grading checks ----------------------------------------------------------------


def check_degree_homogeneity(
    theta: PoissonMatrix, grading: GradingData | None = None, f: Polynomial | None = None
) -> list[Check]:
    """Per-entry checks that ``Theta[i,j]`` is homogeneous of degree ``d_i + d_j - s``.

    When ``f`` is given also checks ``deg f = sum(d) - 2s`` for five variables,
    and in general ``deg f = sum(d) - (n - 1) s / 2``.
    """
    grading = grading or theta.grading
    if grading is None:
        raise ValueError("no grading supplied")
    if len(grading.d) != theta.n:
        raise ArityError(f"{len(grading.d)} degrees for {theta.n} variables")
    weights = grading.degree_weights(theta.nvars)
    d, s = grading.d, grading.s
    out = []
    for i in range(theta.n):
        for j in range(i + 1, theta.n):
            t = theta.entry(i, j)
            want = d[i] + d[j] - s
            name = f"deg Theta[{i + 1},{j + 1}]"
            try:
                got = homogeneous_degree(t, weights)
            except NotHomogeneous as exc:
                out.append(check(name, False, str(exc)))
                continue
            ok = got is AnyDegree or got == want
            out.append(check(name, ok, f"degree {got}, expected {want}"))
    if f is not None:
        want = Fraction(sum(d)) - Fraction((theta.n - 1) * s, 2)
        try:
            got = homogeneous_degree(f, weights)
            out.append(check("deg f", got is not AnyDegree and got == want, f"degree {got}, expected {want}"))
        except NotHomogeneous as exc:
            out.append(check("deg f", False, str(exc)))
    return out


def surface_bracket_from_f(f: Polynomial, ring: PolyRing | None = None, grading: GradingData | None = None) -> PoissonMatrix:
    """The 3x3 matrix with ``Theta[1,2]=df/dz``, ``Theta[1,3]=-df/dy``, ``Theta[2,3]=df/dx``."""
    if f.nvars != 3:
        raise ArityError("surface brackets need exactly three variables")
    ring = ring or PolyRing("x y z")
    fx, fy, fz = gradient(f)
    return PoissonMatrix(ring, {(0, 1): fz, (0, 2): -fy, (1, 2): fx}, grading=grading)
