"""Lie algebras given by structure constants."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import cached_property

import numpy as np

from .exact import (Field, QF, format_scalar, is_prime, kernel_basis, parse_fraction, rank,
                    rref, batch_rank_mod_p)

DEFAULT_BUDGET = 10**8


class BudgetExceeded(RuntimeError):
    pass


class AmbiguousFit(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    """Finite-dimensional Lie algebra with a distinguished basis.

    ``brackets`` maps (i, j) with i < j to a tuple of (k, coefficient)
    pairs giving [b_i, b_j]; antisymmetry is synthesized.
    """

    name: str
    basis: tuple
    field: Field
    brackets: dict = dc_field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @cached_property
    def table(self):
        n = self.dim
        t = [[() for _ in range(n)] for _ in range(n)]
        for (i, j), terms in self.brackets.items():
            t[i][j] = tuple((k, self.field(c)) for k, c in terms)
            t[j][i] = tuple((k, -self.field(c)) for k, c in terms)
        return t

    @cached_property
    def tensor(self) -> np.ndarray:
        """Dense integer structure tensor T[i, j, k] (prime fields only)."""
        if self.field.kind != "Fp":
            raise TypeError("dense integer tensor only for prime fields")
        n = self.dim
        T = np.zeros((n, n, n), dtype=np.int64)
        for i in range(n):
            for j in range(n):
                for k, c in self.table[i][j]:
                    T[i, j, k] = int(c)
        return T

    def zero(self) -> "Element":
        return Element(self, (self.field.zero,) * self.dim)

    def basis_element(self, i: int) -> "Element":
        z, o = self.field.zero, self.field.one
        return Element(self, tuple(o if k == i else z for k in range(self.dim)))

    def element(self, coords) -> "Element":
        if len(coords) != self.dim:
            raise ValueError(f"{self.name}: expected {self.dim} coordinates, got {len(coords)}")
        return Element(self, tuple(self.field(c) for c in coords))

    def from_dict(self, d: dict) -> "Element":
        """Element from {basis label or index: coefficient}."""
        c = [0] * self.dim
        for key, v in d.items():
            c[key if isinstance(key, int) else self.basis.index(key)] = v
        return self.element(c)

    def check_antisymmetry(self) -> bool:
        n = self.dim
        for i in range(n):
            if self.table[i][i]:
                return False
            for j in range(n):
                a = dict(self.table[i][j])
                b = dict(self.table[j][i])
                if set(a) != set(b) or any(a[k] != -b[k] for k in a):
                    return False
        return True

    def jacobi_defect(self):
        """First triple violating Jacobi, or None."""
        n = self.dim
        for i, j, k in itertools.combinations(range(n), 3):
            bi, bj, bk = (self.basis_element(t) for t in (i, j, k))
            s = bracket(bi, bracket(bj, bk)) + bracket(bj, bracket(bk, bi)) + bracket(bk, bracket(bi, bj))
            if not s.is_zero():
                return (i, j, k)
        return None

    def over(self, fld: Field) -> "LieAlgebra":
        """Reduce integral structure constants to another field."""
        br = {}
        for key, terms in self.brackets.items():
            kept = tuple((k, fld(c)) for k, c in terms if fld(c) != 0)
            if kept:
                br[key] = kept
        return LieAlgebra(self.name, self.basis, fld, br)

    def subalgebra(self, indices, name: str) -> "LieAlgebra":
        """Subalgebra spanned by a subset of basis vectors (must be closed)."""
        idx = list(indices)
        pos = {k: t for t, k in enumerate(idx)}
        br = {}
        for a, b in itertools.combinations(range(len(idx)), 2):
            terms = self.table[idx[a]][idx[b]]
            if any(k not in pos for k, _ in terms):
                raise ValueError(f"span of {idx} is not closed under the bracket")
            if terms:
                br[(a, b)] = tuple((pos[k], c) for k, c in terms)
        return LieAlgebra(name, tuple(self.basis[k] for k in idx), self.field, br)


@dataclass(frozen=True, eq=False)
class Element:
    parent: LieAlgebra
    coords: tuple

    def _same(self, o):
        if not isinstance(o, Element) or o.parent.name != self.parent.name or o.parent.dim != self.parent.dim:
            raise ValueError("elements of different algebras")

    def __add__(self, o):
        self._same(o)
        return Element(self.parent, tuple(a + b for a, b in zip(self.coords, o.coords)))

    def __sub__(self, o):
        self._same(o)
        return Element(self.parent, tuple(a - b for a, b in zip(self.coords, o.coords)))

    def __neg__(self):
        return Element(self.parent, tuple(-a for a in self.coords))

    def __rmul__(self, s):
        return Element(self.parent, tuple(s * a for a in self.coords))

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def support(self) -> tuple:
        return tuple(i for i, c in enumerate(self.coords) if c != 0)

    def __eq__(self, o):
        return (isinstance(o, Element) and o.parent.name == self.parent.name
                and self.coords == o.coords)

    def __hash__(self):
        return hash((self.parent.name, self.coords))

    def __str__(self):
        terms = []
        for lab, c in zip(self.parent.basis, self.coords):
            if c == 0:
                continue
            if c == 1:
                terms.append(str(lab))
            elif c == -1:
                terms.append(f"-{lab}")
            else:
                terms.append(f"{format_scalar(c)}*{lab}")
        return " + ".join(terms).replace("+ -", "- ") if terms else "0"

    __repr__ = __str__


def bracket(x: Element, y: Element) -> Element:
    x._same(y)
    g = x.parent
    out = [g.field.zero] * g.dim
    # the coordinates may live in a larger ring (e.g. rational functions)
    for i, a in enumerate(x.coords):
        if a == 0:
            continue
        for j, b in enumerate(y.coords):
            if b == 0:
                continue
            for k, c in g.table[i][j]:
                out[k] = a * b * c + out[k]
    return Element(g, tuple(out))


def ad_matrix(x: Element, domain=None):
    """Rows = output coordinates, columns = images of the domain vectors."""
    g = x.parent
    if domain is None:
        domain = [g.basis_element(i) for i in range(g.dim)]
    cols = [bracket(x, v).coords for v in domain]
    return [[cols[j][k] for j in range(len(domain))] for k in range(g.dim)]


def ad_rank(x: Element) -> int:
    return rank(ad_matrix(x), x.parent.dim)


def centralizer(x: Element, sub=None) -> list:
    """Echelon basis of C_sub(x); sub defaults to the whole algebra."""
    g = x.parent
    if sub is None:
        sub = [g.basis_element(i) for i in range(g.dim)]
    if not sub:
        return []
    m = ad_matrix(x, sub)
    ker = kernel_basis(m, len(sub), one=g.field.one)
    vecs = []
    for v in ker:
        w = [g.field.zero] * g.dim
        for c, s in zip(v, sub):
            if c != 0:
                w = [a + c * b for a, b in zip(w, s.coords)]
        vecs.append(w)
    red, _ = rref(vecs, g.dim) if vecs else ([], [])
    return [Element(g, tuple(r)) for r in red]


def span_basis(vectors, g: LieAlgebra) -> list:
    rows = [v.coords for v in vectors if not v.is_zero()]
    if not rows:
        return []
    red, _ = rref(rows, g.dim)
    return [Element(g, tuple(r)) for r in red]


def in_span(v: Element, basis) -> bool:
    if v.is_zero():
        return True
    rows = [b.coords for b in basis]
    return rank(rows + [v.coords], v.parent.dim) == rank(rows, v.parent.dim) if rows else False


def central_series(g: LieAlgebra) -> list:
    """[g^1, g^2, ...] as echelon bases, ending with the zero space."""
    full = [g.basis_element(i) for i in range(g.dim)]
    series = [span_basis(full, g)]
    for _ in range(g.dim + 1):
        cur = series[-1]
        if not cur:
            return series
        nxt = span_basis([bracket(a, b) for a in full for b in cur], g)
        if len(nxt) == len(cur):
            raise ValueError(f"{g.name} is not nilpotent")
        series.append(nxt)
    raise ValueError(f"{g.name} is not nilpotent")


# --- enumeration over F_p -----------------------------------------------------


def enumerate_points(n: int, p: int, start: int = 0, stop: int | None = None) -> np.ndarray:
    """Coordinates of points start..stop-1 of F_p^n in odometer order."""
    stop = p**n if stop is None else stop
    idx = np.arange(start, stop, dtype=np.int64)
    out = np.empty((idx.size, n), dtype=np.int64)
    for k in range(n - 1, -1, -1):
        out[:, k] = idx % p
        idx //= p
    return out


def ad_stack(g: LieAlgebra, pts: np.ndarray) -> np.ndarray:
    """ad matrices (N, dim, dim) of the given points, entries mod p."""
    return np.einsum("ni,ijk->nkj", pts, g.tensor) % g.field.p


def ad_rank_table(g: LieAlgebra, budget: int = DEFAULT_BUDGET, chunk: int = 1 << 15) -> np.ndarray:
    """rk(ad x) for every x in g(F_p), in odometer order."""
    p = g.field.p
    total = p**g.dim
    if total > budget:
        raise BudgetExceeded(f"{g.name}: {total} elements exceeds budget {budget}")
    out = np.empty(total, dtype=np.int64)
    for s in range(0, total, chunk):
        pts = enumerate_points(g.dim, p, s, min(total, s + chunk))
        out[s:s + len(pts)] = batch_rank_mod_p(ad_stack(g, pts), p)
    return out


@dataclass
class StratumReport:
    n: int
    counts: dict = dc_field(default_factory=dict)
    dim: int = -1
    witnesses: list = dc_field(default_factory=list)


def strata_census(g: LieAlgebra, budget: int = DEFAULT_BUDGET, witnesses: bool = True) -> list:
    """Bin g(F_p) by rk(ad x)."""
    p = g.field.p
    ranks = ad_rank_table(g, budget)
    out = []
    for n in range(g.dim + 1):
        hits = np.nonzero(ranks == n)[0]
        if hits.size == 0:
            continue
        rep = StratumReport(n, {p: int(hits.size)})
        if witnesses:
            rep.witnesses.append(g.element([int(c) for c in enumerate_points(g.dim, p, int(hits[0]), int(hits[0]) + 1)[0]]))
        out.append(rep)
    return out


def fit_degree(counts: dict) -> int:
    """Degree of the polynomial through (q, count) pairs, confirmed by a spare point.

    Raises AmbiguousFit when the data cannot pin the degree.
    """
    from .census import interpolate
    qs = sorted(counts)
    if len(qs) < 2:
        raise AmbiguousFit("need counts at two or more primes")
    poly = interpolate([(q, counts[q]) for q in qs[:-1]])
    q = qs[-1]
    if sum(c * q**k for k, c in enumerate(poly)) != counts[q]:
        raise AmbiguousFit(f"counts {counts} not fit by a polynomial of degree < {len(qs) - 1}")
    return len(poly) - 1


def merge_strata(reports_by_prime) -> list:
    merged = {}
    for reports in reports_by_prime:
        for r in reports:
            m = merged.setdefault(r.n, StratumReport(r.n))
            m.counts.update(r.counts)
            m.witnesses.extend(r.witnesses)
            if r.dim >= 0:
                m.dim = r.dim
    return [merged[n] for n in sorted(merged)]


def modality_from_strata(reports) -> int:
    """max over non-empty strata of (dim - n)."""
    best = None
    for r in reports:
        d = r.dim if r.dim >= 0 else fit_degree(r.counts)
        best = d - r.n if best is None else max(best, d - r.n)
    if best is None:
        raise ValueError("no strata given")
    return best


# --- constructors and IO ------------------------------------------------------


def abelian(n: int, fld: Field = QF) -> LieAlgebra:
    return LieAlgebra(f"abelian{n}", tuple(f"v{i + 1}" for i in range(n)), fld, {})


def heisenberg(fld: Field = QF) -> LieAlgebra:
    """Three-dimensional Heisenberg algebra [x, y] = z."""
    return LieAlgebra("heisenberg", ("x", "y", "z"), fld, {(0, 1): ((2, 1),)})


WITT_KINDS = {"witt": -1, "witt-b": 0, "witt-u": 1}


def witt(p: int, start: int = -1) -> LieAlgebra:
    """The filtration piece W(1)_start of the Witt algebra over F_p.

    Basis e_start .. e_{p-2} with [e_i, e_j] = (j - i) e_{i+j}, zero when i + j > p - 2.
    """
    if p < 5 or not is_prime(p):
        raise ValueError(f"the Witt algebra is built for primes p >= 5, got {p}")
    if not -1 <= start <= p - 2:
        raise ValueError(f"filtration index {start} out of range")
    idx = list(range(start, p - 1))
    fld = Field("Fp", p)
    br = {}
    for a, i in enumerate(idx):
        for b in range(a + 1, len(idx)):
            j = idx[b]
            if i + j <= p - 2 and (j - i) % p:
                br[(a, b)] = ((idx.index(i + j), fld(j - i)),)
    name = {-1: "witt", 0: "witt-b", 1: "witt-u"}.get(start, f"witt{start}")
    return LieAlgebra(f"{name}:{p}", tuple(f"e{i}" for i in idx), fld, br)


def from_matrices(name: str, labels, mats, fld: Field = QF) -> LieAlgebra:
    """Structure constants of a matrix Lie algebra given by a basis of integer matrices."""
    flat = [[Fraction(int(v)) for v in np.asarray(m).ravel()] for m in mats]
    n = len(mats)
    cols = [[flat[j][r] for j in range(n)] for r in range(len(flat[0]))]
    red, piv = rref(cols, n)
    if len(piv) != n:
        raise ValueError("matrices are linearly dependent")
    br = {}
    for i, j in itertools.combinations(range(n), 2):
        c = np.asarray(mats[i]) @ np.asarray(mats[j]) - np.asarray(mats[j]) @ np.asarray(mats[i])
        coords = _coords_in(c, flat)
        terms = tuple((k, v) for k, v in enumerate(coords) if v != 0)
        if terms:
            br[(i, j)] = terms
    g = LieAlgebra(name, tuple(labels), QF, br)
    return g if fld == QF else g.over(fld)


def _coords_in(m, flat):
    from .exact import solve
    n = len(flat)
    target = [Fraction(int(v)) for v in np.asarray(m).ravel()]
    rows = [[flat[j][r] for j in range(n)] for r in range(len(target))]
    sol = solve(rows, target, n)
    if sol is None:
        raise ValueError("commutator leaves the span: not a Lie algebra")
    return sol


def to_json(g: LieAlgebra, grading: dict | None = None) -> dict:
    br = []
    for (i, j) in sorted(g.brackets):
        br.append({"i": i, "j": j, "coords": [[k, format_scalar(c)] for k, c in g.brackets[(i, j)]]})
    d = {"name": g.name, "dim": g.dim, "field": g.field.to_json(), "basis": list(g.basis), "brackets": br}
    if grading is not None:
        d["grading"] = grading
    return d


def from_json(d: dict, check: bool = True) -> LieAlgebra:
    fld = Field.from_json(d["field"])
    if len(d["basis"]) != d["dim"]:
        raise ValueError("basis length does not match dim")
    br = {}
    for e in d["brackets"]:
        i, j = int(e["i"]), int(e["j"])
        if not 0 <= i < j < d["dim"]:
            raise ValueError(f"bracket entry ({i},{j}) must satisfy 0 <= i < j < dim")
        br[(i, j)] = tuple((int(k), fld(parse_fraction(c))) for k, c in e["coords"])
    g = LieAlgebra(d["name"], tuple(d["basis"]), fld, br)
    if check:
        bad = g.jacobi_defect()
        if bad is not None:
            raise ValueError(f"{g.name}: Jacobi identity fails on basis triple {bad}")
    return g


def load(path) -> LieAlgebra:
    with open(path) as fh:
        return from_json(json.load(fh))
