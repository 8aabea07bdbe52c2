"""Finite-field point counts of commuting varieties.

The count of commuting pairs is fibred over the first factor:
|C_2(g)(F_q)| = sum over x of q^(dim ker ad x).  Pairs spanning a plane are
counted by removing the dependent pairs; GL_2(F_q) acts simply transitively on
the bases of each plane, so dividing by |GL_2(F_q)| counts abelian planes.
Counts at several primes are interpolated exactly to estimate dimensions.

The Witt chain W(1) > W(1)_0 > W(1)_1 is handled by its own strata analysis:
every rank stratum is a union of filtration layers, which fixes its dimension
without any fitting.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from .exact import Field, batch_rank_mod_p, format_fraction, is_prime, parse_fraction
from .liecore import (DEFAULT_BUDGET, WITT_KINDS, AmbiguousFit, BudgetExceeded, LieAlgebra, abelian,
                      ad_rank_table, ad_stack, centralizer, enumerate_points, heisenberg, witt)
from .rootsys import TYPES, model
from . import golden


class CensusMismatch(RuntimeError):
    """Two independent counts of the same quantity disagree."""


# --- polynomials ----------------------------------------------------------------


def interpolate(points) -> list:
    """Coefficients (low to high, Fractions) of the Lagrange polynomial through the points.

    Trailing zero coefficients are dropped; the zero polynomial is [].
    """
    pts = [(Fraction(x), Fraction(y)) for x, y in points]
    xs = [x for x, _ in pts]
    if len(set(xs)) != len(xs):
        raise ValueError("interpolation nodes must be distinct")
    coeffs = [Fraction(0)] * len(pts)
    for i, (xi, yi) in enumerate(pts):
        basis = [Fraction(1)]
        denom = Fraction(1)
        for j, xj in enumerate(xs):
            if j == i:
                continue
            basis = [Fraction(0)] + basis
            for k in range(len(basis) - 1):
                basis[k] -= xj * basis[k + 1]
            denom *= xi - xj
        for k, c in enumerate(basis):
            coeffs[k] += yi * c / denom
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def poly_eval(coeffs, q) -> Fraction:
    return sum((c * Fraction(q) ** k for k, c in enumerate(coeffs)), Fraction(0))


def poly_str(coeffs, var: str = "q") -> str:
    terms = []
    for k in range(len(coeffs) - 1, -1, -1):
        c = coeffs[k]
        if c == 0:
            continue
        mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
        mag = format_fraction(abs(c))
        body = mag if not mono else (mono if abs(c) == 1 else f"{mag}*{mono}")
        terms.append(("-" if c < 0 else "+", body))
    if not terms:
        return "0"
    s = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for sign, body in terms[1:]:
        s += f" {sign} {body}"
    return s


@dataclass
class DimEstimate:
    dim: int
    method: str                     # interpolation | slope
    poly: list = dc_field(default_factory=list)
    uncertainty: int = 0
    confirmed: bool = False         # a spare prime agreed with the interpolant


def dim_estimate(counts: dict, expected_degree: int | None = None) -> DimEstimate:
    """Dimension from point counts {q: count}.

    Interpolates when there are at least expected_degree + 1 primes (or always
    when no hint is given); otherwise falls back to the log-ratio slope of the
    two largest primes, reported with uncertainty 1.
    """
    qs = sorted(counts)
    if len(qs) < 2:
        raise ValueError("need counts at two or more primes")
    if any(counts[q] == 0 for q in qs):
        raise ValueError("zero point count")
    if expected_degree is None or len(qs) >= expected_degree + 1:
        poly = interpolate([(q, counts[q]) for q in qs])
        confirmed = False
        if len(qs) >= 3:
            sub = interpolate([(q, counts[q]) for q in qs[:-1]])
            confirmed = sub == poly
        return DimEstimate(len(poly) - 1, "interpolation", poly, 0, confirmed)
    q1, q2 = qs[-2], qs[-1]
    slope = math.log(counts[q2] / counts[q1]) / math.log(q2 / q1)
    return DimEstimate(int(round(slope)), "slope", [], 1)


# --- counting ------------------------------------------------------------------


def gl2_order(q: int) -> int:
    return (q * q - 1) * (q * q - q)


def dependent_pairs(n: int, q: int) -> int:
    """Pairs (x, y) in F_q^n spanning at most a line."""
    return q**n + q * (q**n - 1)


def gaussian_binomial(n: int, k: int, q: int) -> int:
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def kernel_histogram(g: LieAlgebra, budget: int = DEFAULT_BUDGET) -> dict:
    """{dim ker ad x: number of x} over g(F_p)."""
    ranks = ad_rank_table(g, budget)
    hist = np.bincount(g.dim - ranks, minlength=g.dim + 1)
    return {k: int(c) for k, c in enumerate(hist) if c}


def count_c2(g: LieAlgebra, budget: int = DEFAULT_BUDGET) -> int:
    """|C_2(g)(F_p)| as the sum of centralizer sizes."""
    q = g.field.p
    return sum(c * q**k for k, c in kernel_histogram(g, budget).items())


def count_c2_pairs(g: LieAlgebra, budget: int = DEFAULT_BUDGET) -> int:
    """|C_2(g)(F_p)| by testing every pair; the slow oracle for small algebras."""
    q = g.field.p
    n = g.dim
    if q ** (2 * n) > budget:
        raise BudgetExceeded(f"{g.name}: {q ** (2 * n)} pairs exceeds budget {budget}")
    pts = enumerate_points(n, q)
    total = 0
    for x in pts:
        # bracket of x with every y at once: [x, y]_k = sum_ij x_i y_j T[i, j, k]
        m = np.einsum("i,ijk->jk", x, g.tensor) % q
        total += int(np.count_nonzero(~(pts.dot(m) % q).any(axis=1)))
    return total


def count_a2(g: LieAlgebra, budget: int = DEFAULT_BUDGET, c2: int | None = None) -> int:
    """Number of two-dimensional abelian subalgebras of g over F_p."""
    q = g.field.p
    c2 = count_c2(g, budget) if c2 is None else c2
    o2 = c2 - dependent_pairs(g.dim, q)
    quo, rem = divmod(o2, gl2_order(q))
    if rem:
        raise CensusMismatch(f"{g.name}: {o2} plane-spanning pairs is not divisible by |GL_2(F_{q})|")
    return quo


@dataclass
class PrimeCount:
    q: int
    c2: int
    dep: int
    o2: int
    a2u: int


def census_point(g: LieAlgebra, budget: int = DEFAULT_BUDGET) -> PrimeCount:
    q = g.field.p
    c2 = count_c2(g, budget)
    dep = dependent_pairs(g.dim, q)
    return PrimeCount(q, c2, dep, c2 - dep, count_a2(g, budget, c2))


# --- algebras by name --------------------------------------------------------------


def parse_algebra(spec: str):
    """Split an algebra id into (kind, parameter): "A2", "heisenberg", "abelian:3", "witt-u:7"."""
    kind, _, arg = spec.partition(":")
    if kind in TYPES and not arg:
        return kind, None
    if kind == "heisenberg" and not arg:
        return kind, None
    if kind == "abelian" and arg.isdigit() and int(arg) >= 1:
        return kind, int(arg)
    if kind in WITT_KINDS and arg.isdigit() and int(arg) >= 5 and is_prime(int(arg)):
        return kind, int(arg)
    raise ValueError(f"unknown algebra {spec!r}")


def algebra_over(spec: str, p: int) -> LieAlgebra:
    kind, arg = parse_algebra(spec)
    f = Field("Fp", p)
    if kind in TYPES:
        return model(kind).u.over(f)
    if kind == "heisenberg":
        return heisenberg(f)
    if kind == "abelian":
        return abelian(arg, f)
    if p != arg:
        raise ValueError(f"{spec} is only defined over F_{arg}")
    return witt(arg, WITT_KINDS[kind])


def expected_c2_dim(spec: str) -> int | None:
    """The dimension the counts are checked against."""
    kind, arg = parse_algebra(spec)
    if kind in TYPES:
        return golden.DIM_B[kind]          # dim B - dim Z(G) + mod(B; u), with mod = 0
    if kind == "heisenberg":
        return 5
    if kind == "abelian":
        return 2 * arg
    return golden.WITT_C2_DIM[kind](arg)


@dataclass
class CensusReport:
    algebra: str
    primes: list
    c2: list
    dep: list
    o2: list
    a2u: list
    poly: list = dc_field(default_factory=list)          # Fractions, low to high
    a2u_poly: list = dc_field(default_factory=list)
    dim: int = -1
    method: str = ""
    expected_dim: int | None = None
    consistent: bool = True

    @property
    def verdict(self) -> str:
        if self.expected_dim is None:
            return "n/a"
        return "PASS" if self.consistent and self.dim == self.expected_dim else "FAIL"

    def to_json(self) -> dict:
        return {
            "algebra": self.algebra,
            "primes": list(self.primes),
            "c2": [str(c) for c in self.c2],
            "dep": [str(c) for c in self.dep],
            "o2": [str(c) for c in self.o2],
            "a2u": [str(c) for c in self.a2u],
            "poly": [format_fraction(c) for c in self.poly],
            "a2u_poly": [format_fraction(c) for c in self.a2u_poly],
            "dim": self.dim,
            "method": self.method,
            "expected_dim": self.expected_dim,
            "consistent": self.consistent,
            "verdict": self.verdict,
        }

    @classmethod
    def from_json(cls, d: dict) -> "CensusReport":
        return cls(
            algebra=d["algebra"],
            primes=list(d["primes"]),
            c2=[int(c) for c in d["c2"]],
            dep=[int(c) for c in d["dep"]],
            o2=[int(c) for c in d["o2"]],
            a2u=[int(c) for c in d["a2u"]],
            poly=[parse_fraction(c) for c in d["poly"]],
            a2u_poly=[parse_fraction(c) for c in d["a2u_poly"]],
            dim=d["dim"],
            method=d["method"],
            expected_dim=d["expected_dim"],
            consistent=d["consistent"],
        )


def run_census(spec: str, primes=None, budget: int = DEFAULT_BUDGET, records=None) -> CensusReport:
    """Counts at each prime plus a dimension verdict.

    Interpolation is used when the primes can pin the degree; otherwise the
    root types fall back to the orbit formula max(orbit_dim + cent_u), and the
    Witt algebras to their strata formula.
    """
    kind, arg = parse_algebra(spec)
    if kind in WITT_KINDS:
        primes = [arg]
    elif primes is None:
        primes = list(golden.DEFAULT_PRIMES.get(kind, (2, 3, 5)))
    primes = sorted(primes)
    points = [census_point(algebra_over(spec, p), budget) for p in primes]
    rep = CensusReport(spec, primes, [c.c2 for c in points], [c.dep for c in points], [c.o2 for c in points],
                       [c.a2u for c in points], expected_dim=expected_c2_dim(spec))
    g = algebra_over(spec, primes[0])
    degree_hint = 2 * g.dim
    if kind in WITT_KINDS:
        w = witt_analysis(kind, arg, budget)
        rep.dim, rep.method = w.c2_dim, "strata"
        rep.consistent = w.kernel_table_ok is not False and w.exact
        return rep
    if len(primes) >= 2:
        est = dim_estimate({c.q: c.c2 for c in points}, rep.expected_dim)
        if est.method == "interpolation":
            rep.poly, rep.dim, rep.method = est.poly, est.dim, "interpolation"
            rep.consistent = all(poly_eval(est.poly, c.q) == c.c2 for c in points)
        rep.a2u_poly = interpolate([(c.q, c.a2u) for c in points])
    if rep.method != "interpolation":
        if kind in TYPES:
            from .orbits import discover_reps
            recs = records if records is not None else discover_reps(kind)
            rep.dim = max(r.orbit_dim + r.cent_u for r in recs)
            rep.method = "orbit-formula"
        elif len(primes) >= 2:
            est = dim_estimate({c.q: c.c2 for c in points}, degree_hint + 1)
            rep.dim, rep.method = est.dim, "slope"
    return rep


# --- orbit decomposition cross-check ------------------------------------------------


@dataclass
class CrossCheck:
    type: str
    q: int
    orbit_sum: int
    c2: int

    @property
    def ok(self) -> bool:
        return self.orbit_sum == self.c2

    def __bool__(self):
        return self.ok


def strata_oracle_crosscheck(type_label: str, q: int, budget: int = DEFAULT_BUDGET) -> CrossCheck:
    """Sum over F_q-orbits of size * q^cent_u(rep), against the centralizer-sum count."""
    from .orbits import bfs_census
    part = bfs_census(type_label, q, budget)
    u = model(type_label).u.over(Field("Fp", q))
    reps = np.array(part.reps, dtype=np.int64).reshape(len(part.reps), u.dim)
    ranks = batch_rank_mod_p(ad_stack(u, reps), q)
    orbit_sum = sum(int(s) * q ** (u.dim - int(r)) for s, r in zip(part.sizes, ranks))
    chk = CrossCheck(type_label, q, orbit_sum, count_c2(u, budget))
    if not chk.ok:
        raise CensusMismatch(f"{type_label} over F_{q}: orbit sum {orbit_sum} != |C_2| {chk.c2}")
    return chk


# --- the Witt chain ------------------------------------------------------------------


def filtration_degree(pts: np.ndarray, start: int) -> np.ndarray:
    """Largest i with x in W(1)_i, for points given in the basis e_start, ...; p - 1 for x = 0."""
    nz = pts != 0
    first = np.where(nz.any(axis=1), nz.argmax(axis=1), pts.shape[1])
    return first + start


def witt_kernel_formula(p: int, i: int) -> int:
    """dim ker(ad x) on W(1) for x in W(1)_i minus W(1)_(i+1); i = p - 1 stands for x = 0."""
    if i >= p - 1:
        return p
    if i <= 0:
        return 1
    if i <= (p - 3) // 2:
        return i + 1
    return i


def witt_filtration_dim(p: int, i: int) -> int:
    return max(p - 1 - i, 0)


@dataclass
class WittStratum:
    rank: int
    count: int
    layers: tuple                   # filtration degrees meeting the stratum
    hull: int                       # the stratum closure is W(1)_hull
    dim: int
    kernel_dim: int
    exact: bool                     # stratum is exactly a difference of filtration terms
    candidate: bool = False         # centralizers lie in the closure
    component: bool = False
    reason: str = ""

    @property
    def comp_dim(self) -> int:
        return self.dim + self.kernel_dim


@dataclass
class WittReport:
    kind: str
    p: int
    dim: int
    strata: list
    kernel_table_ok: bool | None    # None when not applicable (subalgebras)
    exact: bool
    modality: int
    c2_dim: int
    components: list                # ranks of the component strata
    unresolved: list
    component_range: tuple          # (min rank, max rank) of the components

    def to_json(self) -> dict:
        return {
            "algebra": f"{self.kind}:{self.p}",
            "dim": self.dim,
            "kernel_table_ok": self.kernel_table_ok,
            "exact": self.exact,
            "modality": self.modality,
            "c2_dim": self.c2_dim,
            "components": list(self.components),
            "component_range": list(self.component_range),
            "unresolved": list(self.unresolved),
            "strata": [
                {"rank": s.rank, "count": str(s.count), "layers": list(s.layers), "hull": s.hull, "dim": s.dim,
                 "kernel_dim": s.kernel_dim, "comp_dim": s.comp_dim, "candidate": s.candidate,
                 "component": s.component, "reason": s.reason}
                for s in self.strata],
        }


def _witt_points(g: LieAlgebra, budget: int):
    p = g.field.p
    total = p**g.dim
    if total > budget:
        raise BudgetExceeded(f"{g.name}: {total} elements exceeds budget {budget}")
    return enumerate_points(g.dim, p)


def witt_analysis(kind: str, p: int, budget: int = DEFAULT_BUDGET, seed: int = 0) -> WittReport:
    """Rank strata, modality, dim C_2 and components for W(1), W(1)_0 or W(1)_1 over F_p."""
    start = WITT_KINDS[kind]
    g = witt(p, start)
    pts = _witt_points(g, budget)
    ranks = ad_rank_table(g, budget)
    deg = filtration_degree(pts, start)
    table_ok = None
    if start == -1:
        expect = np.array([witt_kernel_formula(p, int(i)) for i in range(-1, p)])
        table_ok = bool(np.array_equal(g.dim - ranks, expect[deg + 1]))
    rng = random.Random(seed)
    strata = []
    for r in sorted(set(int(v) for v in ranks)):
        mask = ranks == r
        layers = tuple(sorted(set(int(v) for v in deg[mask])))
        hull = layers[0]
        top = layers[-1] + 1
        # exact when the stratum is W_hull minus W_top, i.e. consecutive full layers
        # a stratum containing 0 is all of W_hull, otherwise W_hull minus W_top
        size = p ** witt_filtration_dim(p, hull)
        if top <= p - 1:
            size -= p ** witt_filtration_dim(p, top)
        exact = layers == tuple(range(hull, top)) and int(mask.sum()) == size
        strata.append(WittStratum(r, int(mask.sum()), layers, hull,
                                  0 if hull == p - 1 else witt_filtration_dim(p, hull), g.dim - r, exact))
        # centralizer test on the first point of the stratum and a random one
        s = strata[-1]
        hits = np.nonzero(mask)[0]
        probes = {int(hits[0]), int(hits[rng.randrange(hits.size)])}
        s.candidate = True
        for h in probes:
            x = g.element([int(c) for c in pts[h]])
            for y in centralizer(x):
                yd = filtration_degree(np.array([[int(c) for c in y.coords]]), start)[0]
                if yd < hull:
                    s.candidate = False
                    s.reason = f"C({x}) leaves the stratum closure"
                    break
            if not s.candidate:
                break
    modality = max(s.dim - s.rank for s in strata)
    c2_dim = max(s.comp_dim for s in strata)
    _decide_components(strata)
    comps = [s.rank for s in strata if s.component]
    unresolved = [s.rank for s in strata if s.candidate and not s.component]
    rng_ = (min(comps), max(comps)) if comps else (0, -1)
    return WittReport(kind, p, g.dim, strata, table_ok, all(s.exact for s in strata), modality, c2_dim, comps,
                      unresolved, rng_)


def _decide_components(strata) -> None:
    """Candidates of top dimension are components; a lower candidate is one when it
    cannot lie in any larger candidate: its closure is not contained in the other's,
    or the other consists of pairs spanning a line while its own fibres are larger."""
    cands = [s for s in strata if s.candidate]
    if not cands:
        return
    for s in cands:
        bigger = [t for t in cands if t.comp_dim > s.comp_dim]
        blocked = []
        for t in bigger:
            if s.hull < t.hull:
                continue                # closure of s not inside closure of t
            if t.kernel_dim == 1 and s.kernel_dim >= 2:
                continue                # t lies in the closed set of dependent pairs
            blocked.append(t.rank)
        s.component = not blocked
        s.reason = "component" if s.component else f"may lie in strata {blocked}"


def witt_nilcone(p: int, budget: int = DEFAULT_BUDGET) -> dict:
    """Dimensions for the commuting variety of the p-nilpotent cone of W(1).

    Returns {"cone_dim", "strata": {rank: dim of stratum inside the cone}, "c2_dim"}.
    Dimensions inside the cone come from point counts of the form p^a - p^b.
    """
    g = witt(p)
    pts = _witt_points(g, budget)
    nil = np.zeros(len(pts), dtype=bool)
    chunk = 1 << 14
    for s in range(0, len(pts), chunk):
        a = ad_stack(g, pts[s:s + chunk])
        power = a.copy()
        for _ in range(p - 1):
            power = np.matmul(power, a) % p
        nil[s:s + chunk] = ~power.reshape(len(power), -1).any(axis=1)
    ranks = ad_rank_table(g, budget)
    out = {}
    for r in sorted(set(int(v) for v in ranks[nil])):
        c = int((nil & (ranks == r)).sum())
        out[r] = _count_exponent(c, p)
    cone = _count_exponent(int(nil.sum()), p)
    # y runs over C(x), which lies in the cone for nonzero nilpotent x; for x = 0 it is the cone itself
    dims = [d + (g.dim - r) for r, d in out.items() if r > 0]
    dims.append(cone)
    return {"cone_dim": cone, "strata": out, "c2_dim": max(dims), "cone_points": int(nil.sum())}


def _count_exponent(count: int, p: int) -> int:
    """a when count = p^a - p^b (b < a) or p^a; raises AmbiguousFit otherwise."""
    if count == 1:
        return 0
    a = 0
    while p ** (a + 1) <= count:
        a += 1
    if count == p**a:
        return a
    a += 1
    rest = p**a - count
    b = 0
    while p**b < rest:
        b += 1
    if p**b == rest and b < a:
        return a
    raise AmbiguousFit(f"count {count} is not of the form p^a - p^b")
