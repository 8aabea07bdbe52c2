"""Borel orbits on u: finite-field censuses, signatures, representatives."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import lru_cache

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .exact import GF, Field, batch_rank_mod_p, rank
from .liecore import (DEFAULT_BUDGET, BudgetExceeded, Element, ad_matrix, enumerate_points)
from .rootsys import BorelModel, SupportProfile, model, support_profile, msupp_labels


def primitive_root(q: int) -> int:
    if q == 2:
        return 1
    phi = q - 1
    fs = {d for d in range(2, phi + 1) if phi % d == 0 and all(d % e for e in range(2, d))}
    for g in range(2, q):
        if all(pow(g, phi // f, q) != 1 for f in fs):
            return g
    raise ValueError(q)


def encode(pts: np.ndarray, q: int) -> np.ndarray:
    d = pts.shape[1]
    w = q ** np.arange(d - 1, -1, -1, dtype=np.int64)
    return (pts % q) @ w


def generator_maps(m: BorelModel, q: int) -> list:
    """Integer matrices (acting on coordinate columns) generating B(F_q) on u(F_q).

    One unipotent generator u_gamma(1) per root, plus one torus generator per
    simple root acting by a primitive root of F_q on that root's character.
    """
    d = m.dim_u
    gens = []
    for A, Q in m.rootgroup_maps:
        gens.append((np.eye(d, dtype=np.int64) + A + Q) % q)
    if q > 2:
        g = primitive_root(q)
        for i in range(m.datum.rank):
            diag = [pow(g, m.datum.roots[m.datum.basis_root[k]][i], q) for k in range(d)]
            gens.append(np.diag(diag).astype(np.int64))
    return gens


@dataclass
class CensusPartition:
    type: str
    q: int
    reps: list                  # canonical F_q representative per orbit (int tuples)
    sizes: list
    labels: np.ndarray = dc_field(repr=False)   # orbit id of each point (odometer order)

    @property
    def coverage(self) -> int:
        return int(sum(self.sizes))

    @property
    def n_orbits(self) -> int:
        return len(self.sizes)


def canonical_order(pts: np.ndarray, q: int) -> np.ndarray:
    """Point indices sorted by (nnz, support positions, values with 1 < -1 < others)."""
    n, d = pts.shape
    nz = pts != 0
    keys = []
    pref = np.where(pts == 1, 1, np.where(pts == q - 1, 2, 3 + pts))
    pref = np.where(nz, pref, 0)
    for k in range(d - 1, -1, -1):
        keys.append(pref[:, k])
    # support positions compared lexicographically as sorted tuples
    pos = np.where(nz, np.arange(d)[None, :], d)
    pos = np.sort(pos, axis=1)
    for k in range(d - 1, -1, -1):
        keys.append(pos[:, k])
    keys.append(nz.sum(axis=1))
    return np.lexsort(keys)


def bfs_census(type_label, q: int, budget: int = DEFAULT_BUDGET) -> CensusPartition:
    """Partition u(F_q) into orbits of the group generated by root groups and the torus."""
    m = type_label if isinstance(type_label, BorelModel) else model(type_label)
    d = m.dim_u
    total = q**d
    gens = generator_maps(m, q)
    # every point is materialized once per generator
    if total * len(gens) > budget:
        raise BudgetExceeded(f"{m.type} at q={q}: {total} points x {len(gens)} generators exceeds budget {budget}")
    pts = enumerate_points(d, q)
    src = np.arange(total)
    rows, cols = [], []
    for G in gens:
        img = encode(pts @ G.T % q, q)
        rows.append(src)
        cols.append(img)
    r = np.concatenate(rows)
    c = np.concatenate(cols)
    graph = coo_matrix((np.ones(r.size, dtype=np.int8), (r, c)), shape=(total, total))
    n, lab = connected_components(graph, directed=True, connection="weak")
    order = canonical_order(pts, q)
    first = np.full(n, -1, dtype=np.int64)
    seen_lab = lab[order]
    _, idx = np.unique(seen_lab, return_index=True)
    first[seen_lab[idx]] = order[idx]
    sizes = np.bincount(lab, minlength=n)
    # renumber orbits by the canonical position of their representative
    pos = np.empty(total, dtype=np.int64)
    pos[order] = np.arange(total)
    perm = np.argsort(pos[first])
    inv = np.empty(n, dtype=np.int64)
    inv[perm] = np.arange(n)
    reps = [tuple(int(v) for v in pts[first[o]]) for o in perm]
    return CensusPartition(m.type, q, reps, [int(sizes[o]) for o in perm], inv[lab])


def lift(v, q: int) -> tuple:
    """Symmetric integer lift of an F_q vector (1 and q-1 map to 1 and -1)."""
    return tuple(int(a) if a <= q // 2 else int(a) - q for a in v)


# --- signatures ------------------------------------------------------------------


@dataclass(frozen=True)
class Signature:
    deg: int
    msupp: tuple
    zrank: int          # torus rank minus dim C_T(x); a B-invariant support rank
    cent_u: int
    cent_b: int
    orbit_dim: int
    corner_ranks: tuple  # ranks of lower-left blocks of matrix powers

    def key(self) -> tuple:
        return (self.deg, self.msupp, self.zrank, self.cent_u, self.cent_b, self.orbit_dim, self.corner_ranks)


def corner_blocks(n: int):
    """(power k, first row i, column bound j) of the blocks X^k[i:, :j] used as invariants.

    Only blocks that can be nonzero for a strictly upper triangular X are kept.
    """
    return [(k, i, j) for k in range(1, n) for i in range(n) for j in range(1, n + 1) if i + k < j]


def _profile_key(m: BorelModel, x: Element):
    prof = support_profile(m, x)
    if not prof.supp:
        return 0, ()
    return int(prof.deg), prof.msupp


def signature(m: BorelModel, x: Element) -> Signature:
    """Signature of x over its own coefficient field (Q or F_q)."""
    deg, ms = _profile_key(m, x)
    fld = x.parent.field
    cu = m.dim_u - rank(ad_matrix(x), m.dim_u)
    xb = Element(m.b if fld == m.b.field else over_fq(m, fld.p).b, tuple([fld.zero] * m.datum.torus_rank) + x.coords)
    cb = m.dim_b - rank(ad_matrix(xb), m.dim_b)
    X = m.matrix(x)
    n = m.size
    corners = []
    P = X
    powers = [None, X]
    for k in range(2, n):
        P = P.dot(X)
        powers.append(P)
    for k, i, j in corner_blocks(n):
        blk = powers[k][i:, :j]
        corners.append(rank([list(r) for r in blk], j))
    return Signature(deg, ms, m.datum.torus_rank - (cb - cu), cu, cb, m.dim_b - cb, tuple(corners))


@lru_cache(maxsize=None)
def over_fq(m: BorelModel, q: int) -> BorelModel:
    """The same model with structure constants reduced mod q."""
    f = Field("Fp", q)
    return BorelModel(m.datum, m.u.over(f), m.b.over(f), m.mats, m.torus_mats)


def reduce_element(m: BorelModel, x: Element, q: int) -> Element:
    mq = over_fq(m, q)
    return mq.u.element([GF(c, q) for c in x.coords])


def batch_signatures(m: BorelModel, q: int, pts: np.ndarray) -> np.ndarray:
    """Integer-coded signatures (one row per point) over F_q.

    Columns: deg, msupp bitmask, zrank, cent_u, cent_b, orbit_dim, corner ranks.
    """
    mq = over_fq(m, q)
    N = len(pts)
    d = m.dim_u
    heights = np.array([m.datum.height(m.datum.basis_root[k]) for k in range(d)])
    nz = pts % q != 0
    big = heights.max() + 1
    hmask = np.where(nz, heights[None, :], big)
    deg = hmask.min(axis=1)
    deg = np.where(deg == big, 0, deg)
    bits = (1 << np.array([m.datum.basis_root[k] for k in range(d)], dtype=np.int64))
    msupp = ((hmask == deg[:, None]) & nz).astype(np.int64) @ bits
    ad_u = np.einsum("ni,ijk->nkj", pts, mq.u.tensor) % q
    cu = d - batch_rank_mod_p(ad_u, q)
    r = m.datum.torus_rank
    ptsb = np.concatenate([np.zeros((N, r), dtype=np.int64), pts], axis=1)
    ad_b = np.einsum("ni,ijk->nkj", ptsb, mq.b.tensor) % q
    cb = m.dim_b - batch_rank_mod_p(ad_b, q)
    mats = np.stack(m.mats).astype(np.int64)
    X = np.einsum("ni,iab->nab", pts, mats) % q
    n = m.size
    powers = [None, X]
    for k in range(2, n):
        powers.append(np.einsum("nab,nbc->nac", powers[-1], X) % q)
    cols = [deg, msupp, r - (cb - cu), cu, cb, m.dim_b - cb]
    for k, i, j in corner_blocks(n):
        cols.append(batch_rank_mod_p(powers[k][:, i:, :j], q))
    return np.stack(cols, axis=1)


def signature_code(sig: Signature) -> tuple:
    """The integer row batch_signatures would produce for this signature."""
    bits = sum(1 << r for r in sig.msupp)
    return (sig.deg, bits, sig.zrank, sig.cent_u, sig.cent_b, sig.orbit_dim) + sig.corner_ranks


# --- records ---------------------------------------------------------------------


@dataclass
class OrbitRecord:
    rep: Element
    profile: SupportProfile
    sig: Signature
    cent_u: int
    cent_b: int
    ct_dim: int
    orbit_dim: int
    distinguished: bool
    comp_dim: int
    name: str = ""
    fq_sizes: dict = dc_field(default_factory=dict)
    fq_orbits: dict = dc_field(default_factory=dict)

    @property
    def zrank(self) -> int:
        return self.profile.zrank

    def to_json(self, m: BorelModel) -> dict:
        return {
            "name": self.name,
            "rep": str(self.rep),
            "coords": [int(c) for c in self.rep.coords],
            "deg": self.sig.deg,
            "msupp": list(msupp_labels(m, self.profile)),
            "zrank": self.zrank,
            "cent_u": self.cent_u,
            "cent_b": self.cent_b,
            "ct_dim": self.ct_dim,
            "orbit_dim": self.orbit_dim,
            "distinguished": self.distinguished,
            "comp_dim": self.comp_dim,
            "fq_sizes": {str(q): s for q, s in sorted(self.fq_sizes.items())},
        }


def make_record(m: BorelModel, x: Element, name: str = "") -> OrbitRecord:
    sig = signature(m, x)
    prof = support_profile(m, x)
    ct = m.datum.torus_rank - prof.zrank
    return OrbitRecord(rep=x, profile=prof, sig=sig, cent_u=sig.cent_u, cent_b=sig.cent_b,
                       ct_dim=ct, orbit_dim=sig.orbit_dim, distinguished=sig.cent_b == sig.cent_u,
                       comp_dim=m.dim_b - sig.cent_b + sig.cent_u, name=name)


def torus_adapted(m: BorelModel, x: Element) -> bool:
    """Whether dim C_T(x) is read off the support lattice for this representative."""
    sig = signature(m, x)
    return sig.cent_b - sig.cent_u == m.datum.torus_rank - support_profile(m, x).zrank


class ModelInconsistency(RuntimeError):
    pass


def _orbit_candidates(part: CensusPartition, pts_order, q):
    """Canonically ordered members of each orbit (lazily, as index arrays)."""
    by_orbit = {}
    lab = part.labels[pts_order]
    for o in range(part.n_orbits):
        by_orbit[o] = pts_order[lab == o]
    return by_orbit


def discover_reps(type_label: str, primes=None, budget: int = DEFAULT_BUDGET, pinned: dict | None = None,
                  censuses: dict | None = None) -> list:
    """Orbit records for a type, merged across primes by signature over Q."""
    from .golden import DEFAULT_PRIMES, PINNED
    m = model(type_label)
    primes = tuple(primes or DEFAULT_PRIMES[type_label])
    pinned = PINNED.get(type_label, {}) if pinned is None else pinned
    classes: dict = {}
    for q in primes:
        part = (censuses or {}).get(q) or bfs_census(m, q, budget)
        pts = None
        for o, (rep, size) in enumerate(zip(part.reps, part.sizes)):
            x = m.u.element(lift(rep, q))
            if not torus_adapted(m, x):
                if pts is None:
                    pts = enumerate_points(m.dim_u, q)
                    order = canonical_order(pts, q)
                    lab_sorted = part.labels[order]
                members = order[lab_sorted == o]
                for idx in members[1:]:
                    y = m.u.element(lift(pts[idx], q))
                    if torus_adapted(m, y):
                        x = y
                        break
                else:
                    raise ModelInconsistency(f"no torus-adapted lift for orbit of {rep} at q={q}")
            rec = make_record(m, x)
            key = rec.sig.key()
            if key in classes:
                old = classes[key]
                if _rep_key(x) < _rep_key(old.rep):
                    rec.fq_sizes, rec.fq_orbits = old.fq_sizes, old.fq_orbits
                    classes[key] = old = rec
            else:
                classes[key] = old = rec
            old.fq_sizes[q] = old.fq_sizes.get(q, 0) + size
            old.fq_orbits[q] = old.fq_orbits.get(q, 0) + 1
    records = sorted(classes.values(), key=lambda r: _rep_key(r.rep))
    for k, rec in enumerate(records):
        rec.name = f"r{k}"
    for name, spec in pinned.items():
        x = m.element(spec)
        key = signature(m, x).key()
        hit = [r for r in records if r.sig.key() == key]
        if len(hit) != 1:
            raise ModelInconsistency(f"pinned representative {name} = {x} matches {len(hit)} discovered classes")
        hit[0].name = name
    return records


def _rep_key(x: Element) -> tuple:
    c = [int(v) for v in x.coords]
    sup = tuple(i for i, v in enumerate(c) if v)
    vals = tuple({0: 0, 1: 1, -1: 2}.get(v, 3 + abs(v)) for v in c)
    return (len(sup), sup, vals)


def is_distinguished(m: BorelModel, x: Element) -> bool:
    sig = signature(m, x)
    return sig.cent_b == sig.cent_u


def lattice_distinguished(m: BorelModel, x: Element) -> bool:
    """zrank(x) = ssrk, the support-lattice test."""
    return support_profile(m, x).zrank == m.datum.ssrk


@dataclass
class ModalityReport:
    type: str
    modality: int
    primes: tuple
    n_records: int
    max_orbit_dim: int
    max_ad_rank: int
    expected_max_ad_rank: int
    note: str

    @property
    def ok(self) -> bool:
        return self.modality == 0 and self.max_ad_rank == self.expected_max_ad_rank


def modality_of_action(type_label: str, records_by_prime: dict) -> ModalityReport:
    """Finite-orbit certificate from per-prime discovery runs.

    records_by_prime maps each prime to the record list discovered from that
    prime alone; the signature classes must agree across primes.
    """
    m = model(type_label)
    sets = {q: frozenset(r.sig.key() for r in recs) for q, recs in records_by_prime.items()}
    if len(set(sets.values())) != 1:
        raise ModelInconsistency(f"{type_label}: signature classes differ across primes "
                                 + ", ".join(f"q={q}: {len(s)}" for q, s in sets.items()))
    recs = next(iter(records_by_prime.values()))
    max_rk = max(m.dim_u - r.cent_u for r in recs)
    return ModalityReport(type_label, 0, tuple(sorted(records_by_prime)), len(recs),
                          max(r.orbit_dim for r in recs), max_rk, m.dim_u - m.datum.ssrk,
                          "finitely many orbits, certified at the censused primes")


# --- audit -----------------------------------------------------------------------


@dataclass
class OrbitAudit:
    type: str
    q: int
    total: int
    coverage: int
    n_orbits: int
    group_order: int
    sizes_divide: bool
    orbits_uniform: bool        # every F_q-orbit carries a single signature
    unmatched: int              # points whose signature matches no record
    ambiguous: int              # points matching more than one record

    @property
    def ok(self) -> bool:
        return (self.coverage == self.total and self.sizes_divide and self.orbits_uniform
                and self.unmatched == 0 and self.ambiguous == 0)

    def __bool__(self):
        return self.ok


def borel_order(m: BorelModel, q: int) -> int:
    """Order of the acting group: root groups times a torus with one weight per simple root."""
    return (q - 1) ** m.datum.rank * q ** m.dim_u


def audit_orbits(type_label: str, q: int, records=None, part: CensusPartition | None = None,
                 budget: int = DEFAULT_BUDGET) -> OrbitAudit:
    m = model(type_label)
    part = part if part is not None else bfs_census(m, q, budget)
    records = records if records is not None else discover_reps(type_label, budget=budget)
    owners: dict = {}
    for rec in records:
        code = signature_code(signature(m, reduce_element(m, rec.rep, q)))
        owners.setdefault(code, []).append(rec.name)
    pts = enumerate_points(m.dim_u, q)
    rows = batch_signatures(m, q, pts)
    unmatched = ambiguous = 0
    uniq, inv = np.unique(rows, axis=0, return_inverse=True)
    inv = inv.reshape(-1)
    hits = np.bincount(inv, minlength=len(uniq))
    for k, row in enumerate(uniq):
        n = len(owners.get(tuple(int(v) for v in row), []))
        if n == 0:
            unmatched += int(hits[k])
        elif n > 1:
            ambiguous += int(hits[k])
    # one signature per orbit: the pair (orbit, code) takes as many values as there are orbits
    pairs = np.unique(np.stack([part.labels, inv], axis=1), axis=0)
    order = borel_order(m, q)
    return OrbitAudit(m.type, q, q ** m.dim_u, part.coverage, part.n_orbits, order,
                      all(order % s == 0 for s in part.sizes), len(pairs) == part.n_orbits, unmatched, ambiguous)
