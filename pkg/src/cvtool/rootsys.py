"""Root-graded nilpotent radicals of Borel subalgebras (types A1-A4, B2).

Each type is realized by integer matrices: strictly upper triangular
matrices in sl(n+1), and the strictly upper triangular part of sp(4) for
the symplectic form with antidiagonal Gram matrix J.  Root-group elements
act by honest conjugation u x u^{-1}; since every root vector X squares to
zero, u = 1 + tX and the action is x + t[X, x] - t^2 X x X.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache

import numpy as np

from .exact import QF, Field, smith_rank
from .liecore import Element, LieAlgebra, from_matrices

TYPES = ("A1", "A2", "A3", "A4", "B2")


@dataclass(frozen=True)
class RootDatum:
    type: str
    simple: tuple          # labels of simple roots
    roots: tuple           # positive roots as simple-root coordinate tuples
    torus_rank: int
    basis_root: tuple      # root index of each basis vector of u

    def __post_init__(self):
        for r in self.roots:
            if min(r) < 0 or sum(r) < 1:
                raise ValueError(f"bad positive root {r}")
        if sorted(self.basis_root) != list(range(len(self.roots))):
            raise ValueError("basis of u must be in bijection with the positive roots")

    @property
    def rank(self) -> int:
        return len(self.simple)

    ssrk = rank

    def height(self, i: int) -> int:
        return sum(self.roots[i])

    @property
    def heights(self) -> tuple:
        return tuple(sum(r) for r in self.roots)

    def root_label(self, i: int) -> str:
        parts = []
        for s, c in zip(self.simple, self.roots[i]):
            if c:
                parts.append(s if c == 1 else f"{c}{s}")
        return "+".join(parts)

    def root_index(self, coords) -> int:
        return self.roots.index(tuple(coords))


def datum_from_grading(type_label: str, simple, grading: dict, torus_rank: int | None = None) -> RootDatum:
    roots = tuple(tuple(int(c) for c in r) for r in grading["roots"])
    return RootDatum(type_label, tuple(simple), roots,
                     len(simple) if torus_rank is None else torus_rank,
                     tuple(int(i) for i in grading["basis_root"]))


def _unit(n, i, j):
    m = np.zeros((n, n), dtype=np.int64)
    m[i, j] = 1
    return m


def _type_a(n: int):
    N = n + 1
    entries = sorted(((j - i, i, j) for i in range(N) for j in range(i + 1, N)))
    mats, roots, labels = [], [], []
    for _, i, j in entries:
        mats.append(_unit(N, i, j))
        roots.append(tuple(1 if i <= k < j else 0 for k in range(n)))
        labels.append(f"E{i + 1}{j + 1}")
    torus = [_unit(N, i, i) - _unit(N, i + 1, i + 1) for i in range(n)]
    simple = tuple(f"a{i + 1}" for i in range(n))
    return mats, roots, labels, torus, simple


SP4_FORM = np.array([[0, 0, 0, 1], [0, 0, 1, 0], [0, -1, 0, 0], [-1, 0, 0, 0]])


def _type_b2():
    J = SP4_FORM
    # strictly upper triangular X with X^T J + J X = 0
    cells = [(i, j) for i in range(4) for j in range(i + 1, 4)]
    rows = []
    for a in range(4):
        for b in range(4):
            row = []
            for (i, j) in cells:
                E = _unit(4, i, j)
                row.append(Fraction(int((E.T @ J + J @ E)[a, b])))
            rows.append(row)
    from .exact import kernel_basis
    ker = kernel_basis(rows, len(cells))
    vecs = []
    for v in ker:
        m = np.zeros((4, 4), dtype=np.int64)
        for c, (i, j) in zip(v, cells):
            assert c.denominator == 1
            m[i, j] = int(c)
        vecs.append(m)
    # weights of E_ij under diag(t1, t2, 1/t2, 1/t1), in (eps1, eps2) coordinates
    eps = [(1, 0), (0, 1), (0, -1), (-1, 0)]

    def weight(m):
        (i, j) = next((i, j) for i, j in cells if m[i, j])
        return (eps[i][0] - eps[j][0], eps[i][1] - eps[j][1])

    # simple roots: alpha = 2 eps2 (long), beta = eps1 - eps2 (short)
    def coords(w):
        b = w[0] // 1
        a = Fraction(w[0] + w[1], 2)
        return (int(a), int(b))

    items = []
    for m in vecs:
        lead = next((i, j) for i, j in cells if m[i, j])
        if m[lead] < 0:
            m = -m
        c = coords(weight(m))
        items.append((sum(c), lead, c, m))
    items.sort(key=lambda t: (t[0], t[1]))
    names = {(0, 1): "xb", (1, 0): "xa", (1, 1): "xab", (1, 2): "xa2b"}
    mats = [t[3] for t in items]
    roots = [t[2] for t in items]
    labels = [names[r] for r in roots]
    torus = [np.diag([1, 0, 0, -1]), np.diag([0, 1, -1, 0])]
    return mats, roots, labels, torus, ("a", "b")


@dataclass(frozen=True, eq=False)
class BorelModel:
    """u and b for one type, with the matrix realization used for group actions."""

    datum: RootDatum
    u: LieAlgebra
    b: LieAlgebra
    mats: tuple            # matrix of each basis vector of u
    torus_mats: tuple

    @property
    def type(self) -> str:
        return self.datum.type

    @property
    def dim_u(self) -> int:
        return self.u.dim

    @property
    def dim_b(self) -> int:
        return self.b.dim

    @property
    def size(self) -> int:
        return self.mats[0].shape[0]

    @cached_property
    def _flat(self):
        return [[Fraction(int(v)) for v in m.ravel()] for m in self.mats]

    def coords_of_matrix(self, m) -> tuple:
        """Coordinates in u of a matrix over Q (or any exact field) lying in u."""
        n = len(self.mats)
        flat = [v for v in np.asarray(m, dtype=object).ravel()]
        out = []
        # each basis matrix has a distinct leading cell; read coordinates off it
        for k in range(n):
            cell = self.leading_cells[k]
            out.append(flat[cell])
        recon = [sum((out[k] * self._flat[k][r] for k in range(n)), flat[0] - flat[0])
                 for r in range(len(flat))]
        if any(a != b for a, b in zip(recon, flat)):
            raise ValueError("matrix does not lie in u")
        return tuple(out)

    @cached_property
    def leading_cells(self) -> tuple:
        cells = []
        for m in self.mats:
            f = m.ravel()
            cells.append(int(np.nonzero(f)[0][0]))
        if len(set(cells)) != len(cells):
            raise ValueError("basis matrices share a leading cell")
        # leading entries are +1, and no other basis matrix touches that cell
        for k, c in enumerate(cells):
            for l, m in enumerate(self.mats):
                if l != k and m.ravel()[c] != 0:
                    raise ValueError("leading cells are not coordinate functions")
        return tuple(cells)

    def matrix(self, x: Element):
        """Matrix of x (object array over x's scalar ring)."""
        n = self.size
        out = np.empty((n, n), dtype=object)
        zero = x.coords[0] - x.coords[0]
        out[:, :] = zero
        for c, m in zip(x.coords, self.mats):
            if c != 0:
                out = out + c * m.astype(object)
        return out

    @cached_property
    def rootgroup_maps(self):
        """Per basis root vector: integer matrices (A, Q) with
        Ad(1 + tX) = I + tA + t^2 Q on u coordinates."""
        out = []
        for X in self.mats:
            if np.any(X @ X):
                raise ValueError("root vector does not square to zero")
            cols_a, cols_q = [], []
            for M in self.mats:
                cols_a.append(self.coords_of_matrix(X @ M - M @ X))
                cols_q.append(self.coords_of_matrix(-(X @ M @ X)))
            A = np.array(cols_a, dtype=np.int64).T
            Q = np.array(cols_q, dtype=np.int64).T
            out.append((A, Q))
        return tuple(out)

    def element(self, spec) -> Element:
        """Element of u from coords, a {label: coeff} dict, or a '+'-joined label string."""
        if isinstance(spec, Element):
            return spec
        if isinstance(spec, str):
            d = {}
            for lab in spec.split("+"):
                lab = lab.strip()
                d[lab] = d.get(lab, 0) + 1
            return self.u.from_dict(d)
        if isinstance(spec, dict):
            return self.u.from_dict(spec)
        return self.u.element(list(spec))

    def to_b(self, x: Element) -> Element:
        r = self.datum.torus_rank
        return self.b.element([0] * r + list(x.coords)) if x.parent.field == self.b.field else \
            Element(self.b, tuple([x.coords[0] - x.coords[0]] * r) + x.coords)


@lru_cache(maxsize=None)
def model(type_label: str, fld: Field = QF) -> BorelModel:
    if type_label.startswith("A"):
        n = int(type_label[1:])
        if not 1 <= n <= 4:
            raise ValueError(f"unsupported type {type_label}")
        mats, roots, labels, torus, simple = _type_a(n)
    elif type_label == "B2":
        mats, roots, labels, torus, simple = _type_b2()
    else:
        raise ValueError(f"unsupported type {type_label!r}; choose from {', '.join(TYPES)}")
    datum = RootDatum(type_label, simple, tuple(roots), len(torus), tuple(range(len(roots))))
    u = from_matrices(f"u({type_label})", labels, mats, fld)
    tl = [f"h{i + 1}" for i in range(len(torus))]
    b = from_matrices(f"b({type_label})", tl + labels, list(torus) + list(mats), fld)
    return BorelModel(datum, u, b, tuple(mats), tuple(torus))


# --- support data -------------------------------------------------------------


@dataclass(frozen=True)
class SupportProfile:
    supp: tuple        # root indices
    deg: float         # minimal height, -inf for x = 0
    msupp: tuple       # root indices at minimal height
    zrank: int


def support_profile(m: BorelModel, x: Element) -> SupportProfile:
    d = m.datum
    supp = tuple(sorted(d.basis_root[i] for i in x.support()))
    if not supp:
        return SupportProfile((), float("-inf"), (), 0)
    deg = min(d.height(r) for r in supp)
    msupp = tuple(r for r in supp if d.height(r) == deg)
    zr = smith_rank([d.roots[r] for r in supp])
    return SupportProfile(supp, deg, msupp, zr)


def msupp_labels(m: BorelModel, prof: SupportProfile) -> tuple:
    return tuple(m.datum.root_label(r) for r in prof.msupp)


# --- actions --------------------------------------------------------------------


def torus_act(m: BorelModel, weights, x: Element) -> Element:
    if len(weights) != m.datum.rank:
        raise ValueError(f"need {m.datum.rank} weights")
    if any(w == 0 for w in weights):
        raise ValueError("torus weights must be nonzero")
    out = []
    for k, c in enumerate(x.coords):
        r = m.datum.roots[m.datum.basis_root[k]]
        s = c
        for w, e in zip(weights, r):
            s = s * w ** e
        out.append(s)
    return Element(x.parent, tuple(out))


def root_group_act(m: BorelModel, gamma: int, t, x: Element) -> Element:
    """Ad(u_gamma(t)) x for the root with index gamma."""
    if not 0 <= gamma < len(m.datum.roots):
        raise ValueError(f"{gamma} is not a root index of {m.type}")
    A, Q = m.rootgroup_maps[m.datum.basis_root.index(gamma)]
    zero = x.coords[0] - x.coords[0]
    out = []
    for k in range(len(x.coords)):
        lin = sum((int(A[k, j]) * c for j, c in enumerate(x.coords) if A[k, j]), zero)
        quad = sum((int(Q[k, j]) * c for j, c in enumerate(x.coords) if Q[k, j]), zero)
        out.append(x.coords[k] + t * lin + t * t * quad)
    return Element(x.parent, tuple(out))


def conjugate_by_matrix(m: BorelModel, gamma: int, t, x: Element) -> Element:
    """Reference implementation of the root-group action by explicit conjugation."""
    X = m.mats[m.datum.basis_root.index(gamma)].astype(object)
    n = m.size
    one = np.eye(n, dtype=np.int64).astype(object)
    u = one + t * X
    uinv = one - t * X
    return Element(x.parent, m.coords_of_matrix(u.dot(m.matrix(x)).dot(uinv)))


def upsilon(m: BorelModel, x: Element) -> Element:
    """The diagram automorphism E_ij -> -E_{n+2-j, n+2-i} of u in type A_n."""
    if not m.type.startswith("A"):
        raise ValueError("upsilon is defined for type A only")
    N = m.size
    out = [x.coords[0] - x.coords[0]] * len(x.coords)
    for k, c in enumerate(x.coords):
        i, j = divmod(m.leading_cells[k], N)
        target = (N - 1 - j) * N + (N - 1 - i)
        out[m.leading_cells.index(target)] = -c
    return Element(x.parent, tuple(out))


def sigma(m: BorelModel, root: int) -> int:
    """Diagram flip on root indices (type A)."""
    r = m.datum.roots[root]
    return m.datum.root_index(tuple(reversed(r)))


def height_filtration(m: BorelModel, d: int) -> list:
    """Basis indices of u^(>= d)."""
    return [k for k in range(m.dim_u) if m.datum.height(m.datum.basis_root[k]) >= d]
