"""Independent reference computations used to check the package.

Nothing here imports cvtool: each routine rebuilds its object from first
principles (explicit matrices, derivations of a truncated polynomial ring,
fraction-free elimination) so agreement is evidence rather than tautology.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np


def bareiss_rank(rows) -> int:
    """Rank over Q of an integer matrix by fraction-free elimination."""
    a = [[int(v) for v in r] for r in rows]
    if not a or not a[0]:
        return 0
    m, n = len(a), len(a[0])
    r, prev = 0, 1
    for c in range(n):
        k = next((i for i in range(r, m) if a[i][c] != 0), None)
        if k is None:
            continue
        a[r], a[k] = a[k], a[r]
        for i in range(r + 1, m):
            for j in range(c + 1, n):
                a[i][j] = (a[r][c] * a[i][j] - a[i][c] * a[r][j]) // prev
            a[i][c] = 0
        prev = a[r][c]
        r += 1
        if r == m:
            break
    return r


def rank_mod_p(rows, p: int) -> int:
    a = [[int(v) % p for v in r] for r in rows]
    if not a:
        return 0
    r = 0
    for c in range(len(a[0])):
        k = next((i for i in range(r, len(a)) if a[i][c]), None)
        if k is None:
            continue
        a[r], a[k] = a[k], a[r]
        inv = pow(a[r][c], -1, p)
        a[r] = [v * inv % p for v in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [(u - f * v) % p for u, v in zip(a[i], a[r])]
        r += 1
    return r


def rank_fractions(rows) -> int:
    a = [[Fraction(v) for v in r] for r in rows]
    if not a:
        return 0
    r = 0
    for c in range(len(a[0])):
        k = next((i for i in range(r, len(a)) if a[i][c]), None)
        if k is None:
            continue
        a[r], a[k] = a[k], a[r]
        for i in range(len(a)):
            if i != r and a[i][c]:
                f = a[i][c] / a[r][c]
                a[i] = [u - f * v for u, v in zip(a[i], a[r])]
        r += 1
    return r


# --- nilradicals as explicit matrix sets ------------------------------------------


def _symplectic_form():
    J = np.zeros((4, 4), dtype=np.int64)
    J[0, 3], J[1, 2], J[2, 1], J[3, 0] = 1, 1, -1, -1
    return J


def radical_cells(type_label: str):
    """Strictly upper cells that carry the radical, and a linear filter."""
    if type_label.startswith("A"):
        n = int(type_label[1:]) + 1
        return n, [(i, j) for i in range(n) for j in range(i + 1, n)]
    n = 4
    return n, [(i, j) for i in range(n) for j in range(i + 1, n)]


def radical_points(type_label: str, q: int) -> np.ndarray:
    """All elements of the nilradical over F_q as (N, n, n) integer matrices."""
    n, cells = radical_cells(type_label)
    pts = []
    J = _symplectic_form()
    for vals in itertools.product(range(q), repeat=len(cells)):
        X = np.zeros((n, n), dtype=np.int64)
        for (i, j), v in zip(cells, vals):
            X[i, j] = v
        if type_label == "B2" and np.any((X.T @ J + J @ X) % q):
            continue
        pts.append(X)
    return np.array(pts)


def _key(X: np.ndarray) -> bytes:
    return X.astype(np.int8).tobytes()


def group_generators(type_label: str, q: int) -> list:
    """Pairs (g, g^-1) generating the Borel subgroup (up to centre) over F_q."""
    g0 = next(g for g in range(1, q) if len({pow(g, k, q) for k in range(q - 1)}) == q - 1)
    gens = []
    n = radical_cells(type_label)[0]
    if type_label.startswith("A"):
        for i in range(n):
            for j in range(i + 1, n):
                u = np.eye(n, dtype=np.int64)
                u[i, j] = 1
                ui = np.eye(n, dtype=np.int64)
                ui[i, j] = q - 1
                gens.append((u, ui))
        for i in range(n):
            d = np.eye(n, dtype=np.int64)
            d[i, i] = g0
            di = np.eye(n, dtype=np.int64)
            di[i, i] = pow(g0, -1, q)
            gens.append((d, di))
    else:
        J = _symplectic_form()
        # every unipotent upper-triangular symplectic matrix
        cells = [(i, j) for i in range(4) for j in range(i + 1, 4)]
        for vals in itertools.product(range(q), repeat=6):
            u = np.eye(4, dtype=np.int64)
            for (i, j), v in zip(cells, vals):
                u[i, j] = v
            if np.any((u.T @ J @ u - J) % q):
                continue
            ui = np.round(np.linalg.inv(u)).astype(np.int64) % q
            gens.append((u, ui))
        # similitude torus diag(a, b, c, bc/a)
        for a, b, c in [(g0, 1, 1), (1, g0, 1), (1, 1, g0)]:
            d4 = b * c * pow(a, -1, q) % q
            d = np.diag([a, b, c, d4]).astype(np.int64)
            di = np.diag([pow(v, -1, q) for v in (a, b, c, d4)]).astype(np.int64)
            gens.append((d, di))
    return gens


def orbit_sizes(type_label: str, q: int) -> list:
    """Sizes of the orbits of B(F_q) on u(F_q), by conjugating explicit matrices."""
    pts = radical_points(type_label, q)
    index = {_key(X): k for k, X in enumerate(pts)}
    parent = list(range(len(pts)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for g, gi in group_generators(type_label, q):
        imgs = np.einsum("ab,nbc,cd->nad", g, pts, gi) % q
        for k, Y in enumerate(imgs):
            a, b = find(k), find(index[_key(Y)])
            if a != b:
                parent[a] = b
    roots = [find(k) for k in range(len(pts))]
    _, counts = np.unique(roots, return_counts=True)
    return sorted(int(c) for c in counts)


def commuting_pairs(type_label: str, q: int, chunk: int = 256) -> int:
    """|{(X, Y) : XY = YX}| over the matrix nilradical."""
    pts = radical_points(type_label, q)
    total = 0
    for s in range(0, len(pts), chunk):
        A = pts[s:s + chunk]
        xy = np.einsum("iab,jbc->ijac", A, pts)
        yx = np.einsum("jab,ibc->ijac", pts, A)
        total += int((~((xy - yx) % q).reshape(len(A), len(pts), -1).any(axis=2)).sum())
    return total


def abelian_planes(type_label: str, q: int) -> int:
    """Two-dimensional commutative subspaces, by listing planes in echelon form."""
    pts = radical_points(type_label, q)
    flat = pts.reshape(len(pts), -1)
    seen = set()
    nz = [k for k in range(len(pts)) if flat[k].any()]
    for a, b in itertools.combinations(nz, 2):
        X, Y = pts[a], pts[b]
        if rank_mod_p([flat[a], flat[b]], q) < 2:
            continue
        if np.any((X @ Y - Y @ X) % q):
            continue
        plane = frozenset(_key((s * X + t * Y) % q) for s in range(q) for t in range(q))
        seen.add(plane)
    return len(seen)


# --- Witt algebra as derivations of F_p[X]/(X^p) ------------------------------


def witt_derivation(p: int, i: int) -> np.ndarray:
    """Matrix of X^(i+1) d/dX on the basis 1, X, ..., X^(p-1)."""
    D = np.zeros((p, p), dtype=np.int64)
    for k in range(p):
        t = k + i
        if k and 0 <= t < p:
            D[t, k] = k % p
    return D


def derivation_coords(D: np.ndarray, start: int, p: int) -> list:
    """Coordinates of a derivation in the basis X^(i+1) d/dX, read off from D(X)."""
    col = D[:, 1] % p
    return [int(col[i + 1]) for i in range(start, p - 1)]


def witt_ad_rank(p: int, coords, start: int = -1) -> int:
    idx = list(range(start, p - 1))
    x = sum(int(c) * witt_derivation(p, i) for c, i in zip(coords, idx)) % p
    cols = []
    for j in idx:
        D = witt_derivation(p, j)
        cols.append(derivation_coords((x @ D - D @ x) % p, start, p))
    return rank_mod_p(cols, p)
