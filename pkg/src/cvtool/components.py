"""Irreducible components of the commuting variety of u.

Every orbit record x defines the irreducible closed set C(x), the closure of
B.({x} x C_u(x)).  A record is a component exactly when C(x) is maximal among
these; the routines below either exhibit x as distinguished of top
dimension or exclude it by one of three arguments:

* an obstruction: a B-stable subspace v containing x but not C_u(x);
* a degeneration certificate: curves X(a), Y_j(a) with [X, Y_j] = 0, X(0) = x,
  the Y_j(0) covering C_u(x), and X(a) conjugate to a point of a different
  orbit for generic a, which places C(x) strictly inside another C(x');
* the special scan for a root vector c that lifts x along a torus direction.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from pathlib import Path

from .exact import (ALPHA, BETA, RatFun, format_fraction, kernel_basis, parse_fraction, parse_ratfun,
                    poly_from_terms, poly_to_terms, rank, solve)
from .liecore import Element, bracket, centralizer
from .orbits import OrbitRecord, discover_reps, signature
from .rootsys import BorelModel, height_filtration, model, root_group_act, support_profile, torus_act

CERT_DIR = Path(__file__).parent / "data" / "certs"


def component_dim(m: BorelModel, rec: OrbitRecord) -> int:
    return m.dim_b - rec.cent_b + rec.cent_u


# --- obstruction --------------------------------------------------------------


def stable_subspace(m: BorelModel, x: Element) -> list:
    """Basis indices of msupp-span + u^(>= deg+1); empty for x = 0."""
    prof = support_profile(m, x)
    if not prof.supp:
        return []
    d = int(prof.deg)
    ms = {k for k in range(m.dim_u) if m.datum.basis_root[k] in prof.msupp}
    return sorted(ms | set(height_filtration(m, d + 1)))


def csc4_obstruction(m: BorelModel, rec: OrbitRecord):
    """Some y in C_u(x) outside the B-stable space v(x), or None."""
    x = rec.rep
    idx = stable_subspace(m, x)
    inside = set(idx)
    for k in range(m.dim_u):
        e = m.u.basis_element(k)
        for v in idx:
            w = bracket(e, m.u.basis_element(v))
            if any(c != 0 and i not in inside for i, c in enumerate(w.coords)):
                raise RuntimeError(f"{m.type}: v({x}) is not stable under ad({m.u.basis[k]})")
    for y in centralizer(x):
        if any(c != 0 and i not in inside for i, c in enumerate(y.coords)):
            return y
    return None


# --- certificates ---------------------------------------------------------------


@dataclass
class WitnessStep:
    kind: str                       # "torus" or "rootgroup"
    weights: tuple = ()             # RatFun per simple root
    root: int = -1
    param: RatFun | None = None

    def to_json(self) -> dict:
        if self.kind == "torus":
            return {"kind": "torus", "weights": [str(w) for w in self.weights]}
        return {"kind": "rootgroup", "root": self.root, "param": str(self.param)}

    @classmethod
    def from_json(cls, d: dict) -> "WitnessStep":
        if d["kind"] == "torus":
            return cls("torus", tuple(parse_ratfun(w) for w in d["weights"]))
        if d["kind"] == "rootgroup":
            return cls("rootgroup", root=int(d["root"]), param=parse_ratfun(d["param"]))
        raise ValueError(f"unknown witness kind {d['kind']!r}")

    def apply(self, m: BorelModel, x: Element) -> Element:
        if self.kind == "torus":
            return torus_act(m, self.weights, x)
        return root_group_act(m, self.root, self.param, x)


@dataclass
class Certificate:
    """A degeneration of the orbit of ``base`` into the closure of another orbit.

    The witness word, applied in order to ``target``, must produce curve_x
    identically; curves_y are polynomial in a (and possibly b).
    """

    type: str
    name: str
    base: tuple
    target: tuple
    curve_x: tuple
    curves_y: tuple
    witness: tuple
    dense_condition: str = ""

    def to_json(self) -> dict:
        return {
            "type": self.type,
            "name": self.name,
            "base": [format_fraction(c) for c in self.base],
            "target": [format_fraction(c) for c in self.target],
            "curve_x": [poly_to_terms(c) for c in self.curve_x],
            "curves_y": [[poly_to_terms(c) for c in y] for y in self.curves_y],
            "witness": [w.to_json() for w in self.witness],
            "dense_condition": self.dense_condition,
        }

    @classmethod
    def from_json(cls, d: dict) -> "Certificate":
        return cls(
            type=d["type"],
            name=d.get("name", ""),
            base=tuple(parse_fraction(c) for c in d["base"]),
            target=tuple(parse_fraction(c) for c in d["target"]),
            curve_x=tuple(poly_from_terms(t) for t in d["curve_x"]),
            curves_y=tuple(tuple(poly_from_terms(t) for t in y) for y in d["curves_y"]),
            witness=tuple(WitnessStep.from_json(w) for w in d["witness"]),
            dense_condition=d.get("dense_condition", ""),
        )

    def dump(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=1, sort_keys=True) + "\n")


def load_certificate(path) -> Certificate:
    with open(path) as fh:
        return Certificate.from_json(json.load(fh))


def bundled_certificates() -> list:
    return [load_certificate(p) for p in sorted(CERT_DIR.glob("*.json"))]


@dataclass
class CertificateCheck:
    ok: bool
    message: str
    nonvanishing: tuple = ()

    def __bool__(self):
        return self.ok


def _rat_element(m: BorelModel, coords) -> Element:
    return Element(m.u, tuple(RatFun(c) for c in coords))


def _is_beta_free(r: RatFun) -> bool:
    n, d = r.parts()
    return all(mono[1] == 0 for mono in list(n) + list(d))


def _d_beta(r: RatFun) -> RatFun:
    return poly_from_terms([[i, j - 1, format_fraction(c * j)] for (i, j), c in r.terms().items() if j])


def _density_rank(n: int, free, param) -> int:
    """Rank of the differential of (coefficients, b) -> sum of the y_j(0) at a fixed random point."""
    rng = random.Random(20240601)
    b0 = Fraction(rng.randint(2, 97), rng.randint(2, 97))
    coeffs = [Fraction(rng.randint(1, 97), rng.randint(1, 97)) for _ in param]
    cols = [list(v) for v in free]
    cols += [[c.subs(b=b0).value() for c in v] for v in param]
    if param:
        cols.append([sum((a * _d_beta(c).subs(b=b0).value() for a, c in zip(coeffs, coord)), Fraction(0))
                     for coord in zip(*param)])
    return rank(cols, n) if cols else 0


def verify_certificate(cert: Certificate) -> CertificateCheck:
    """Check a certificate by exact rational-function identities."""
    try:
        m = model(cert.type)
    except ValueError as exc:
        return CertificateCheck(False, str(exc))
    n = m.dim_u
    if len(cert.base) != n or len(cert.target) != n or len(cert.curve_x) != n:
        return CertificateCheck(False, "coordinate vectors have the wrong length")
    if any(len(y) != n for y in cert.curves_y):
        return CertificateCheck(False, "a y-curve has the wrong length")
    for c in list(cert.curve_x) + [c for y in cert.curves_y for c in y]:
        if not c.is_polynomial():
            return CertificateCheck(False, f"curve coordinate {c} is not a polynomial")
    X = _rat_element(m, cert.curve_x)
    x0 = [c.subs(a=0) for c in cert.curve_x]
    if not all(_is_beta_free(c) for c in x0):
        return CertificateCheck(False, "x(0) depends on the second parameter")
    if [c.value() for c in x0] != list(cert.base):
        return CertificateCheck(False, "x(0) differs from the base representative")
    # (i) brackets vanish identically
    for j, y in enumerate(cert.curves_y):
        br = bracket(X, _rat_element(m, y))
        for k, c in enumerate(br.coords):
            if c != 0:
                return CertificateCheck(False, f"[x, y_{j}] has coordinate {m.u.basis[k]} = {c}, not 0")
    # (ii) the y_j(0) cover C_u(x(0))
    base = m.u.element(list(cert.base))
    cent = [tuple(v.coords) for v in centralizer(base)]
    y0 = [[c.subs(a=0) for c in y] for y in cert.curves_y]
    free = [tuple(c.value() for c in v) for v in y0 if all(_is_beta_free(c) for c in v)]
    param = [v for v in y0 if not all(_is_beta_free(c) for c in v)]
    if len(set(free)) != len(free) or any(v not in cent for v in free):
        return CertificateCheck(False, "the parameter-free y_j(0) are not distinct canonical centralizer basis vectors")
    if not param:
        if len(free) != len(cent):
            return CertificateCheck(False, f"y_j(0) span {len(free)} of {len(cent)} centralizer dimensions")
    else:
        if _density_rank(n, free, param) != len(cent):
            return CertificateCheck(False, "the parametrized y_j(0) do not cover a dense subset of the centralizer")
    # (iii) witness maps the target onto x(a) identically
    z = _rat_element(m, cert.target)
    locus = []
    try:
        for step in cert.witness:
            vals = step.weights if step.kind == "torus" else (step.param,)
            for v in vals:
                if not v.is_polynomial() or step.kind == "torus":
                    locus.append(str(v))
            z = step.apply(m, z)
    except (ValueError, ZeroDivisionError) as exc:
        return CertificateCheck(False, f"witness cannot be applied: {exc}")
    for k, (a, b) in enumerate(zip(z.coords, X.coords)):
        if a != b:
            return CertificateCheck(False, f"witness image differs from x(a) at {m.u.basis[k]}: {a} vs {b}")
    return CertificateCheck(True, "ok", tuple(locus))


def mutations(cert: Certificate):
    """All single-coefficient perturbations of a certificate (coefficient + 1, or + 2 if that gives 0)."""

    def bump(c):
        return c + 1 if c + 1 != 0 else c + 2

    def bump_poly(p):
        t = p.terms()
        for mono in sorted(t):
            new = dict(t)
            new[mono] = bump(new[mono])
            yield poly_from_terms([[i, j, format_fraction(v)] for (i, j), v in new.items()])

    d = cert.to_json()
    for field in ("base", "target"):
        for k in range(len(d[field])):
            e = json.loads(json.dumps(d))
            e[field][k] = format_fraction(bump(parse_fraction(e[field][k])))
            yield f"{field}[{k}]", Certificate.from_json(e)
    for k, c in enumerate(cert.curve_x):
        for p in bump_poly(c):
            e = json.loads(json.dumps(d))
            e["curve_x"][k] = poly_to_terms(p)
            yield f"curve_x[{k}]", Certificate.from_json(e)
    for j, y in enumerate(cert.curves_y):
        for k, c in enumerate(y):
            for p in bump_poly(c):
                e = json.loads(json.dumps(d))
                e["curves_y"][j][k] = poly_to_terms(p)
                yield f"curves_y[{j}][{k}]", Certificate.from_json(e)
    for s, step in enumerate(d["witness"]):
        if step["kind"] == "torus":
            for k, w in enumerate(step["weights"]):
                e = json.loads(json.dumps(d))
                e["witness"][s]["weights"][k] = str(parse_ratfun(w) + 1)
                yield f"witness[{s}].weights[{k}]", Certificate.from_json(e)
        else:
            e = json.loads(json.dumps(d))
            e["witness"][s]["param"] = str(parse_ratfun(step["param"]) + 1)
            yield f"witness[{s}].param", Certificate.from_json(e)


# --- automatic searches -----------------------------------------------------------


def torus_lift(m: BorelModel, x: Element, k: int):
    """Integer character m and degree d > 0 with <r, m> = 0 on supp(x) and <root_k, m> = d.

    Returns (m, d) or None when root k lies in the rational span of supp(x).
    """
    d = m.datum
    supp = [d.roots[d.basis_root[i]] for i in x.support()]
    gamma = d.roots[d.basis_root[k]]
    rows = [[Fraction(c) for c in r] for r in supp]
    ker = kernel_basis(rows, d.rank, one=Fraction(1)) if rows else \
        [[Fraction(int(i == j)) for j in range(d.rank)] for i in range(d.rank)]
    best = None
    for v in ker:
        den = 1
        for c in v:
            den = den * c.denominator // _gcd(den, c.denominator)
        w = [int(c * den) for c in v]
        val = sum(a * b for a, b in zip(w, gamma))
        if val < 0:
            w, val = [-a for a in w], -val
        if val > 0 and (best is None or val < best[1]):
            best = (w, val)
    return best


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return abs(a)


def _solve_lift(m: BorelModel, x: Element, c: Element, y: Element):
    """z with [x, z] = [y, c] and [c, z] = 0, or None."""
    n = m.dim_u
    rows, rhs = [], []
    basis = [m.u.basis_element(i) for i in range(n)]
    ax = [bracket(x, e).coords for e in basis]
    ac = [bracket(c, e).coords for e in basis]
    t = bracket(y, c).coords
    for k in range(n):
        rows.append([ax[i][k] for i in range(n)])
        rhs.append(t[k])
    for k in range(n):
        rows.append([ac[i][k] for i in range(n)])
        rhs.append(Fraction(0))
    sol = solve(rows, rhs, n)
    return None if sol is None else m.u.element(sol)


def _torus_word(m: BorelModel, weights_exp, d):
    ws = tuple(ALPHA ** e if e >= 0 else 1 / ALPHA ** (-e) for e in weights_exp)
    return (WitnessStep("torus", ws),)


def linear_certificate(m: BorelModel, x: Element, k: int, name: str = "") -> Certificate | None:
    """Certificate for x -> x + c (c the k-th root vector) with a torus witness, if one exists."""
    if x.coords[k] != 0:
        return None
    lift = torus_lift(m, x, k)
    if lift is None:
        return None
    w, d = lift
    c = m.u.basis_element(k)
    ys = []
    for y in centralizer(x):
        z = _solve_lift(m, x, c, y)
        if z is None:
            return None
        ys.append(tuple(RatFun(a) + RatFun(b) * ALPHA ** d for a, b in zip(y.coords, z.coords)))
    curve = tuple(RatFun(a) + (ALPHA ** d if i == k else 0) for i, a in enumerate(x.coords))
    target = tuple(a + (1 if i == k else 0) for i, a in enumerate(x.coords))
    return Certificate(m.type, name, tuple(x.coords), target, curve, tuple(ys), _torus_word(m, w, d),
                       "a != 0")


def csc3_candidates(m: BorelModel, rec: OrbitRecord):
    """Root vectors c with zrank(x+c) > zrank(x), [c, C_u(x)] in k[c, x],
    and x + c in a different orbit, in basis order."""
    x = rec.rep
    if x.is_zero():
        return
    zr = support_profile(m, x).zrank
    cent = centralizer(x)
    sig = rec.sig.key()
    for k in range(m.dim_u):
        if x.coords[k] != 0:
            continue
        c = m.u.basis_element(k)
        xc = x + c
        if support_profile(m, xc).zrank <= zr:
            continue
        w = bracket(c, x)
        ok = True
        for y in cent:
            v = bracket(c, y)
            if v.is_zero():
                continue
            if w.is_zero() or rank([w.coords, v.coords], m.dim_u) > 1:
                ok = False
                break
        if ok and signature(m, xc).key() != sig:
            yield c


def csc3_search(m: BorelModel, rec: OrbitRecord):
    return next(csc3_candidates(m, rec), None)


def csc3_certificate(m: BorelModel, x: Element, c: Element, name: str = "") -> Certificate:
    """The certificate behind the root-vector lift: y -> y + eta(y) a^d c."""
    k = c.support()[0]
    w, d = torus_lift(m, x, k)
    wx = bracket(x, c)
    ys = []
    for y in centralizer(x):
        v = bracket(y, c)
        if v.is_zero():
            eta = Fraction(0)
        else:
            piv = next(i for i, a in enumerate(wx.coords) if a != 0)
            eta = v.coords[piv] / wx.coords[piv]
        ys.append(tuple(RatFun(a) + (RatFun(eta) * ALPHA ** d if i == k else 0) for i, a in enumerate(y.coords)))
    curve = tuple(RatFun(a) + (ALPHA ** d if i == k else 0) for i, a in enumerate(x.coords))
    target = tuple(a + (1 if i == k else 0) for i, a in enumerate(x.coords))
    return Certificate(m.type, name, tuple(x.coords), target, curve, tuple(ys), _torus_word(m, w, d), "a != 0")


# --- two-parameter families ------------------------------------------------------


def solve_curves(m: BorelModel, curve_x, deg_a: int, deg_b: int) -> list:
    """Basis of all polynomial curves y with deg_a(y) <= deg_a, deg_b(y) <= deg_b and [x(a,b), y] = 0."""
    n = m.dim_u
    xt = {}
    for k, c in enumerate(curve_x):
        for mono, v in RatFun(c).terms().items():
            xt.setdefault(mono, [Fraction(0)] * n)[k] += v
    ad = {mono: [bracket(m.u.element(v), m.u.basis_element(i)).coords for i in range(n)]
          for mono, v in xt.items()}
    blocks = [(i, j) for i in range(deg_a + 1) for j in range(deg_b + 1)]
    col = {b: t * n for t, b in enumerate(blocks)}
    rows = {}
    for mono, img in ad.items():
        for (i, j) in blocks:
            out = (i + mono[0], j + mono[1])
            for k in range(n):
                row = rows.setdefault((out, k), [Fraction(0)] * (n * len(blocks)))
                for v in range(n):
                    row[col[(i, j)] + v] += img[v][k]
    ker = kernel_basis(list(rows.values()), n * len(blocks), one=Fraction(1))
    curves = []
    for vec in ker:
        curves.append(tuple(
            sum((RatFun(vec[col[(i, j)] + k]) * ALPHA ** i * BETA ** j for (i, j) in blocks if vec[col[(i, j)] + k]),
                RatFun(0))
            for k in range(n)))
    return curves


def choose_curves(m: BorelModel, x: Element, curves) -> list | None:
    """Pick y-curves: canonical centralizer vectors at a = 0 where possible, then
    b-dependent curves until the density rank is reached."""
    n = m.dim_u
    cent = [tuple(v.coords) for v in centralizer(x)]
    if not curves:
        return None
    at0 = [[c.subs(a=0) for c in y] for y in curves]
    degb = max((c.degree_in(1) for y in at0 for c in y if c), default=0)

    def expand(v):
        # coefficient vector of y(0, b) in the monomials b^0 .. b^degb
        return [c.terms().get((0, e), Fraction(0)) if c else Fraction(0) for e in range(degb + 1) for c in v]

    cols = [expand(v) for v in at0]
    mat = [[cols[s][r] for s in range(len(curves))] for r in range(len(cols[0]))]
    chosen = []
    for v in cent:
        rhs = list(v) + [Fraction(0)] * (n * degb)
        sol = solve(mat, rhs, len(curves))
        if sol is None:
            continue
        chosen.append(tuple(sum((a * y[k] for a, y in zip(sol, curves) if a), RatFun(0)) for k in range(n)))
    extra = [y for y, v in zip(curves, at0) if not all(_is_beta_free(c) for c in v)]
    extra.sort(key=lambda y: sum(len(c.terms()) for c in y))
    free = [tuple(c.subs(a=0).value() for c in y) for y in chosen]
    param = []
    for y in extra:
        if _density_rank(n, free, param) == len(cent):
            break
        trial = param + [[c.subs(a=0) for c in y]]
        if _density_rank(n, free, trial) > _density_rank(n, free, param):
            param = trial
            chosen.append(y)
    return chosen if _density_rank(n, free, param) == len(cent) else None


def _monomial(r: RatFun):
    t = r.terms()
    return next(iter(t.items())) if len(t) == 1 else None


def sweep_witness(m: BorelModel, target, curve_x) -> tuple | None:
    """A word in torus and root-group elements taking ``target`` to x(a, b), or None.

    The inverse word is built first: a torus element matching the target's
    support where x has monomial coordinates, then root-group elements clearing
    each height in turn.
    """
    d = m.datum
    n = m.dim_u
    X = _rat_element(m, curve_x)
    supp = [k for k in range(n) if target[k] != 0]
    rows, rhs_a, rhs_b, consts = [], [], [], []
    for k in supp:
        mono = _monomial(X.coords[k])
        if mono is None:
            continue
        r = [Fraction(c) for c in d.roots[d.basis_root[k]]]
        if rows and rank(rows + [r], d.rank) == len(rows):
            continue
        (ea, eb), c = mono
        rows.append(r)
        rhs_a.append(Fraction(-ea))
        rhs_b.append(Fraction(-eb))
        consts.append(Fraction(target[k]) / c)
    weights = [RatFun(1)] * d.rank
    if rows:
        pa, pb = solve(rows, rhs_a, d.rank), solve(rows, rhs_b, d.rank)
        if pa is None or pb is None or any(v.denominator != 1 for v in pa + pb):
            return None
        # constant factors: solvable only through roots with unit coefficients here
        if any(c != 1 for c in consts):
            return None
        weights = [ALPHA ** int(a) * BETA ** int(b) for a, b in zip(pa, pb)]
    inverse = [WitnessStep("torus", tuple(weights))]
    X = torus_act(m, weights, X)
    heights = d.heights
    for h in range(2, max(heights) + 1):
        layer = [k for k in range(n) if heights[d.basis_root[k]] == h]
        movers = [k for k in range(n) if heights[d.basis_root[k]] == h - 1]
        imgs = [bracket(m.u.basis_element(k), X).coords for k in movers]
        mat = [[imgs[j][k] for j in range(len(movers))] for k in layer]
        rhs = [RatFun(target[k]) - X.coords[k] for k in layer]
        sol = solve(mat, rhs, len(movers))
        if sol is None:
            return None
        for k, t in zip(movers, sol):
            if t != 0:
                inverse.append(WitnessStep("rootgroup", root=d.basis_root[k], param=t))
                X = root_group_act(m, d.basis_root[k], t, X)
    if any(a != RatFun(b) for a, b in zip(X.coords, target)):
        return None
    word = []
    for step in reversed(inverse):
        if step.kind == "torus":
            word.append(WitnessStep("torus", tuple(1 / w for w in step.weights)))
        else:
            word.append(WitnessStep("rootgroup", root=step.root, param=-step.param))
    return tuple(word)


def family_certificate(m: BorelModel, x: Element, curve_x, target, name: str = "", deg_a: int = 1,
                       deg_b: int = 1, dense_condition: str = "") -> Certificate | None:
    """Solve for y-curves and a witness word for a given curve x(a, b) through x."""
    curves = solve_curves(m, curve_x, deg_a, deg_b)
    ys = choose_curves(m, x, curves)
    word = sweep_witness(m, target, curve_x)
    if ys is None or word is None:
        return None
    cert = Certificate(m.type, name, tuple(x.coords), tuple(Fraction(c) for c in target), tuple(curve_x),
                       tuple(ys), word, dense_condition)
    return cert if verify_certificate(cert) else None


# --- assembly -----------------------------------------------------------------------


@dataclass
class Exclusion:
    record: OrbitRecord
    method: str                      # obstruction | csc3 | certificate | bundled
    detail: str
    target: OrbitRecord | None = None
    certificate: Certificate | None = None


@dataclass
class ComponentReport:
    type: str
    dim_b: int
    components: list = dc_field(default_factory=list)
    excluded: list = dc_field(default_factory=list)
    unresolved: list = dc_field(default_factory=list)
    records: list = dc_field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.unresolved

    def to_json(self, m: BorelModel) -> dict:
        return {
            "type": self.type,
            "dim_b": self.dim_b,
            "components": [
                {"name": r.name, "rep": str(r.rep), "comp_dim": r.comp_dim, "distinguished": r.distinguished,
                 "msupp": [m.datum.root_label(i) for i in r.profile.msupp]}
                for r in self.components],
            "excluded": [
                {"name": e.record.name, "rep": str(e.record.rep), "comp_dim": e.record.comp_dim,
                 "method": e.method, "detail": e.detail,
                 "into": e.target.name if e.target is not None else None}
                for e in self.excluded],
            "unresolved": [{"name": r.name, "rep": str(r.rep)} for r in self.unresolved],
        }


def _find_record(m: BorelModel, records, coords) -> OrbitRecord | None:
    key = signature(m, m.u.element(list(coords))).key()
    hit = [r for r in records if r.sig.key() == key]
    return hit[0] if len(hit) == 1 else None


def assemble_components(type_label: str, records=None, primes=None, use_bundled: bool = True) -> ComponentReport:
    m = model(type_label)
    if records is None:
        records = discover_reps(type_label, primes)
    report = ComponentReport(type_label, m.dim_b, records=list(records))
    top = m.dim_b  # dim Z(G) = 0 for the bundled groups
    bundled = {}
    if use_bundled:
        for cert in bundled_certificates():
            if cert.type == type_label:
                rec = _find_record(m, records, cert.base)
                if rec is not None:
                    bundled.setdefault(rec.name, []).append(cert)
    for rec in records:
        if rec.distinguished and rec.comp_dim == top:
            report.components.append(rec)
            continue
        ex = _exclude(m, rec, records, bundled.get(rec.name, []))
        if ex is None:
            report.unresolved.append(rec)
        else:
            report.excluded.append(ex)
    return report


def _exclude(m: BorelModel, rec: OrbitRecord, records, bundled) -> Exclusion | None:
    y = csc4_obstruction(m, rec)
    if y is not None:
        return Exclusion(rec, "obstruction", f"{y} centralizes x but lies outside v(x)")
    c = csc3_search(m, rec)
    if c is not None:
        cert = csc3_certificate(m, rec.rep, c)
        chk = verify_certificate(cert)
        tgt = _find_record(m, records, cert.target)
        if chk and tgt is not None and tgt.sig != rec.sig:
            return Exclusion(rec, "csc3", f"c = {c}", tgt, cert)
    for k in range(m.dim_u):
        cert = linear_certificate(m, rec.rep, k)
        if cert is None:
            continue
        tgt = _find_record(m, records, cert.target)
        if tgt is None or tgt.sig == rec.sig:
            continue
        if verify_certificate(cert):
            return Exclusion(rec, "certificate", f"x + a^d {m.u.basis[k]}", tgt, cert)
    for cert in bundled:
        tgt = _find_record(m, records, cert.target)
        if tgt is None or tgt.sig == rec.sig:
            continue
        base_sig = signature(m, m.u.element(list(cert.base))).key()
        if base_sig == rec.sig.key() and verify_certificate(cert):
            return Exclusion(rec, "bundled", cert.name, tgt, cert)
    return None


# --- abelian planes ------------------------------------------------------------------


@dataclass
class PlaneComponent:
    name: str
    rep: str
    comp_dim: int
    dim: int                         # comp_dim - 4, the GL_2 fibre dimension removed
    meets_planes: bool               # C_u(x) is larger than k x


@dataclass
class PlaneReport:
    type: str
    dim: int                         # -1 for the empty variety
    components: list

    @property
    def equidimensional(self) -> bool:
        return len({c.dim for c in self.components}) <= 1

    def to_json(self) -> dict:
        return {"type": self.type, "dim": self.dim, "equidimensional": self.equidimensional,
                "components": [c.__dict__ for c in self.components]}


def a2u_report(report: ComponentReport) -> PlaneReport:
    """Components of the variety of two-dimensional abelian subalgebras of u.

    Each component of C_2(u) whose generic pair spans a plane maps onto one of
    dimension comp_dim - 4; when u is a line there are no planes at all.
    """
    comps = []
    for rec in report.components:
        meets = rec.cent_u >= 2
        comps.append(PlaneComponent(rec.name, str(rec.rep), rec.comp_dim, rec.comp_dim - 4 if meets else -1, meets))
    live = [c for c in comps if c.meets_planes]
    return PlaneReport(report.type, max((c.dim for c in live), default=-1), live)
