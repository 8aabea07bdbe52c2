"""Exact scalars and linear algebra.

Three coefficient domains are used throughout the package:

* rationals, as :class:`fractions.Fraction`;
* prime fields, as :class:`GF` elements (or raw numpy integer arrays on the
  hot enumeration paths);
* rational functions in two parameters ``a`` and ``b``, as :class:`RatFun`.

All elimination routines are written against the ordinary arithmetic
operators, so they work unchanged over any of the three domains.
"""

from __future__ import annotations

import ast
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from sympy import QQ, ZZ, Matrix
from sympy.matrices.normalforms import smith_normal_form
from sympy.polys.fields import field as _frac_field


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def parse_fraction(s) -> Fraction:
    """Parse ``"num/den"`` (or an int) into a reduced Fraction."""
    if isinstance(s, int):
        return Fraction(s)
    return Fraction(str(s).strip())


def format_fraction(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


class GF:
    """An element of the prime field F_p, stored as 0..p-1."""

    __slots__ = ("v", "p")

    def __init__(self, v, p: int):
        if isinstance(v, Fraction):
            v = v.numerator * pow(v.denominator, -1, p)
        self.v = int(v) % p
        self.p = p

    def _coerce(self, o):
        if isinstance(o, GF):
            if o.p != self.p:
                raise ValueError("mixing different prime fields")
            return o.v
        if isinstance(o, (int, np.integer)):
            return int(o) % self.p
        if isinstance(o, Fraction):
            return GF(o, self.p).v
        return NotImplemented

    def __add__(self, o):
        w = self._coerce(o)
        return NotImplemented if w is NotImplemented else GF(self.v + w, self.p)

    __radd__ = __add__

    def __sub__(self, o):
        w = self._coerce(o)
        return NotImplemented if w is NotImplemented else GF(self.v - w, self.p)

    def __rsub__(self, o):
        w = self._coerce(o)
        return NotImplemented if w is NotImplemented else GF(w - self.v, self.p)

    def __mul__(self, o):
        w = self._coerce(o)
        return NotImplemented if w is NotImplemented else GF(self.v * w, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return GF(-self.v, self.p)

    def __truediv__(self, o):
        w = self._coerce(o)
        if w is NotImplemented:
            return NotImplemented
        if w == 0:
            raise ZeroDivisionError("division by zero in F_%d" % self.p)
        return GF(self.v * pow(w, -1, self.p), self.p)

    def __rtruediv__(self, o):
        w = self._coerce(o)
        if w is NotImplemented:
            return NotImplemented
        if self.v == 0:
            raise ZeroDivisionError("division by zero in F_%d" % self.p)
        return GF(w * pow(self.v, -1, self.p), self.p)

    def __pow__(self, k: int):
        if k < 0:
            return GF(1, self.p) / GF(pow(self.v, -k, self.p), self.p)
        return GF(pow(self.v, k, self.p), self.p)

    def __eq__(self, o):
        w = self._coerce(o)
        return False if w is NotImplemented else self.v == w

    def __hash__(self):
        return hash((self.v, self.p))

    def __int__(self):
        return self.v

    def __repr__(self):
        return f"GF({self.v}, {self.p})"

    def __str__(self):
        return str(self.v)


@dataclass(frozen=True)
class Field:
    """Coefficient-domain descriptor: kind is "Q" or "Fp"."""

    kind: str = "Q"
    p: int | None = None

    def __post_init__(self):
        if self.kind not in ("Q", "Fp"):
            raise ValueError(f"unknown field kind {self.kind!r}")
        if self.kind == "Fp" and (self.p is None or not is_prime(self.p)):
            raise ValueError(f"F_p needs a prime p, got {self.p}")

    def __call__(self, x):
        if self.kind == "Q":
            if isinstance(x, GF):
                raise TypeError("cannot lift an F_p value to Q")
            if isinstance(x, RatFun):
                return x
            return Fraction(x) if not isinstance(x, str) else parse_fraction(x)
        if isinstance(x, str):
            x = parse_fraction(x)
        return x if isinstance(x, GF) and x.p == self.p else GF(x, self.p)

    @property
    def zero(self):
        return self(0)

    @property
    def one(self):
        return self(1)

    def to_json(self) -> dict:
        return {"kind": "Q"} if self.kind == "Q" else {"kind": "Fp", "p": self.p}

    @classmethod
    def from_json(cls, d: dict) -> "Field":
        return cls(d["kind"], d.get("p"))

    def __str__(self):
        return "Q" if self.kind == "Q" else f"F_{self.p}"


QF = Field("Q")


def format_scalar(x) -> str:
    if isinstance(x, GF):
        return str(x.v)
    if isinstance(x, RatFun):
        return str(x)
    return format_fraction(x)


# --- integer matrices ---------------------------------------------------------


def smith_diagonal(rows) -> list[int]:
    """Nonzero invariant factors of an integer matrix (Smith normal form)."""
    rows = [list(map(int, r)) for r in rows]
    if not rows or not rows[0]:
        return []
    s = smith_normal_form(Matrix(rows), domain=ZZ)
    out = []
    for i in range(min(s.shape)):
        if s[i, i] != 0:
            out.append(abs(int(s[i, i])))
    return out


def smith_rank(rows) -> int:
    """Rank over Z (equivalently over Q) of an integer matrix."""
    return len(smith_diagonal(rows))


# --- generic elimination --------------------------------------------------------


def rref(rows, ncols: int | None = None):
    """Reduced row echelon form over any exact field.

    Returns (nonzero rows of the echelon form, pivot columns).
    """
    a = [list(r) for r in rows]
    if ncols is None:
        ncols = len(a[0]) if a else 0
    pivots = []
    r = 0
    for c in range(ncols):
        if r == len(a):
            break
        k = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if k is None:
            continue
        a[r], a[k] = a[k], a[r]
        inv = 1 / a[r][c]
        a[r] = [v * inv for v in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [u - f * v for u, v in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return a[:r], pivots


def rank(rows, ncols: int | None = None) -> int:
    return len(rref(rows, ncols)[1])


def kernel_basis(rows, ncols: int | None = None, one=1):
    """Basis of the right kernel, returned in reduced echelon form.

    ``one`` fixes the scalar type of the output when the matrix has no rows.
    """
    if ncols is None:
        ncols = len(rows[0])
    red, pivots = rref(rows, ncols)
    if red:
        one = 1 / red[0][pivots[0]]
    zero = one - one
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [zero] * ncols
        v[f] = one
        for r, pc in enumerate(pivots):
            v[pc] = -red[r][f]
        basis.append(v)
    if not basis:
        return []
    out, _ = rref(basis, ncols)
    return out


def solve(rows, rhs, ncols: int | None = None):
    """One solution of rows * v = rhs supported on pivot columns, or None."""
    if ncols is None:
        ncols = len(rows[0])
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    red, pivots = rref(aug, ncols + 1)
    if ncols in pivots:
        return None
    zero = (rhs[0] - rhs[0]) if rhs else 0
    v = [zero] * ncols
    for r, pc in enumerate(pivots):
        v[pc] = red[r][ncols]
    return v


def mat_vec(rows, v):
    return [sum((a * b for a, b in zip(r, v)), v[0] - v[0]) for r in rows]


def batch_rank_mod_p(mats, p: int, chunk: int = 1 << 15) -> np.ndarray:
    """Ranks over F_p of a stack of matrices with shape (N, r, c)."""
    mats = np.asarray(mats)
    n, nr, nc = mats.shape
    inv = np.zeros(p, dtype=np.int64)
    for a in range(1, p):
        inv[a] = pow(a, -1, p)
    out = np.zeros(n, dtype=np.int64)
    rows = np.arange(nr)
    for s in range(0, n, chunk):
        a = np.mod(mats[s:s + chunk], p).astype(np.int64)
        m = a.shape[0]
        prow = np.zeros(m, dtype=np.int64)
        for c in range(nc):
            cand = (a[:, :, c] != 0) & (rows[None, :] >= prow[:, None])
            has = cand.any(axis=1)
            idx = np.nonzero(has)[0]
            if idx.size == 0:
                continue
            piv = cand[idx].argmax(axis=1)
            cur = prow[idx]
            top = a[idx, cur].copy()
            a[idx, cur] = a[idx, piv]
            a[idx, piv] = top
            pr = a[idx, cur] * inv[a[idx, cur, c]][:, None] % p
            a[idx, cur] = pr
            f = a[idx, :, c].copy()
            f[np.arange(idx.size), cur] = 0
            a[idx] = (a[idx] - f[:, :, None] * pr[:, None, :]) % p
            prow[idx] += 1
        out[s:s + chunk] = prow
    return out


# --- rational functions in (a, b) ----------------------------------------------

_K, _A, _B = _frac_field("a,b", QQ)
_NAMES = {"a": _A, "alpha": _A, "b": _B, "beta": _B}


class RatFun:
    """Rational function in the parameters a (alpha) and b (beta) over Q.

    Backed by sympy's fraction field, which cancels common factors; the
    public numerator/denominator pair is rescaled to a monic denominator.
    """

    __slots__ = ("f",)

    def __init__(self, value=0):
        if isinstance(value, RatFun):
            self.f = value.f
        elif isinstance(value, Fraction):
            self.f = _K(QQ(value.numerator, value.denominator))
        elif isinstance(value, (int, np.integer)):
            self.f = _K(int(value))
        else:
            self.f = value

    @staticmethod
    def _lift(o):
        if isinstance(o, RatFun):
            return o.f
        if isinstance(o, (int, np.integer, Fraction)):
            return RatFun(o).f
        return None

    def __add__(self, o):
        g = self._lift(o)
        return NotImplemented if g is None else RatFun(self.f + g)

    __radd__ = __add__

    def __sub__(self, o):
        g = self._lift(o)
        return NotImplemented if g is None else RatFun(self.f - g)

    def __rsub__(self, o):
        g = self._lift(o)
        return NotImplemented if g is None else RatFun(g - self.f)

    def __mul__(self, o):
        g = self._lift(o)
        return NotImplemented if g is None else RatFun(self.f * g)

    __rmul__ = __mul__

    def __truediv__(self, o):
        g = self._lift(o)
        if g is None:
            return NotImplemented
        if not g:
            raise ZeroDivisionError("division by the zero rational function")
        return RatFun(self.f / g)

    def __rtruediv__(self, o):
        g = self._lift(o)
        if g is None:
            return NotImplemented
        if not self.f:
            raise ZeroDivisionError("division by the zero rational function")
        return RatFun(g / self.f)

    def __neg__(self):
        return RatFun(-self.f)

    def __pow__(self, k: int):
        if k < 0:
            return 1 / RatFun(self.f ** (-k))
        return RatFun(self.f ** k)

    def __eq__(self, o):
        g = self._lift(o)
        return False if g is None else not (self.f - g).numer

    def __hash__(self):
        n, d = self.parts()
        return hash((tuple(sorted(n.items())), tuple(sorted(d.items()))))

    def __bool__(self):
        return bool(self.f.numer)

    def parts(self):
        """Canonical (numerator, denominator) as {(i, j): Fraction} maps."""
        num, den = self.f.numer, self.f.denom
        lc = den.LC
        conv = lambda p: {m: Fraction(int(c.numerator), int(c.denominator)) / lc_f
                          for m, c in p.terms()}
        lc_f = Fraction(int(lc.numerator), int(lc.denominator))
        return conv(num), conv(den)

    def is_polynomial(self) -> bool:
        return self.f.denom.is_ground

    def terms(self) -> dict:
        """Coefficient map of a polynomial value."""
        if not self.is_polynomial():
            raise ValueError(f"{self} is not a polynomial")
        return {m: c for m, c in self.parts()[0].items() if c}

    def degree_in(self, var: int) -> int:
        return max((m[var] for m in self.terms()), default=-1)

    def subs(self, a=None, b=None) -> "RatFun":
        """Substitute values (numbers or RatFuns) for a and/or b."""
        n, d = self.parts()

        va = RatFun(_A) if a is None else RatFun(a)
        vb = RatFun(_B) if b is None else RatFun(b)

        def ev(poly):
            total = RatFun(0)
            for (i, j), c in poly.items():
                t = RatFun(c)
                if i:
                    t = t * va ** i
                if j:
                    t = t * vb ** j
                total = total + t
            return total

        return ev(n) / ev(d)

    def value(self) -> Fraction:
        """The constant value of a parameter-free function."""
        n, d = self.parts()
        if any(m != (0, 0) for m in list(n) + list(d)):
            raise ValueError(f"{self} is not constant")
        return n.get((0, 0), Fraction(0)) / d[(0, 0)]

    def __str__(self):
        n, d = self.parts()
        ns, ds = _poly_str(n), _poly_str(d)
        if ds == "1":
            return ns
        return f"({ns})/({ds})"

    def __repr__(self):
        return f"RatFun({str(self)!r})"


def _mono_str(m):
    out = []
    for name, e in zip("ab", m):
        if e == 1:
            out.append(name)
        elif e > 1:
            out.append(f"{name}^{e}")
    return "*".join(out)


def _poly_str(poly) -> str:
    if not poly:
        return "0"
    parts = []
    for m in sorted(poly, key=lambda m: (-(m[0] + m[1]), -m[0], -m[1])):
        c = poly[m]
        mono = _mono_str(m)
        sign = "-" if c < 0 else "+"
        c = abs(c)
        if not mono:
            body = format_fraction(c)
        elif c == 1:
            body = mono
        else:
            body = f"{format_fraction(c)}*{mono}"
        parts.append((sign, body))
    s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        s += f" {sign} {body}"
    return s


ALPHA = RatFun(_A)
BETA = RatFun(_B)


def ratfun_normalize(r) -> RatFun:
    """Canonical form; raises ZeroDivisionError on a zero denominator."""
    if isinstance(r, tuple):
        num, den = r
        return RatFun(num) / RatFun(den)
    return RatFun(r)


def _eval_node(node):
    if isinstance(node, ast.Expression):
        return _eval_node(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
        return RatFun(node.value)
    if isinstance(node, ast.Name) and node.id in _NAMES:
        return RatFun(_NAMES[node.id])
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval_node(node.operand)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp):
        if isinstance(node.op, ast.Pow):
            e = node.right
            sign = 1
            if isinstance(e, ast.UnaryOp) and isinstance(e.op, ast.USub):
                sign, e = -1, e.operand
            if not (isinstance(e, ast.Constant) and isinstance(e.value, int)):
                raise ValueError("exponents must be integer literals")
            return _eval_node(node.left) ** (sign * e.value)
        ops = {ast.Add: "__add__", ast.Sub: "__sub__", ast.Mult: "__mul__", ast.Div: "__truediv__"}
        for op, meth in ops.items():
            if isinstance(node.op, op):
                return getattr(_eval_node(node.left), meth)(_eval_node(node.right))
    raise ValueError(f"unsupported syntax in rational function: {ast.dump(node)}")


def parse_ratfun(s) -> RatFun:
    """Parse strings such as ``"1/(a*b)"`` or ``"a^2 - 3/2*b"``."""
    if isinstance(s, (int, Fraction)):
        return RatFun(s)
    try:
        tree = ast.parse(str(s).replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse rational function {s!r}") from exc
    return _eval_node(tree)


def poly_from_terms(terms) -> RatFun:
    """Build a polynomial from ``[[i, j, "num/den"], ...]`` (exponents of a, b)."""
    total = RatFun(0)
    for i, j, c in terms:
        total = total + RatFun(parse_fraction(c)) * ALPHA ** int(i) * BETA ** int(j)
    return total


def poly_to_terms(r: RatFun) -> list:
    t = r.terms()
    return [[i, j, format_fraction(t[(i, j)])] for (i, j) in sorted(t)]
