"""Regenerate the bundled degeneration certificates in src/cvtool/data/certs.

Run from the repository root:  python3 scripts/make_certs.py
Every certificate is verified before it is written.
"""

from __future__ import annotations

import sys

from cvtool.components import (CERT_DIR, Certificate, WitnessStep, csc3_certificate, family_certificate,
                               sweep_witness, verify_certificate)
from cvtool.exact import ALPHA, BETA, RatFun
from cvtool.golden import PINNED
from cvtool.rootsys import model

A, B = ALPHA, BETA


def rep(t, name):
    return model(t).element(PINNED[t][name])


def vec(t, terms):
    """Coordinate vector of RatFuns from {label: coefficient}."""
    m = model(t)
    out = [RatFun(0)] * m.dim_u
    for lab, c in terms.items():
        out[m.u.basis.index(lab)] += c
    return tuple(out)


def plus(t, x, terms):
    return tuple(RatFun(a) + b for a, b in zip(x.coords, vec(t, terms)))


def root(t, lab):
    m = model(t)
    return m.datum.basis_root[m.u.basis.index(lab)]


def family(t, base, target, terms, name, deg_a=1, deg_b=0, dense=""):
    m = model(t)
    x = rep(t, base)
    cert = family_certificate(m, x, plus(t, x, terms), rep(t, target).coords, name, deg_a, deg_b, dense)
    if cert is None:
        raise SystemExit(f"{name}: no certificate found")
    return cert


def by_hand(t, base, target, curve, ys, word, name, dense):
    x, z = rep(t, base), rep(t, target)
    return Certificate(t, name, tuple(x.coords), tuple(z.coords), curve, tuple(ys), tuple(word), dense)


def e13_to_e1():
    t = "A4"
    x = rep(t, "e13")
    curve = plus(t, x, {"E23": A, "E34": A * B})
    ys = [curve,
          vec(t, {"E13": 1, "E35": B, "E24": A * B}),
          vec(t, {"E14": 1, "E25": 1}),
          vec(t, {"E15": 1})]
    word = [WitnessStep("torus", (RatFun(1), A, A * B, RatFun(1))),
            WitnessStep("rootgroup", root=root(t, "E12"), param=1 / (A ** 2 * B)),
            WitnessStep("rootgroup", root=root(t, "E23"), param=1 / (A * B))]
    return by_hand(t, "e13", "e1", curve, ys, word, "a4_e13_to_e1",
                   "covers y with nonzero E13 and E35 coefficients, b their ratio")


def e31_to_e29():
    t = "A4"
    x = rep(t, "e31")
    curve = plus(t, x, {"E35": A})
    ys = [vec(t, {"E23": 1, "E35": A}), vec(t, {"E13": 1, "E45": A}), vec(t, {"E24": 1}),
          vec(t, {"E14": 1}), vec(t, {"E25": 1}), vec(t, {"E15": 1})]
    m = model(t)
    word = sweep_witness(m, rep(t, "e29").coords, curve)
    return by_hand(t, "e31", "e29", curve, ys, word, "a4_e31_to_e29", "a != 0")


def to_e9(i):
    """x(s, r) = E12 + E34 + s E24 + r E25 through e10, e11, e12."""
    t = "A4"
    s0, r0 = {10: (1, 0), 11: (0, 1), 12: (0, 0)}[i]
    s = RatFun(1) if i == 10 else A
    r = RatFun(1) if i == 11 else A
    x = rep(t, f"e{i}")
    curve = vec(t, {"E12": 1, "E34": 1, "E24": s, "E25": r})
    ys = [vec(t, {"E12": 1, "E24": s, "E25": r}), vec(t, {"E34": 1}), vec(t, {"E13": 1, "E24": 1}),
          vec(t, {"E35": 1}), vec(t, {"E14": 1}), vec(t, {"E15": 1})]
    m = model(t)
    word = sweep_witness(m, rep(t, "e9").coords, curve)
    assert (s0, r0) == tuple(int(c.subs(a=0).value()) for c in (s, r))
    return by_hand(t, f"e{i}", "e9", curve, ys, word, f"a4_e{i}_to_e9", "a != 0")


def csc3(t, base, label, name):
    m = model(t)
    x = rep(t, base)
    cert = csc3_certificate(m, x, m.u.basis_element(m.u.basis.index(label)), name)
    return cert


def build() -> list:
    return [
        family("A3", "e2", "e1", {"E34": A}, "a3_e2_to_e1", dense="a != 0"),
        e13_to_e1(),
        e31_to_e29(),
        to_e9(10), to_e9(11), to_e9(12),
        csc3("A4", "e15", "E25", "a4_e15_to_e14"),
        csc3("B2", "xb", "xa", "b2_xb_to_xa_xb"),
        csc3("B2", "xa", "xa2b", "b2_xa_to_xa_xa2b"),
        # one-parameter families of centralizers, found by scripts/search_families.py
        family("A3", "e8", "e1", {"E12": A, "E34": A * B}, "a3_e8_to_e1", 1, 2,
               "dense in C_u(x) after varying b"),
        family("A4", "e23", "e1", {"E12": A, "E45": A * B}, "a4_e23_to_e1", 1, 1,
               "dense in C_u(x) after varying b"),
        family("A4", "e14", "e3", {"E23": A, "E24": A * B}, "a4_e14_to_e3", 1, 1,
               "dense in C_u(x) after varying b"),
    ]


def main() -> int:
    CERT_DIR.mkdir(parents=True, exist_ok=True)
    bad = 0
    for cert in build():
        chk = verify_certificate(cert)
        print(f"{cert.name:22s} {'ok' if chk else 'FAIL: ' + chk.message}")
        if chk:
            cert.dump(CERT_DIR / f"{cert.name}.json")
        else:
            bad += 1
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
