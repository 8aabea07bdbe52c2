"""Search two-parameter curves x + a*c1 + a*b*c2 for records left unresolved.

For each unresolved record and each ordered pair of root vectors (c1, c2) the
script tries to build a verified certificate into the generic orbit of the
curve.  Usage:  python3 scripts/search_families.py A4
"""

from __future__ import annotations

import argparse
import itertools

from cvtool.components import _find_record, assemble_components, family_certificate
from cvtool.exact import ALPHA, BETA, RatFun
from cvtool.rootsys import model


def search(type_label: str, max_deg_b: int = 2, limit: int = 3) -> None:
    m = model(type_label)
    report = assemble_components(type_label, use_bundled=False)
    for rec in report.unresolved:
        x = rec.rep
        print(f"{rec.name}: {x}")
        hits = 0
        for k1, k2 in itertools.permutations(range(m.dim_u), 2):
            curve = [RatFun(c) for c in x.coords]
            curve[k1] += ALPHA
            curve[k2] += ALPHA * BETA
            sample = [c.subs(a=3, b=5).value() for c in curve]
            tgt = _find_record(m, report.records, sample)
            if tgt is None or tgt.sig == rec.sig or tgt.comp_dim < rec.comp_dim:
                continue
            for deg_b in range(1, max_deg_b + 1):
                cert = family_certificate(m, x, tuple(curve), tuple(tgt.rep.coords), "", 1, deg_b)
                if cert is not None:
                    print(f"   + a {m.u.basis[k1]} + a b {m.u.basis[k2]}  ->  {tgt.name}  (deg_b {deg_b})")
                    hits += 1
                    break
            if hits >= limit:
                break


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("types", nargs="+")
    ap.add_argument("--max-deg-b", type=int, default=2)
    ap.add_argument("--limit", type=int, default=3)
    args = ap.parse_args()
    for t in args.types:
        search(t, args.max_deg_b, args.limit)


if __name__ == "__main__":
    main()
