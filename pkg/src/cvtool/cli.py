"""Command-line front end.

Exit codes: 0 success, 2 check failed or golden-data mismatch, 3 budget
exceeded, 4 input error.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import sys
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import click

from . import golden
from .cache import Cache, code_version, default_dir, dumps
from .census import (CensusMismatch, CensusReport, parse_algebra, poly_str, run_census, witt_analysis,
                     witt_nilcone)
from .components import a2u_report, assemble_components, load_certificate, verify_certificate
from .exact import is_prime
from .liecore import DEFAULT_BUDGET, WITT_KINDS, BudgetExceeded
from .orbits import ModelInconsistency, audit_orbits, bfs_census, discover_reps
from .rootsys import TYPES, model

log = logging.getLogger("cvtool")

EXIT_OK, EXIT_MISMATCH, EXIT_BUDGET, EXIT_INPUT = 0, 2, 3, 4


class InputError(ValueError):
    pass


@dataclass
class RunConfig:
    subcommand: str
    selector: str = ""
    primes: tuple = ()
    budget: int = DEFAULT_BUDGET
    fmt: str = "table"
    cache_dir: Path | None = None
    no_cache: bool = False
    out: Path | None = None
    verbosity: int = 0
    extra: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        if self.budget < 1:
            raise InputError("budget must be at least 1")
        if len(set(self.primes)) != len(self.primes):
            raise InputError(f"primes must be distinct: {self.primes}")
        bad = [p for p in self.primes if not is_prime(p)]
        if bad:
            raise InputError(f"not prime: {bad}")

    @property
    def cache(self) -> Cache:
        return Cache(self.cache_dir or default_dir(), enabled=not self.no_cache)


def _parse_primes(text: str | None) -> tuple:
    if not text:
        return ()
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError as exc:
        raise InputError(f"cannot parse primes {text!r}") from exc


def _emit(cfg: RunConfig, obj: dict, table: str, rows: list | None = None) -> None:
    if cfg.fmt == "json":
        text = dumps(obj)
    elif cfg.fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        for r in rows or []:
            w.writerow(r)
        text = buf.getvalue()
    else:
        text = table if table.endswith("\n") else table + "\n"
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        click.echo(text, nl=False)


def _run(fn):
    """Map exceptions onto the exit-code contract."""
    try:
        code = fn()
    except BudgetExceeded as exc:
        click.echo(f"budget exceeded: {exc}", err=True)
        code = EXIT_BUDGET
    except (InputError, ValueError, KeyError, json.JSONDecodeError, OSError) as exc:
        click.echo(f"input error: {exc}", err=True)
        code = EXIT_INPUT
    except (CensusMismatch, ModelInconsistency) as exc:
        click.echo(f"consistency failure: {exc}", err=True)
        code = EXIT_MISMATCH
    sys.exit(code)


def common(f):
    f = click.option("--budget", type=int, default=DEFAULT_BUDGET, show_default=True,
                     help="Maximum number of enumerated elements.")(f)
    f = click.option("--format", "fmt", type=click.Choice(["table", "json", "csv"]), default="table",
                     show_default=True)(f)
    f = click.option("--cache-dir", type=click.Path(path_type=Path), default=None,
                     help="Cache directory (default $CVTOOL_CACHE or ~/.cache/cvtool).")(f)
    f = click.option("--no-cache", is_flag=True, help="Neither read nor write the cache.")(f)
    f = click.option("--out", type=click.Path(path_type=Path), default=None, help="Write output to FILE.")(f)
    f = click.option("-v", "--verbose", count=True)(f)
    return f


def _config(sub, selector="", primes=None, **kw) -> RunConfig:
    verbose = kw.pop("verbose", 0)
    logging.basicConfig(level=logging.WARNING - 10 * min(verbose, 2), format="%(message)s")
    return RunConfig(sub, selector, _parse_primes(primes), kw["budget"], kw["fmt"], kw["cache_dir"], kw["no_cache"],
                     kw["out"], verbose)


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Commuting varieties of Borel radicals: components, counts and certificates."""


# --- components -------------------------------------------------------------------


@main.command()
@click.option("--type", "type_label", required=True, help="One of A1, A2, A3, A4, B2.")
@click.option("--primes", default=None, help="Discovery primes, comma separated.")
@click.option("--no-bundled", is_flag=True, help="Do not fall back to bundled certificates.")
@common
def components(type_label, primes, no_bundled, **kw):
    """Irreducible components of C_2(u)."""

    def go():
        cfg = _config("components", type_label, primes, **kw)
        if type_label not in TYPES:
            raise InputError(f"unknown type {type_label!r}; expected one of {', '.join(TYPES)}")
        m = model(type_label)
        rep = assemble_components(type_label, primes=cfg.primes or None, use_bundled=not no_bundled)
        planes = a2u_report(rep)
        expected = golden.COMPONENT_COUNTS[type_label]
        dims = sorted({r.comp_dim for r in rep.components})
        match = rep.ok and len(rep.components) == expected and dims == [m.dim_b]
        obj = rep.to_json(m)
        obj.update({"expected_components": expected, "match": match, "planes": planes.to_json()})
        lines = [f"{type_label}: {len(rep.components)} components (expected {expected}), dim B = {m.dim_b}"]
        for r in rep.components:
            lines.append(f"  component {r.name:8s} {str(r.rep):28s} dim {r.comp_dim}")
        for e in rep.excluded:
            into = f" -> {e.target.name}" if e.target is not None else ""
            lines.append(f"  excluded  {e.record.name:8s} {str(e.record.rep):28s} {e.method}{into}")
        for r in rep.unresolved:
            lines.append(f"  UNRESOLVED {r.name} {r.rep}")
        lines.append(f"abelian planes: dim {planes.dim}, {len(planes.components)} components")
        lines.append("PASS" if match else "FAIL")
        rows = [["name", "rep", "comp_dim", "status", "method", "into"]]
        rows += [[r.name, str(r.rep), r.comp_dim, "component", "", ""] for r in rep.components]
        rows += [[e.record.name, str(e.record.rep), e.record.comp_dim, "excluded", e.method,
                  e.target.name if e.target is not None else ""] for e in rep.excluded]
        rows += [[r.name, str(r.rep), r.comp_dim, "unresolved", "", ""] for r in rep.unresolved]
        _emit(cfg, obj, "\n".join(lines), rows)
        return EXIT_OK if match else EXIT_MISMATCH

    _run(go)


# --- census -------------------------------------------------------------------------


def _census_cost(spec: str, primes) -> int:
    from .census import algebra_over
    kind, arg = parse_algebra(spec)
    ps = [arg] if kind in WITT_KINDS else list(primes or golden.DEFAULT_PRIMES.get(kind, (2, 3, 5)))
    return max(p ** algebra_over(spec, p).dim for p in ps)


@main.command()
@click.option("--algebra", required=True, help="A1..A4, B2, heisenberg, abelian:N, witt:P, witt-b:P, witt-u:P.")
@click.option("--primes", default=None, help="Primes, comma separated.")
@common
def census(algebra, primes, **kw):
    """Point counts of C_2, O_2 and the abelian-plane variety, with a dimension verdict."""

    def go():
        cfg = _config("census", algebra, primes, **kw)
        parse_algebra(algebra)
        cost = _census_cost(algebra, cfg.primes)
        if cost > cfg.budget:
            raise BudgetExceeded(f"{algebra}: {cost} elements exceeds budget {cfg.budget}")
        key = f"census-{algebra}-{'-'.join(map(str, sorted(cfg.primes))) or 'default'}-{code_version()}"
        cached = cfg.cache.get(key)
        if cached is not None:
            log.info("cache hit %s", key)
            rep = CensusReport.from_json(cached)
        else:
            rep = run_census(algebra, cfg.primes or None, cfg.budget)
            cfg.cache.put(key, rep.to_json())
        obj = rep.to_json()
        lines = [f"{algebra}"]
        lines.append(f"  {'q':>4s} {'|C2|':>16s} {'|O2|':>16s} {'|A(2)|':>12s}")
        for q, c, o, a in zip(rep.primes, rep.c2, rep.o2, rep.a2u):
            lines.append(f"  {q:>4d} {c:>16d} {o:>16d} {a:>12d}")
        if rep.poly:
            lines.append(f"  |C2| = {poly_str(rep.poly)}")
        if rep.a2u_poly:
            lines.append(f"  |A(2)| fit through the given primes = {poly_str(rep.a2u_poly)}")
        lines.append(f"  dim C2 = {rep.dim} ({rep.method}); expected {rep.expected_dim}: {rep.verdict}")
        rows = [["q", "c2", "dep", "o2", "a2u"]] + [list(r) for r in zip(rep.primes, rep.c2, rep.dep, rep.o2, rep.a2u)]
        _emit(cfg, obj, "\n".join(lines), rows)
        return EXIT_MISMATCH if rep.verdict == "FAIL" else EXIT_OK

    _run(go)


# --- orbits -----------------------------------------------------------------------------


@main.command()
@click.option("--type", "type_label", required=True)
@click.option("--q", "q", type=int, required=True, help="A prime.")
@common
def orbits(type_label, q, **kw):
    """B(F_q)-orbits on u(F_q) with their signatures and the audit invariants."""

    def go():
        cfg = _config("orbits", type_label, str(q), **kw)
        if type_label not in TYPES:
            raise InputError(f"unknown type {type_label!r}")
        m = model(type_label)
        part = bfs_census(m, q, cfg.budget)
        records = discover_reps(type_label, budget=cfg.budget)
        audit = audit_orbits(type_label, q, records, part, cfg.budget)
        obj = {
            "type": type_label, "q": q, "n_orbits": part.n_orbits, "coverage": part.coverage,
            "total": q ** m.dim_u, "group_order": audit.group_order, "audit_ok": audit.ok,
            "unmatched": audit.unmatched, "ambiguous": audit.ambiguous,
            "orbits": [{"rep": list(r), "size": s} for r, s in zip(part.reps, part.sizes)],
            "records": [r.to_json(m) for r in records],
        }
        lines = [f"{type_label} over F_{q}: {part.n_orbits} orbits, coverage {part.coverage}/{q ** m.dim_u}"]
        for r, s in zip(part.reps, part.sizes):
            lines.append(f"  {str(r):40s} size {s}")
        lines.append(f"signature classes over Q: {len(records)}")
        for rec in records:
            lines.append(f"  {rec.name:8s} {str(rec.rep):28s} cent_u {rec.cent_u} cent_b {rec.cent_b} "
                         f"orbit_dim {rec.orbit_dim}{' distinguished' if rec.distinguished else ''}")
        lines.append("audit " + ("PASS" if audit.ok else "FAIL"))
        rows = [["rep", "size"]] + [[" ".join(map(str, r)), s] for r, s in zip(part.reps, part.sizes)]
        _emit(cfg, obj, "\n".join(lines), rows)
        return EXIT_OK if audit.ok else EXIT_MISMATCH

    _run(go)


# --- certify ------------------------------------------------------------------------------


@main.command()
@click.argument("file", type=click.Path(path_type=Path))
@common
def certify(file, **kw):
    """Verify a degeneration certificate file."""

    def go():
        cfg = _config("certify", str(file), None, **kw)
        try:
            cert = load_certificate(file)
        except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise InputError(f"cannot read certificate {file}: {exc}") from exc
        chk = verify_certificate(cert)
        obj = {"file": str(file), "name": cert.name, "type": cert.type, "ok": chk.ok, "message": chk.message,
               "nonvanishing": list(chk.nonvanishing)}
        table = f"{file}: {'PASS' if chk.ok else 'FAIL'}" + ("" if chk.ok else f"\n  {chk.message}")
        _emit(cfg, obj, table, [["file", "ok", "message"], [str(file), chk.ok, chk.message]])
        return EXIT_OK if chk.ok else EXIT_MISMATCH

    _run(go)


# --- witt --------------------------------------------------------------------------------


@main.command("witt")
@click.option("--algebra", required=True, help="witt:P, witt-b:P or witt-u:P.")
@click.option("--nilcone", is_flag=True, help="Also analyse the p-nilpotent cone of W(1).")
@common
def witt_cmd(algebra, nilcone, **kw):
    """Rank strata, modality and components for the Witt chain."""

    def go():
        cfg = _config("witt", algebra, None, **kw)
        kind, p = parse_algebra(algebra)
        if kind not in WITT_KINDS:
            raise InputError(f"{algebra} is not a Witt algebra")
        dim = p - 1 - WITT_KINDS[kind]
        if p ** dim > cfg.budget:
            raise BudgetExceeded(f"{algebra}: {p}^{dim} = {p ** dim} elements exceeds budget {cfg.budget}; "
                                 f"raise --budget to run it")
        key = f"witt-{algebra}{'-nil' if nilcone else ''}-{code_version()}"
        obj = cfg.cache.get(key)
        if obj is None:
            rep = witt_analysis(kind, p, cfg.budget)
            obj = rep.to_json()
            if nilcone:
                if kind != "witt":
                    raise InputError("the nilpotent cone is analysed for W(1) only")
                obj["nilcone"] = {k: (v if k != "strata" else {str(r): d for r, d in v.items()})
                                  for k, v in witt_nilcone(p, cfg.budget).items()}
            cfg.cache.put(key, obj)
        expect = {"c2_dim": golden.WITT_C2_DIM[kind](p), "modality": golden.WITT_MODALITY[kind],
                  "n_components": golden.WITT_COMPONENTS[kind](p)}
        got = {"c2_dim": obj["c2_dim"], "modality": obj["modality"], "n_components": len(obj["components"])}
        match = got == expect and not obj["unresolved"] and obj["kernel_table_ok"] is not False
        if nilcone:
            match = match and obj["nilcone"]["c2_dim"] == p
        obj["expected"] = expect
        obj["match"] = match
        lines = [f"{algebra}: dim {obj['dim']}, mod {obj['modality']}, dim C2 {obj['c2_dim']}"]
        lines.append(f"  {'rank':>4s} {'count':>10s} {'dim':>4s} {'ker':>4s} {'total':>5s}  status")
        for s in obj["strata"]:
            status = "component" if s["component"] else ("candidate" if s["candidate"] else "excluded")
            lines.append(f"  {s['rank']:>4d} {s['count']:>10s} {s['dim']:>4d} {s['kernel_dim']:>4d} "
                         f"{s['comp_dim']:>5d}  {status}")
        lines.append(f"  component ranks {obj['component_range'][0]}..{obj['component_range'][1]} "
                     f"({len(obj['components'])} components)")
        if obj.get("kernel_table_ok") is not None:
            lines.append(f"  kernel table {'matches' if obj['kernel_table_ok'] else 'DIFFERS'}")
        if nilcone:
            lines.append(f"  nilpotent cone: dim {obj['nilcone']['cone_dim']}, dim C2 {obj['nilcone']['c2_dim']}")
        lines.append("PASS" if match else "FAIL")
        rows = [["rank", "count", "dim", "kernel_dim", "comp_dim", "component"]]
        rows += [[s["rank"], s["count"], s["dim"], s["kernel_dim"], s["comp_dim"], s["component"]]
                 for s in obj["strata"]]
        _emit(cfg, obj, "\n".join(lines), rows)
        return EXIT_OK if match else EXIT_MISMATCH

    _run(go)


# --- cache --------------------------------------------------------------------------------


@main.command("cache")
@click.argument("action", type=click.Choice(["path", "list", "clear"]))
@click.option("--cache-dir", type=click.Path(path_type=Path), default=None)
def cache_cmd(action, cache_dir):
    """Show, list or clear the on-disk cache."""

    def go():
        c = Cache(cache_dir or default_dir())
        if action == "path":
            click.echo(str(c.root))
        elif action == "list":
            for e in c.entries():
                click.echo(e)
        else:
            click.echo(f"removed {c.clear()} entries")
        return EXIT_OK

    _run(go)


if __name__ == "__main__":
    main()
