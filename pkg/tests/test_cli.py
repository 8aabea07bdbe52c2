import csv
import io
import json

import pytest
from click.testing import CliRunner

from cvtool.cache import ENV_VAR, Cache, code_version, default_dir, dumps
from cvtool.cli import InputError, RunConfig, main
from cvtool.components import CERT_DIR


@pytest.fixture
def run(tmp_path):
    runner = CliRunner()

    def _run(*args):
        return runner.invoke(main, list(args), env={ENV_VAR: str(tmp_path / "cache")}, catch_exceptions=False)

    return _run


@pytest.mark.parametrize("t, n", [("A1", 1), ("B2", 2), ("A4", 5)])
def test_components(run, t, n):
    res = run("components", "--type", t, "--format", "json")
    assert res.exit_code == 0
    d = json.loads(res.output)
    assert len(d["components"]) == n and d["match"]
    assert {c["comp_dim"] for c in d["components"]} == {d["dim_b"]}


def test_components_table(run):
    res = run("components", "--type", "A3")
    assert res.exit_code == 0 and "PASS" in res.output and "e3" in res.output


def test_components_mismatch_without_bundled(run):
    res = run("components", "--type", "A4", "--no-bundled")
    assert res.exit_code == 2 and "UNRESOLVED" in res.output


@pytest.mark.parametrize("t, q, n", [("A2", 2, 5), ("A1", 5, 2), ("A4", 2, 61)])
def test_orbits(run, t, q, n):
    res = run("orbits", "--type", t, "--q", str(q), "--format", "json")
    assert res.exit_code == 0
    d = json.loads(res.output)
    assert d["n_orbits"] == n and d["coverage"] == d["total"] == q ** {"A1": 1, "A2": 3, "A4": 10}[t]
    assert d["audit_ok"]


def test_orbits_budget(run):
    res = run("orbits", "--type", "A4", "--q", "5")
    assert res.exit_code == 3 and "budget" in res.output


def test_census_a2(run):
    res = run("census", "--algebra", "A2", "--primes", "2,3,5,7,11,13", "--format", "json")
    assert res.exit_code == 0
    d = json.loads(res.output)
    assert d["dim"] == 5 and d["verdict"] == "PASS" and d["method"] == "interpolation"


@pytest.mark.parametrize("spec, dim", [("witt:5", 6), ("witt-u:7", 7)])
def test_census_witt(run, spec, dim):
    res = run("census", "--algebra", spec, "--format", "json")
    d = json.loads(res.output)
    assert res.exit_code == 0 and d["dim"] == dim and d["verdict"] == "PASS"


def test_census_csv(run):
    res = run("census", "--algebra", "heisenberg", "--primes", "2,3", "--format", "csv")
    rows = list(csv.reader(io.StringIO(res.output)))
    assert rows[0] == ["q", "c2", "dep", "o2", "a2u"] and rows[1][:2] == ["2", "40"]


@pytest.mark.parametrize("args", [
    ("census", "--algebra", "A2", "--primes", "2,4"),
    ("census", "--algebra", "A2", "--primes", "2,2"),
    ("census", "--algebra", "A2", "--primes", "two"),
    ("census", "--algebra", "G2"),
    ("components", "--type", "G2"),
    ("census", "--algebra", "A2", "--budget", "0"),
])
def test_input_errors(run, args):
    assert run(*args).exit_code == 4


def test_census_budget(run):
    assert run("census", "--algebra", "A4", "--primes", "7").exit_code == 3


def test_witt_p11_refused_by_default(run):
    res = run("witt", "--algebra", "witt:11")
    assert res.exit_code == 3 and "budget" in res.output


def test_witt_report(run):
    res = run("witt", "--algebra", "witt:5", "--nilcone", "--format", "json")
    d = json.loads(res.output)
    assert res.exit_code == 0 and d["match"] and d["nilcone"]["c2_dim"] == 5


def test_witt_rejects_non_witt(run):
    assert run("witt", "--algebra", "A2").exit_code == 4


@pytest.mark.parametrize("name", ["a3_e2_to_e1", "a4_e13_to_e1"])
def test_certify_bundled(run, name):
    res = run("certify", str(CERT_DIR / f"{name}.json"))
    assert res.exit_code == 0 and "PASS" in res.output


def test_certify_tampered(run, tmp_path):
    d = json.loads((CERT_DIR / "a3_e2_to_e1.json").read_text())
    d["curves_y"][1][4] = [[1, 0, "2"]]
    p = tmp_path / "t.json"
    p.write_text(json.dumps(d))
    res = run("certify", str(p))
    assert res.exit_code == 2 and "FAIL" in res.output and "E14" in res.output


def test_certify_parse_errors(run, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert run("certify", str(p)).exit_code == 4
    assert run("certify", str(tmp_path / "missing.json")).exit_code == 4
    p.write_text(json.dumps({"type": "A2"}))
    assert run("certify", str(p)).exit_code == 4


@pytest.mark.parametrize("args", [("components", "--type", "B2"), ("census", "--algebra", "A2"),
                                  ("orbits", "--type", "A2", "--q", "3"), ("witt", "--algebra", "witt-b:5")])
def test_json_roundtrip_is_byte_identical(run, args):
    out = run(*args, "--format", "json").output
    assert dumps(json.loads(out)) == out


def test_out_file_and_cache(run, tmp_path):
    out = tmp_path / "r.json"
    first = run("census", "--algebra", "A2", "--format", "json", "--out", str(out))
    assert first.exit_code == 0 and first.output == ""
    listed = run("cache", "list").output.split()
    assert any(e.startswith("census-A2-") and e.endswith(code_version()) for e in listed)
    again = run("census", "--algebra", "A2", "--format", "json")
    assert again.output == out.read_text()
    assert "removed 1 entries" in run("cache", "clear").output
    assert run("cache", "list").output == ""


def test_no_cache_flag(run):
    run("census", "--algebra", "A1", "--no-cache")
    assert run("cache", "list").output == ""


def test_cache_path_uses_env(run, tmp_path):
    assert run("cache", "path").output.strip() == str(tmp_path / "cache")


def test_run_config_validation():
    assert RunConfig("census", primes=(2, 3)).budget > 0
    with pytest.raises(InputError):
        RunConfig("census", primes=(2, 9))
    with pytest.raises(InputError):
        RunConfig("census", primes=(3, 3))
    with pytest.raises(InputError):
        RunConfig("census", budget=0)


def test_cache_store(tmp_path, monkeypatch):
    c = Cache(tmp_path / "c")
    assert c.get("k") is None and c.entries() == []
    c.put("k/1", {"n": "123456789012345678901234567890"})
    assert c.get("k/1") == {"n": "123456789012345678901234567890"}
    (tmp_path / "c" / "broken.json").write_text("{")
    assert c.get("broken") is None
    assert Cache(tmp_path / "c", enabled=False).get("k/1") is None
    assert c.clear() == 2
    monkeypatch.setenv(ENV_VAR, str(tmp_path / "env"))
    assert default_dir() == tmp_path / "env"
    monkeypatch.delenv(ENV_VAR)
    monkeypatch.setenv("XDG_CACHE_HOME", str(tmp_path / "xdg"))
    assert default_dir() == tmp_path / "xdg" / "cvtool"
