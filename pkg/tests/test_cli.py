import json
import time

import pytest

from adamsext import charts, claims
from adamsext.cli import main
from adamsext.modules import fixture_path, load_fixture, parse_module

X = str(fixture_path("X"))
Y = str(fixture_path("Y"))
SPHERE = str(fixture_path("sphere"))


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_validate_ok(capsys):
    code, out, _ = run(capsys, "validate", X)
    assert code == 0 and "ok" in out


def test_validate_violation(capsys, tmp_path):
    bad = tmp_path / "bad.fdmod"
    bad.write_text("module B { gen g:0 gen h:1 gen k:2 sq 1 g = h sq 1 h = k }")
    code, _, err = run(capsys, "validate", str(bad))
    assert code == 1
    assert "(a=1, b=1, g)" in err


def test_validate_missing_and_malformed(capsys, tmp_path):
    code, _, err = run(capsys, "validate", str(tmp_path / "missing.fdmod"))
    assert code == 2 and err
    broken = tmp_path / "broken.fdmod"
    broken.write_text("module B {\n gen g 0\n}")
    code, _, err = run(capsys, "validate", str(broken))
    assert code == 2 and "line 2" in err


def test_ext_x_x_json(capsys):
    code, out, _ = run(capsys, "ext", X, X, "--format", "json", "--max-s", "6", "--max-t", "20")
    assert code == 0
    data = json.loads(out)
    eight = [c for c in data["classes"] if c["stem"] + data["shift"] == 8]
    assert sorted(c["s"] for c in eight) == [2, 2, 3]


def test_ext_sphere_ascii(capsys):
    code, out, _ = run(capsys, "ext", SPHERE, "--format", "ascii", "--max-s", "6", "--max-t", "20")
    assert code == 0
    rows = out.splitlines()
    assert rows[0].split()[:4] == ["s\\n", "0", "1", "2"]
    assert len(rows) == 8
    assert rows[-1].split()[:3] == ["0", "o", "."]


def test_ext_top_panel_svg(capsys, tmp_path):
    out_file = tmp_path / "top.svg"
    code, _, _ = run(capsys, "ext", Y, X, "--format", "svg", "--max-s", "10", "--max-t", "30", "--out", str(out_file))
    assert code == 0
    text = out_file.read_text()
    assert text.startswith("<?xml") and 'version="1.1"' in text
    # axis labels carry the shift, so the paper's stem -7 column is present
    assert ">-7</text>" in text


def test_ext_aliases(capsys):
    aliases = str(fixture_path("X").with_name("X-X.aliases.json"))
    code, out, _ = run(capsys, "ext", X, X, "--format", "json", "--max-s", "6", "--max-t", "20", "--aliases", aliases)
    assert code == 0
    data = json.loads(out)
    c = next(cl for cl in data["classes"] if cl["name"] == "c")
    h2 = [l for l in data["lines"] if l["kind"] == "h2" and l["from"] == [c["stem"], c["s"], c["index"]]]
    assert len(h2) == 1


def test_ext_oracle_failure_exit_3(capsys, monkeypatch):
    real = charts.hom_complex_ext

    def broken(r, n):
        table = real(r, n)
        table.dims[(0, table.t_min)] = 7
        return table

    monkeypatch.setattr(charts, "hom_complex_ext", broken)
    code, _, err = run(capsys, "ext", X, X, "--max-s", "3", "--max-t", "8")
    assert code == 3
    assert "stem" in err and "s 0" in err


def test_ext_invalid_input(capsys, tmp_path):
    bad = tmp_path / "bad.fdmod"
    bad.write_text("module B { gen g:0 gen h:1 gen k:2 sq 1 g = h sq 1 h = k }")
    assert run(capsys, "ext", str(bad))[0] == 1
    assert run(capsys, "ext", str(tmp_path / "nope.fdmod"))[0] == 2


def test_resolve_command(capsys, tmp_path):
    out_file = tmp_path / "x.res"
    code, out, _ = run(capsys, "resolve", X, "--max-s", "4", "--max-t", "12", "--out", str(out_file))
    assert code == 0 and out_file.exists()
    assert out.splitlines()[1].split()[:2] == ["s\\n", "13"]


def test_cache_dir_from_environment(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("ADAMSEXT_CACHE_DIR", str(tmp_path))
    assert run(capsys, "ext", X, "--max-s", "3", "--max-t", "10")[0] == 0
    assert list(tmp_path.glob("*.res"))


def test_verify_paper_subset_and_cache(capsys, tmp_path):
    start = time.perf_counter()
    code1, out1, _ = run(capsys, "verify-paper", "--only", "C4,C5", "--cache-dir", str(tmp_path))
    first = time.perf_counter() - start
    start = time.perf_counter()
    code2, out2, _ = run(capsys, "verify-paper", "--only", "C4,C5", "--cache-dir", str(tmp_path))
    second = time.perf_counter() - start
    assert code1 == code2 == 0
    assert out1 == out2
    assert "C4  PASS" in out1 and "C5  PASS" in out1
    assert second < first


def test_verify_paper_detects_mutated_fixture(capsys, monkeypatch):
    real = claims.load_fixture
    mutated = parse_module("module X { gen x13:13 gen x15:15 gen x16:16 sq 1 x15 = x16 sq 3 x13 = x16 }")

    def fake(name, normalized=False):
        return mutated if name == "X" else real(name, normalized)

    monkeypatch.setattr(claims, "load_fixture", fake)
    code, out, _ = run(capsys, "verify-paper", "--only", "C2")
    assert code == 1
    assert "C2  FAIL" in out


def test_verify_paper_errors_exit_3(capsys, monkeypatch):
    def boom(ws):
        raise RuntimeError("disk on fire")

    patched = tuple(
        claims.Claim(c.id, c.description, c.expected, c.provenance, c.anchor, boom) if c.id == "C4" else c
        for c in claims.CLAIMS
    )
    monkeypatch.setattr(claims, "CLAIMS", patched)
    code, out, _ = run(capsys, "verify-paper", "--only", "C4")
    assert code == 3
    assert "C4  ERROR" in out and "disk on fire" in out


def test_help_lists_commands(capsys):
    with pytest.raises(SystemExit):
        main(["--help"])
    out = capsys.readouterr().out
    for cmd in ("validate", "resolve", "ext", "verify-paper"):
        assert cmd in out
