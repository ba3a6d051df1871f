import json

import pytest

from grounded_chi import __version__
from grounded_chi.cli import _overrides, main
from grounded_chi.errors import ValidationError
from grounded_chi.family_model import Scene, gen_pillars, load, save

from .conftest import gset


def test_bounds_text(capsys):
    assert main(["bounds", "--k", "2"]) == 0
    assert "1488" in capsys.readouterr().out


def test_bounds_json(capsys):
    assert main(["bounds", "--k", "2", "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["beta"]["2"] == 16


def test_bounds_rejects_k0(capsys):
    assert main(["bounds", "--k", "0"]) == 2
    assert "error:" in capsys.readouterr().err


def test_version(capsys):
    with pytest.raises(SystemExit) as info:
        main(["--version"])
    assert info.value.code == 0
    assert __version__ in capsys.readouterr().out


def test_usage_error_exits_2():
    with pytest.raises(SystemExit) as info:
        main(["gen", "--kind", "nonsense"])
    assert info.value.code == 2


def test_gen_then_analyze(tmp_path, capsys):
    path = tmp_path / "clique.json"
    assert main(["gen", "--kind", "clique", "--k", "3", "-o", str(path)]) == 0
    provenance = json.loads(capsys.readouterr().out)
    assert provenance["witness"] == {"clique": ["A", "B", "C"]}
    assert len(load(path)) == 3

    dot = tmp_path / "clique.dot"
    assert main(["analyze", str(path), "--json", "--dot", str(dot)]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["omega"] == 3 and report["chi"] == 3
    assert report["edges"] == 3
    assert report["simple"] is True
    assert dot.read_text(encoding="utf-8").startswith("graph G {")


def test_gen_to_stdout(capsys):
    assert main(["gen", "--kind", "chain", "--n", "4"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert [s["id"] for s in doc["sets"]] == ["X0", "X1", "X2", "X3"]


def test_gen_rejects_nonpositive_size():
    assert main(["gen", "--kind", "chain", "--n", "0"]) == 2


def test_analyze_text_report(tmp_path, capsys):
    path = tmp_path / "pierced.json"
    assert main(["gen", "--kind", "pierced", "--n", "4", "--seed", "3", "-o", str(path)]) == 0
    capsys.readouterr()
    assert main(["analyze", str(path)]) == 0
    out = capsys.readouterr().out
    assert out.startswith("members: 4")
    assert "simple:  yes" in out


def test_analyze_missing_file(tmp_path):
    assert main(["analyze", str(tmp_path / "absent.json")]) == 2


def test_analyze_malformed_file(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{", encoding="utf-8")
    assert main(["analyze", str(path)]) == 2
    assert "bad.json" in capsys.readouterr().err


def test_render(tmp_path, capsys):
    path = tmp_path / "scene.json"
    assert main(["gen", "--kind", "pillars", "--m", "2", "-o", str(path)]) == 0
    out = tmp_path / "scene.svg"
    assert main(["render", str(path), "-o", str(out)]) == 0
    assert out.read_text(encoding="utf-8").startswith("<svg")


def test_dist2_writes_trace(tmp_path, capsys):
    base = gen_pillars(2).scene
    D = (gset("D1", [(2, 0), (2, 1), (3, 1), (4, 1)]), gset("D2", [(8, 0), (8, 1), (7, 1), (6, 1)]))
    path = tmp_path / "scene.json"
    save(Scene(base.frame, base.s, base.pillars, D), path)
    trace = tmp_path / "out" / "trace.json"
    assert main(["dist2", str(path), "--trace", str(trace)]) == 0
    coloring = json.loads(capsys.readouterr().out)
    assert set(coloring["colors"]) == {"D1", "D2"}
    doc = json.loads(trace.read_text(encoding="utf-8"))
    assert doc["trace"] == "dist2"
    assert doc["palette"] == coloring["palette"]
    assert main(["render", str(trace)]) == 0
    assert trace.with_suffix(".svg").exists()


def test_dist2_needs_a_scene(tmp_path):
    path = tmp_path / "chain.json"
    assert main(["gen", "--kind", "chain", "--n", "3", "-o", str(path)]) == 0
    assert main(["dist2", str(path)]) == 2


def test_claims_rejects_scene(tmp_path):
    path = tmp_path / "scene.json"
    save(gen_pillars(1).scene, path)
    assert main(["claims", str(path)]) == 2


def test_claims_precondition(tmp_path):
    path = tmp_path / "arch.json"
    assert main(["gen", "--kind", "clique", "--k", "2", "-o", str(path)]) == 0
    assert main(["claims", str(path), "--a", "1"]) == 2


def test_overrides():
    assert _overrides(["delta.0=1", "delta.1=0", "step_b=0"]) == {"delta": {0: 1, 1: 0}, "step_b": 0}
    assert _overrides(None) == {}
    with pytest.raises(ValidationError):
        _overrides(["beta=3"])
    with pytest.raises(ValidationError):
        _overrides(["step_a=x"])


def test_verify_solver(tmp_path, capsys):
    out = tmp_path / "solver.jsonl"
    assert main(["verify", "--lemma", "solver", "--trials", "3", "--workers", "1", "--out", str(out)]) == 0
    assert "solver" in capsys.readouterr().out
    assert len(out.read_text(encoding="utf-8").splitlines()) == 3
