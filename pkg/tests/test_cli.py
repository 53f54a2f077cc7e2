import json

import pytest

from cli import main
from formats import read_json, write_json
from graph import build_bubble


@pytest.fixture
def run(capsys):
    """Run the command line and return (exit code, stdout, stderr)."""

    def invoke(*argv):
        code = main([str(a) for a in argv])
        captured = capsys.readouterr()
        return code, captured.out, captured.err

    return invoke


@pytest.fixture
def point_file(tmp_path):
    def write(s, z, name="point"):
        return write_json(tmp_path / f"{name}.json", {"s": s, "z": z})

    return write


@pytest.fixture
def bubble_ops(run, bubble, diagram_file, tmp_path):
    path = diagram_file(bubble)
    ops = tmp_path / "bubble.ops.json"
    code, _, _ = run("pde", path, "--mode", "thm1", "--out", ops)
    assert code == 0
    return path, ops


def test_generate_writes_diagram(run, tmp_path, bubble):
    out = tmp_path / "gen" / "bubble.json"
    code, _, err = run("generate", "--bubble", "--out", out)
    assert code == 0
    assert "✅" in err
    assert read_json(out) == bubble.to_spec()


def test_generate_ladder_to_stdout(run):
    code, out, _ = run("generate", "--ladder", 2)
    assert code == 0
    spec = json.loads(out)
    assert spec["D"] == 4
    assert len(spec["lines"]) == 7


def test_polys_text(run, bubble, diagram_file):
    code, out, _ = run("polys", diagram_file(bubble))
    assert code == 0
    assert "U = a1 + a2" in out
    assert "W{V1} = a1*a2  [s1]" in out
    assert "Q = -a1^2*z1 + a1*a2*s1 - a1*a2*z1 - a1*a2*z2 - a2^2*z2" in out
    assert "✅ property (P) holds" in out


def test_polys_json(run, box, diagram_file):
    code, out, _ = run("polys", diagram_file(box), "--format", "json")
    assert code == 0
    report = json.loads(out)
    assert report["exponents"] == {"a": 0, "k": 2}
    assert report["property_p"] == {"holds": True, "offending": []}
    by_chi = {tuple(e["chi"]): e for e in report["W"]}
    assert ("1", "3") not in by_chi
    assert by_chi[("1", "2")]["poly"] == "a2*a4"
    assert by_chi[("1", "2")]["basis_index"] == 5


def test_malformed_diagram(run, bubble, tmp_path):
    spec = bubble.to_spec()
    del spec["lines"][0]["to"]
    path = write_json(tmp_path / "broken.json", spec)
    code, _, err = run("polys", path)
    assert code == 2
    assert "lines[0].to" in err


def test_missing_file(run, tmp_path):
    code, _, err = run("polys", tmp_path / "nope.json")
    assert code == 2
    assert "❌" in err


def test_pde_then_verify(run, bubble_ops):
    diagram, ops = bubble_ops
    doc = read_json(ops)
    assert [p["label"] for p in doc["pairs"]] == ["thm1 line 1", "thm1 line 2"]
    assert doc["exponents"] == {"a": 0, "k": 1}
    assert doc["pairs"][0]["prefactors"] == {"c_p": "2/1", "c_p_minus_1": "1/1"}
    code, out, _ = run("verify", diagram, ops)
    assert code == 0
    assert out.count("✅") == 2


def test_box_theorem2(run, box, diagram_file):
    code, out, _ = run("pde", diagram_file(box), "--mode", "thm2")
    assert code == 0
    assert len(json.loads(out)["pairs"]) == 12


def test_derive_order_two(run, bubble, diagram_file):
    code, out, _ = run("pde", diagram_file(bubble), "--mode", "derive", "--order", 2)
    assert code == 0
    pairs = json.loads(out)["pairs"]
    assert pairs
    assert all(p["order"] == 2 for p in pairs)


def test_empty_kernel(run, bubble, diagram_file):
    path = diagram_file(bubble)
    code, out, err = run(
        "pde", path, "--mode", "derive", "--order", 1, "--coeff-degree", 0
    )
    assert code == 3
    assert out == ""
    assert "Empty kernel" in err


def test_regime_error(run, diagram_file):
    code, _, err = run("pde", diagram_file(build_bubble(4), "bubble-d4"))
    assert code == 4
    assert "pole order 0" in err


def test_tampered_operator_fails(run, bubble_ops, tmp_path):
    diagram, ops = bubble_ops
    doc = read_json(ops)
    tail = doc["pairs"][0]["tail"]
    dz1 = next(t for t in tail if t["z"] == [1, 0])
    assert dz1["coeff"][0]["coeff"] == "-3/1"
    dz1["coeff"][0]["coeff"] = "-2/1"
    tampered = write_json(tmp_path / "tampered.json", doc)
    code, out, _ = run("verify", diagram, tampered, "--format", "json")
    assert code == 5
    report = json.loads(out)
    assert not report["ok"]
    failed = [p for p in report["pairs"] if p["status"] == "failed"]
    assert [p["label"] for p in failed] == ["thm1 line 1"]
    assert "thm1 line 1" in failed[0]["message"]


def test_operators_for_another_diagram(run, bubble_ops, triangle, diagram_file):
    _, ops = bubble_ops
    code, _, err = run("verify", diagram_file(triangle), ops)
    assert code == 2
    assert "diagram_hash" in err


def test_numeric_verification(run, bubble_ops, point_file):
    diagram, ops = bubble_ops
    code, out, _ = run("verify", diagram, ops, "--numeric", point_file(["-1"], ["1", "1"]))
    assert code == 0
    assert "residual=" in out


def test_numeric_pole(run, bubble_ops, point_file):
    diagram, ops = bubble_ops
    code, _, err = run("verify", diagram, ops, "--numeric", point_file(["4"], ["1", "1"]))
    assert code == 6
    assert "Q vanishes" in err


def test_numeric_point_size_mismatch(run, bubble_ops, point_file):
    diagram, ops = bubble_ops
    code, _, err = run("verify", diagram, ops, "--numeric", point_file(["-1"], ["1"]))
    assert code == 2
    assert "z:" in err
