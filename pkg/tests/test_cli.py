import json
from importlib import resources
from io import StringIO
from pathlib import Path

import pytest

from qderham.cli import run

GOLDEN = Path(__file__).parent / "golden" / "case2d.txt"


def config(name):
    return str(resources.files("qderham") / "configs" / f"{name}.json")


def invoke(*argv):
    out = StringIO()
    code = run(list(argv), out)
    return code, out.getvalue()


def test_case2d_matches_golden_file_byte_for_byte():
    code, text = invoke("case2d")
    assert code == 0
    assert text.encode() == GOLDEN.read_bytes()


def test_case2d_is_deterministic():
    assert invoke("case2d")[1] == invoke("case2d")[1]


def test_case2d_reports_branches_and_planes():
    text = invoke("case2d")[1]
    assert "factored: (-1) * (Q^2 + 1) * (Q^2*r - 1)" in text
    assert "d2y*d2x -> -q^-1*r * d2x*d2y" in text
    assert "d2y*d2x -> -q^-1*r^-1 * d2x*d2y" in text
    assert "refused:" in text


def test_case2d_can_be_restricted():
    code, text = invoke("case2d", "--family", "2", "--branch", "imaginary_unit")
    assert code == 0
    assert "family 1" not in text and "d2y*d2x -> -q^-1*r^-1 * d2x*d2y" in text


@pytest.mark.parametrize("name", ["qplane_c1", "qplane_c2", "hecke"])
def test_check_passes_on_shipped_configs(name):
    assert invoke("check", "--config", config(name))[0] == 0


def test_check_fails_on_inconsistent_config():
    code, text = invoke("check", "--config", config("inconsistent"))
    assert code == 1
    assert "[FAIL] (E - B)(E + C) = 0" in text


def test_malformed_inputs_exit_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{bad")
    assert invoke("check", "--config", str(bad))[0] == 2
    assert invoke("check")[0] == 2
    missing = tmp_path / "missing.json"
    missing.write_text(json.dumps({"symbols": ["q"], "n": 2}))
    assert invoke("check", "--config", str(missing))[0] == 2
    assert invoke("normal-form", "--config", config("qplane_c1"), "y*")[0] == 2
    assert invoke("no-such-command")[0] == 2


def test_normal_form_of_yx():
    code, text = invoke("normal-form", "--config", config("qplane_c1"), "y*x")
    assert code == 0
    assert "y*x  ->  q^-1 * x*y" in text


def test_confluence_reports_implied_cubic_relations():
    code, text = invoke("confluence", "--config", config("qplane_c1"))
    assert code == 1
    assert "16 overlaps, 6 unresolved" in text
    assert "x*dx*d2y leaves -dx*dx*dy" in text


def test_structured_output_carries_timing(tmp_path):
    target = tmp_path / "report.json"
    code, _ = invoke("check", "--config", config("hecke"), "--format", "structured", "--out", str(target))
    assert code == 0
    data = json.loads(target.read_text())
    assert data["passed"] and "timing_seconds" in data
    assert all(c["status"] == "pass" for c in data["checks"])


def test_hecke_build_reports_all_matrices():
    code, text = invoke("hecke-build", "--config", config("hecke"))
    assert code == 0
    assert "== C = R/lambda\n  [q^2, 0, 0, 0]\n  [0, q^2 - 1, q, 0]" in text
    assert "[PASS] (E + C)(E - Q F) = 0" in text
