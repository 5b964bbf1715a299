import json
import subprocess
import sys
import xml.etree.ElementTree as ET

import pytest

from gbs_tiler.cli import main


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_build_then_validate(tmp_path, capsys):
    patch = tmp_path / "p.patch"
    code, _, err = run(["build-bs", "--word", "tat", "--x", "1/2", "--radius", 3, "--out", patch], capsys)
    assert code == 0 and "distinct tiles" in err
    code, out, _ = run(["validate", patch], capsys)
    assert code == 0 and "violations: 0" in out


def test_fold_single_tile(tmp_path, capsys, fixtures):
    out_file = tmp_path / "f.patch"
    code, out, _ = run(["fold", "--tileset", fixtures / "single.tl", "--word", "ab", "--radius", 4, "--out", out_file], capsys)
    assert code == 0 and "violations: 0" in out
    code, _, _ = run(["validate-folded", out_file, "--tileset", fixtures / "single.tl"], capsys)
    assert code == 0


def test_scan_report(tmp_path, capsys):
    patch = tmp_path / "p.patch"
    run(["build-bs", "--word", "tat", "--x", "1/2", "--radius", 3, "--out", patch], capsys)
    code, out, _ = run(["scan-periods", patch, "--max-len", 2], capsys)
    assert code == 0
    assert "inconclusive: 0" in out and "survivors: 0" in out and "refuted: 16" in out


@pytest.mark.parametrize("argv", [
    ["flow-validate", "flow_bad.patch"],
    ["validate", "bs_bad_r.patch"],
    ["validate-folded", "folded_bad.patch", "--tileset", "three.tl"],
    ["locked-validate", "locked_bad.patch", "--quotient", "f2z_a.quotient"],
])
def test_validator_failures_exit_one(argv, capsys, fixtures):
    argv = [str(fixtures / a) if a.endswith((".patch", ".tl", ".quotient")) else a for a in argv]
    code, out, _ = run(argv, capsys)
    assert code == 1
    assert "violation " in out


@pytest.mark.parametrize("argv", [
    ["flow-validate", "flow_good.patch"],
    ["validate", "bs_good.patch"],
    ["validate-folded", "folded_good.patch", "--tileset", "three.tl"],
    ["locked-validate", "locked_good.patch", "--quotient", "f2z-a"],
])
def test_good_fixtures_exit_zero(argv, capsys, fixtures):
    argv = [str(fixtures / a) if a.endswith((".patch", ".tl")) else a for a in argv]
    assert run(argv, capsys)[0] == 0


def test_unfold_refuses_invalid_patch(capsys, fixtures):
    code, _, err = run(["unfold", fixtures / "folded_bad.patch", "--tileset", fixtures / "three.tl"], capsys)
    assert code == 2 and "invalid folded patch" in err


def test_usage_errors_exit_two(capsys, fixtures):
    with pytest.raises(SystemExit) as exc:
        main(["build-bs", "--word", "t"])
    assert exc.value.code == 2
    capsys.readouterr()
    assert run(["build-bs", "--word", "tT", "--x", "1/2", "--radius", 2], capsys)[0] == 2
    assert run(["validate", fixtures / "missing.patch"], capsys)[0] == 2
    assert run(["fold", "--tileset", fixtures / "malformed.tl", "--word", "ab", "--radius", 2], capsys)[0] == 2
    assert run(["locked-validate", fixtures / "locked_good.patch", "--quotient", fixtures / "not_a_hom.quotient"], capsys)[0] == 2
    assert run(["locked-validate", fixtures / "locked_good.patch", "--quotient", "f2z-a", "--kernel", "a"], capsys)[0] == 2


def test_group_commands(capsys, fixtures):
    assert run(["normalize", "aat"], capsys)[1] == "t|a^3\n"
    assert run(["ball", "--radius", 2, "--count"], capsys)[1] == "17\n"
    assert run(["presentation", "loop:2,3"], capsys)[1] == "<a, t | t^-1 a^2 t = a^3>\n"
    assert run(["presentation", "edge:2,3"], capsys)[1] == "<a, b | a^2 = b^3>\n"
    assert "Z2" in run(["witness", fixtures / "triangle.graph"], capsys)[1]
    assert run(["classify", "loop:1,5"], capsys)[1].startswith("class: BS1n(5)")


def test_flow_commands(tmp_path, capsys):
    patch = tmp_path / "fl.patch"
    assert run(["flow-build", "--word", "bab", "--radius", 2, "--out", patch], capsys)[0] == 0
    assert run(["flow-validate", patch], capsys)[0] == 0
    out = run(["approach", "--word", "ba", "--target", "BA", "--steps", 5, "--generator", "a"], capsys)[1]
    assert out.splitlines() == ["n=0 g=aB e=A", "n=2 g=aBAB e=A", "n=4 g=aBABAB e=A"]


def test_height_and_tile_commands(capsys):
    out = run(["lambda", "aa"], capsys)[1]
    assert "lambda: 1/1" in out
    code, out, _ = run(["tile", "--x", "1/2"], capsys)
    assert code == 0 and out.splitlines() == ["0 1 | 0/1 | 1 1 1 | 1/4 | T", "identity: holds"]


def test_tileset_commands(tmp_path, capsys, fixtures):
    rot = tmp_path / "rot.tl"
    run(["rotate-tileset", fixtures / "three.tl", "--times", 4, "--out", rot], capsys)
    assert rot.read_text() == (fixtures / "three.tl").read_text()
    code, out, err = run(["higher-block", "checkerboard", "--m", 2, "--n", 1], capsys)
    assert code == 0 and "block tiles: 2" in err


def test_locked_commands(tmp_path, capsys):
    patch = tmp_path / "l.patch"
    assert run(["locked-build", "--quotient", "z2-klein", "--radius", 3, "--out", patch], capsys)[0] == 0
    code, out, _ = run(["locked-validate", patch, "--quotient", "z2-klein"], capsys)
    assert code == 0 and "fix rules: 24 sigma rules: 3" in out


def test_render_and_determinism(tmp_path, capsys, fixtures):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    for out in (a, b):
        assert run(["render", fixtures / "flow_good.patch", "--format", "svg", "--out", out], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    ET.fromstring(a.read_text())
    dot = run(["render", fixtures / "bs_good.patch", "--format", "dot"], capsys)[1]
    assert dot.startswith("digraph")
    with pytest.raises(SystemExit) as exc:
        main(["render", str(fixtures / "bs_good.patch"), "--format", "png"])
    assert exc.value.code == 2
    z = tmp_path / "z.patch"
    run(["unfold", fixtures / "folded_good.patch", "--out", z], capsys)
    svg = run(["render", z, "--tileset", fixtures / "three.tl"], capsys)[1]
    assert 'data-cell="0,0"' in svg
    assert run(["render", z], capsys)[0] == 2


def test_seeded_fold_is_reproducible(tmp_path, capsys):
    outs = []
    for name in ("x", "y"):
        f = tmp_path / name
        run(["fold", "--tileset", "three", "--word", "ab", "--radius", 3, "--seed", 7, "--out", f], capsys)
        outs.append(f.read_bytes())
    assert outs[0] == outs[1]


def test_verify_paper_subset(tmp_path, capsys):
    report = tmp_path / "r.json"
    code, out, _ = run(["verify-paper", "--only", "5,12", "--json", report], capsys)
    assert code == 0
    assert out.count("[PASS]") == 2
    data = json.loads(report.read_text())
    assert data["passed"] and [c["number"] for c in data["criteria"]] == [5, 12]


def test_entry_point_runs():
    res = subprocess.run([sys.executable, "-m", "gbs_tiler.cli", "normalize", "Taat"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout == "|a^3\n"
