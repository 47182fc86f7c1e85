import json
from pathlib import Path

import pytest

from gammacell.cli import main
from gammacell.precell import faces
from gammacell.scene import load_scene

SCENES = Path(__file__).resolve().parent.parent / "scenes"


def run(capsys, *args):
    code = main([str(a) for a in args])
    out, err = capsys.readouterr()
    return code, out, err


def test_validate_bundled(capsys):
    for path in sorted(SCENES.glob("*.json")):
        code, out, _ = run(capsys, "validate", path)
        assert code == 0, (path, out)


def test_faces_of_example(capsys):
    code, out, _ = run(capsys, "faces", SCENES / "even_lift.json", "E")
    assert code == 0
    assert "faces of E (4)" in out
    assert "chain: no" in out


def test_faces_of_monohedral_precell(capsys):
    code, out, _ = run(capsys, "faces", SCENES / "n2.json", "W")
    assert code == 0 and "chain: yes" in out


def test_divide_then_verify(capsys, tmp_path):
    out_path = tmp_path / "div.json"
    code, _, err = run(capsys, "divide", SCENES / "n2.json", "A", "--f", "sum", "-o", out_path)
    assert code == 0, err
    scene = load_scene(out_path)
    assert "A.division" in scene.divisions
    assert scene.complexes["A.cells"]
    code, out, _ = run(capsys, "verify", out_path, "--box", 8)
    assert code == 0, out


def test_decompose_and_split(capsys, tmp_path):
    dec = tmp_path / "dec.json"
    assert run(capsys, "decompose", SCENES / "n2.json", "A", "-o", dec)[0] == 0
    scene = load_scene(dec)
    members = scene.complexes["A.decomposition"]
    assert len(members) == 9
    split = tmp_path / "split.json"
    assert run(capsys, "split", SCENES / "n2.json", "W", "-n", 3, "-o", split)[0] == 0
    assert len(load_scene(split).complexes["W.split"]) == 3


def test_verify_corpus_box_12(capsys):
    code, out, _ = run(capsys, "verify", SCENES / "corpus2.json", "--box", 12)
    assert code == 0, out


def test_verify_reports_violation(capsys, tmp_path):
    bad = json.loads((SCENES / "n2.json").read_text())
    bad["complexes"] = {"D": ["A", "A"]}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(bad))
    code, out, _ = run(capsys, "verify", path, "--box", 4)
    assert code == 1 and "VIOLATED" in out
    code, out, _ = run(capsys, "verify", path, "--box", 4, "--json")
    assert code == 1 and json.loads(out)


def test_padic_member(capsys):
    code, out, _ = run(capsys, "padic-member", SCENES / "padic.json", "S", "--point", "1,9")
    assert code == 0 and "member: true" in out and "v(x) = (0, 2)" in out
    code, out, _ = run(capsys, "padic-member", SCENES / "padic.json", "S", "--point", "1,2")
    assert code == 0 and "member: false" in out


def test_padic_divide(capsys, tmp_path):
    path = tmp_path / "pd.json"
    code, _, err = run(capsys, "padic-divide", SCENES / "padic.json", "Q", "--eps", "eps",
                       "--samples", 60, "-o", path)
    assert code == 0, err
    assert "Q.division" in load_scene(path).divisions


@pytest.mark.parametrize("args", [
    ["validate", "/no/such/file.json"],
    ["frobnicate"],
    ["faces", str(SCENES / "n2.json"), "Missing"],
    ["padic-member", str(SCENES / "padic.json"), "S", "--point", "1,x"],
    ["render", str(SCENES / "even_lift.json"), "-o", "/tmp/never.svg"],
    ["split", str(SCENES / "n2.json"), "A", "-n", "2"],
])
def test_usage_errors(capsys, args):
    assert run(capsys, *args)[0] == 2


def test_bad_json_exit_code(capsys, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"m": 2,\n "precells": [}')
    code, _, err = run(capsys, "validate", path)
    assert code == 2 and "line 2" in err


def test_budget_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("GAMMACELL_BUDGET", "10")
    assert run(capsys, "verify", SCENES / "n2.json", "--box", 8)[0] == 2


def test_render_matches_golden(capsys, tmp_path):
    out = tmp_path / "n2.svg"
    code, _, _ = run(capsys, "render", SCENES / "n2_decomposition.json",
                     "--name", "A.decomposition", "-o", out)
    assert code == 0
    assert out.read_text() == (SCENES / "n2_decomposition.svg").read_text()


def test_rendered_regions_meet_corner():
    # at least two full-dimensional cells of the decomposition have the
    # corner (+inf, +inf) in their closure
    scene = load_scene(SCENES / "n2_decomposition.json")
    cells = [scene.precells[n] for n in scene.complexes["A.decomposition"]]
    top = [c for c in cells if len(c.support) == 2]
    touching = [c for c in top if any(not F.support for F in faces(c))]
    assert len(touching) >= 2
