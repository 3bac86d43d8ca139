import json
import subprocess
import sys

import pytest

from weakreal.cli import main, parse_exact
from fractions import Fraction


def run(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def files(tmp_path):
    def write(name, data):
        p = tmp_path / name
        p.write_text(json.dumps(data))
        return str(p)
    return write


def test_weakvalue_three_box(capsys, files):
    pre = files("pre.json", [1, 1, 1])
    post = files("post.json", [1, 1, -1])
    obs = files("p3.json", {"projector": [2]})
    code, out, _ = run(capsys, "weakvalue", pre, post, obs)
    assert code == 0
    assert '"weak_value": [-1.0, 0.0]' in out
    data = json.loads(out)
    assert data["projectors"]["weak_values"] == [[2.0, 0.0], [-1.0, 0.0]]


def test_identity_weak_value(capsys, files):
    pre = files("pre.json", [1, "1+2i", [0, 1]])
    post = files("post.json", {"amplitudes": [[1, 0], [1, 0], [-1, 0]]})
    obs = files("id.json", {"diagonal": [1, 1, 1]})
    code, out, _ = run(capsys, "weakvalue", pre, post, obs)
    assert code == 0 and json.loads(out)["weak_value"] == [1.0, 0.0]


def test_exit_codes(capsys, files):
    pre3 = files("pre3.json", [1, 1, 1])
    pre2 = files("pre2.json", [1, 1])
    post = files("post.json", [1, 1, -1])
    orth = files("orth.json", [0, 1, -1])
    obs = files("p3.json", {"projector": [2]})
    bad = files("bad.json", {"amplitudes": "nope"})
    assert run(capsys, "weakvalue", pre2, post, obs)[0] == 3
    assert run(capsys, "weakvalue", pre3, orth, obs)[0] == 4
    assert run(capsys, "weakvalue", bad, post, obs)[0] == 2
    assert run(capsys, "weakvalue", pre3, post, files("o2.json", {"diagonal": [1, 2]}))[0] == 3
    assert run(capsys, "paradox", "(1,1)")[0] == 2
    assert run(capsys, "paradox", "(1,x)")[0] == 2
    assert run(capsys, "decompose", "(1/2,1/3)")[0] == 2
    assert run(capsys, "nonsense")[0] == 2
    assert run(capsys, "scenarios", "run", "nope")[0] == 2
    assert run(capsys, "scenarios", "run", "hermit", "--param", "delta=0.7")[0] == 2
    assert run(capsys, "--threads", "0", "gellmann", "--d", "2")[0] == 2


def test_abl(capsys, files):
    pre = files("pre.json", [1, 1, 1])
    post = files("post.json", [1, 1, -1])
    obs = files("o.json", {"diagonal": [1, 2, 3]})
    code, out, _ = run(capsys, "abl", pre, post, obs)
    assert code == 0
    assert json.loads(out)["probabilities"] == pytest.approx([1 / 3] * 3)


def test_paradox_command(capsys):
    code, out, _ = run(capsys, "paradox", "(1,1,-1)")
    assert code == 0
    data = json.loads(out)
    assert [a["support"] for a in data["assertions"]] == [["1"], ["2"]]
    assert json.loads(run(capsys, "paradox", "(0.5,0.5)")[1]) == "none"
    data = json.loads(run(capsys, "paradox", "(1/2,1/2,1/2,-1/2)")[1])
    assert len(data["conflict"]) == 3


def test_decompose_command(capsys):
    code, out, _ = run(capsys, "decompose", "(4/3,-1/3)")
    assert code == 0
    data = json.loads(out)
    probs = sorted(tuple(r["probability"]) for r in data["distribution"])
    assert probs == [(1, 3), (2, 3)]
    assert data["expected_count"] == [5, 3]
    data = json.loads(run(capsys, "decompose", "(3/2i,-3/2i)")[1])
    assert data["expected_count"] == [3, 1]


def test_structures_command(capsys):
    code, out, _ = run(capsys, "structures", "hardy")
    assert code == 0
    data = json.loads(out)
    assert len(data["structures"]["structures"]) == 3
    assert all(data["connected"])
    assert set(data["provenance"].values()) == {"stated"}


def test_gellmann_command(capsys):
    code, out, _ = run(capsys, "gellmann", "--d", "3")
    data = json.loads(out)
    assert code == 0 and len(data["matrices"]) == 8 and data["orthogonal"]
    assert data["gram_residual"] == 0.0


def test_scenarios_commands(capsys, tmp_path):
    code, out, _ = run(capsys, "scenarios", "list")
    assert code == 0 and "hardy" in json.loads(out)
    path = tmp_path / "rep.json"
    code, _, err = run(capsys, "scenarios", "run", "disappearing", "--param", "t=1", "--json", str(path))
    assert code == 0 and "PASS disappearing" in err
    data = json.loads(path.read_text())
    assert data["params"] == {"t": 1.0} and data["passed"]
    code, _, err = run(capsys, "scenarios", "run", "all")
    assert code == 0 and err.count("PASS") == 16


def test_pointer_sim_command(capsys, files):
    code, out, _ = run(capsys, "pointer-sim", "--scenario", "three_box", "--observable", "3", "--epsilon", "0.001")
    data = json.loads(out)
    assert code == 0
    assert data["cell_probabilities"]["probabilities"] == pytest.approx([0.8, 0.2], abs=1e-9)
    code, out, _ = run(capsys, "pointer-sim", "--scenario", "quantum_mirror", "--slice", "phi2",
                       "--observable", "I", "--sweep")
    data = json.loads(out)
    assert data["second_order_x"] and data["second_order_p"]
    pre = files("pre.json", [1, 1, 1])
    post = files("post.json", [1, 1, -1])
    obs = files("p3.json", {"projector": [2]})
    code, out, _ = run(capsys, "pointer-sim", "--pre", pre, "--post", post, "--observable", obs,
                       "--epsilon", "100")
    assert code == 0 and json.loads(out)["mean_x"] == pytest.approx(-1, abs=1e-3)
    assert run(capsys, "pointer-sim", "--scenario", "three_box", "--observable", "9")[0] == 2


def test_byte_stable_output(capsys):
    first = run(capsys, "scenarios", "run", "cardinal_pigeon")[1]
    second = run(capsys, "scenarios", "run", "cardinal_pigeon")[1]
    assert first == second
    assert "0.70710678118654746" in first


def test_parse_exact():
    assert parse_exact("4/3") == (Fraction(4, 3), 0)
    assert parse_exact("-1/3+3/2i") == (Fraction(-1, 3), Fraction(3, 2))
    assert parse_exact("-2i") == (0, -2)
    assert parse_exact("i") == (0, 1)
    assert parse_exact("0.25-i") == (Fraction(1, 4), -1)


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "weakreal.cli", "paradox", "(1,1,-1)"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and '"conflict": [0, 1]' in res.stdout
