import io
import json
import shutil
import subprocess

import pytest

from mqv.cli import main


def run(argv, stdin=None):
    out = io.StringIO()
    code = main(argv, stdin=io.StringIO(stdin) if stdin is not None else None, stdout=out)
    text = out.getvalue()
    return code, json.loads(text) if text.strip() else None


@pytest.fixture
def a2_json(a2_worked):
    return json.dumps(a2_worked.to_json())


Q = '{"1": "1/2", "2": "2"}'
THETA = '{"1": 1, "2": -1}'


def test_relation_pass_and_fail(a2_json):
    code, out = run(["relation", "--rep", a2_json, "--q", Q, "--mu"])
    assert code == 0 and out["relation"]["ok"]
    assert "mu" in out
    code, out = run(["relation", "--rep", a2_json, "--q", '{"1": 1, "2": 1}'])
    assert code == 1 and not out["relation"]["ok"]


def test_relation_reads_stdin(a2_json):
    code, out = run(["relation", "--rep", "-", "--q", Q], stdin=a2_json)
    assert code == 0


def test_relation_float_mode(a2_json):
    code, out = run(["relation", "--rep", a2_json, "--q", Q, "--mode", "float"])
    assert code == 0 and out["relation"]["max"] <= 1e-9


def test_stability_with_expectation(a2_json):
    code, out = run(["stability", "--rep", a2_json, "--theta", THETA])
    assert code == 0 and out["status"] == "Stable"
    code, _ = run(["stability", "--rep", a2_json, "--theta", THETA, "--expect", "Unstable"])
    assert code == 1


def test_convolve(a2_json):
    code, out = run(["convolve", "--rep", a2_json, "--vertex", "2", "--q", Q, "--theta", THETA, "--verify-involution", "--lusztig"])
    assert code == 0
    assert out["dims"] == {"1": 1, "2": 0}
    assert out["q"] == {"1": "1", "2": "1/2"}
    assert out["involution"]["ok"]


def test_convolve_emptiness_is_a_contract_error():
    rep = json.dumps({"quiver": {"vertices": ["1", "2"], "arrows": [["h1", "1", "2"]]}, "dims": {"1": 0, "2": 1}, "maps": {}})
    code, _ = run(["convolve", "--rep", rep, "--vertex", "2", "--q", '{"1": 1, "2": 1}', "--theta", THETA])
    assert code == 2


def test_reduce(a2_json):
    code, out = run(["reduce", "--rep", a2_json, "--q", Q, "--theta", THETA])
    assert code == 0 and out["final_dims"] == {"1": 1, "2": 0}


def test_roots_and_generic(a2_worked):
    quiver = json.dumps(a2_worked.dq.to_json())
    code, out = run(["roots", "--quiver", quiver, "--dim", "[1, 1]", "--reflect", "1", "--cartan"])
    assert code == 0
    assert out["form"] == 2 and out["reflected"] == {"1": 0, "2": 1}
    assert len(out["roots"]) == 3
    code, out = run(["generic", "--quiver", quiver, "--dim", "[1, 1]", "--q", '["2", "1/2"]', "--theta", "[1, -1]"])
    assert code == 0 and out["generic"]
    code, _ = run(["generic", "--quiver", quiver, "--dim", "[1, 1]", "--q", "[1, 1]", "--theta", "[0, 0]"])
    assert code == 1
    code, _ = run(["generic", "--mode", "float", "--quiver", quiver, "--dim", "[1, 1]", "--q", "[1, 1]", "--theta", "[0, 0]"])
    assert code == 2


def test_star_round_trip_via_cli():
    tup = json.dumps({"r": 2, "matrices": [[[2, 0], [0, 3]], [["1/2", 0], [0, "1/3"]]], "ladders": [[2, 3], ["1/2", "1/3"]]})
    code, out = run(["star", "to-rep", "--tuple", tup])
    assert code == 0
    rep = json.dumps(out["rep"])
    code, back = run(["star", "to-tuple", "--rep", rep, "--ladders", '[[2, 3], ["1/2", "1/3"]]'])
    assert code == 0 and back["product_is_one"]
    code, report = run(["star", "stability", "--tuple", tup])
    assert code == 1 and not report["passes_strict"]
    code, params = run(["star", "params", "--ladders", '[[2, 3], ["1/2", "1/3"]]', "--dim", '{"0": 2, "1.1": 1, "2.1": 1}'])
    assert code == 0 and params["q"]["1.1"] == "2/3"


def test_traces(a2_json):
    code, out = run(["star", "traces", "--rep", a2_json, "--max-len", "2"])
    assert code == 0 and out["traces"] == {"h1 h1*": "1"}


def test_jacobian_and_generate():
    code, inst = run(["generate", "--recipe", '{"family": "hypergeometric", "params": {"r": 2}}', "--seed", "3"])
    assert code == 0
    code, out = run(["jacobian", "--rep", json.dumps(inst["rep"]), "--mode", "float"])
    assert code == 0 and out["observed"] == out["expected"] == 0


def test_suite_listing_and_run():
    code, out = run(["suite", "--list"])
    assert code == 0 and len(out["suites"]) == 10
    code, out = run(["suite", "reflection-dualities", "--count", "5"])
    assert code == 0 and out["passed"]


def test_usage_errors():
    assert run(["relation"])[0] == 2
    assert run(["nonsense"])[0] == 2
    assert run(["relation", "--rep", "/no/such/file.json"])[0] == 2
    assert run(["suite", "no-such-suite"])[0] == 2
    assert run([])[0] == 2


def test_console_script_is_installed(tmp_path, a2_json):
    exe = shutil.which("mqv")
    if exe is None:
        pytest.skip("console script not on PATH")
    path = tmp_path / "rep.json"
    path.write_text(a2_json)
    proc = subprocess.run([exe, "relation", "--rep", str(path), "--q", Q], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["relation"]["ok"]
