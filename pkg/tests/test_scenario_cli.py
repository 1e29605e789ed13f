import json
import subprocess
import sys

import pytest

from dualis.cli import Report, emit, exit_code, main, run
from dualis.scenario import ScenarioSyntaxError, build, parse, print_scenario

from conftest import CORPUS, NEGATIVE

MINIMAL = "ring R = Q[x]\nseq t = [x^2]\ntask pairing\n"

WITH_MAP = """\
scenario fam
field Q
base A = a
ring R = x over A
seq t = [x^2 - a]
map g : A -> K images [0]
task theta map=g
task residue g=x expect=1
task residue-bc map=g
"""


# -- parsing ------------------------------------------------------------------------------------

def test_parse_minimal():
    s = parse(MINIMAL)
    assert s.ring.variables == ("x",)
    assert s.seq == ("x^2",)
    assert [t.name for t in s.tasks] == ["pairing"]
    assert s.field == ("Q",)


def test_parse_unclosed_bracket():
    with pytest.raises(ScenarioSyntaxError) as err:
        parse("ring R = Q[x]\nseq t = [x^2\ntask pairing\n")
    assert err.value.line == 2
    assert err.value.column == 9


def test_parse_tasks_in_file_order():
    s = parse(WITH_MAP)
    assert [t.name for t in s.tasks] == ["theta", "residue", "residue-bc"]
    assert s.maps[0].images == ("0",)
    assert s.tasks[1].get("g") == "x"


@pytest.mark.parametrize("text, fragment", [
    ("ring R = Q[x]\nseq t = [x]\ntask frobnicate\n", "unknown task"),
    ("ring R = Q[x]\nseq t = [x]\ntask residue h=1\n", "no option"),
    ("ring R = Q[x]\nseq t = [x] alpha = [1, 2]\ntask pairing\n", "alpha has 2"),
    ("ring R = Q[x]\nseq t = [x]\n", "no tasks"),
    ("field Fp 101\nring R = Q[x]\nseq t = [x]\ntask pairing\n", "disagree"),
    ("ring R = x over B\nseq t = [x]\ntask pairing\n", "unknown base"),
])
def test_parse_errors(text, fragment):
    with pytest.raises(ScenarioSyntaxError, match=fragment):
        parse(text)


def test_build_rejects_bad_polynomial():
    s = parse("ring R = Q[x]\nseq t = [x^^2]\ntask pairing\n")
    with pytest.raises(ValueError):
        build(s)


@pytest.mark.parametrize("path", CORPUS, ids=lambda p: p.stem)
def test_round_trip(path):
    s = parse(path.read_text(), default_name=path.stem)
    again = parse(print_scenario(s))
    assert again == s
    assert print_scenario(again) == print_scenario(s)


# -- running ----------------------------------------------------------------------------------------

def test_run_pairing_witness():
    [rep] = run(parse(MINIMAL))
    assert rep.status == "pass"
    assert rep.witness["matrix"] == [["0", "1"], ["1", "0"]]


def test_run_residue_value():
    s = parse("ring R = Q[x]\nseq t = [x^2]\ntask residue g=x\n")
    [rep] = run(s)
    assert rep.status == "pass" and rep.witness["value"] == "1"


def test_negative_control_fails_with_witness():
    s = parse(NEGATIVE.read_text())
    [rep] = run(s)
    assert rep.status == "fail"
    assert rep.witness["commutes"] is False
    assert rep.witness["connecting"] != rep.witness["via_phi"]


def test_wrong_expectation_fails():
    s = parse("ring R = Q[x]\nseq t = [x^2]\ntask residue g=x expect=2\n")
    [rep] = run(s)
    assert rep.status == "fail" and rep.witness["expected"] == "2"


def test_errors_do_not_stop_siblings():
    s = parse("ring R = Q[x]\nseq t = [x, x]\ntask pairing\ntask koszul-ext\ntask lc-tensor\n")
    reps = run(s)
    assert [r.status for r in reps] == ["error", "error", "error"]
    s = parse("ring R = Q[x, y]\nseq t = [x]\ntask pairing\ntask cech-sign num=y\n")
    assert [r.status for r in run(s)] == ["error", "pass"]


def test_run_scenario_with_map():
    assert [r.status for r in run(parse(WITH_MAP))] == ["pass", "pass", "pass"]


# -- emitting -----------------------------------------------------------------------------------------

def test_emit_single_line():
    out = emit([Report("s", "pairing", "pass", {"det": "-1"}, 1.5)])
    assert out.count("\n") == 1
    obj = json.loads(out)
    assert set(obj) == {"scenario", "task", "status", "witness", "ms"}


def test_emit_null_witness_on_error():
    obj = json.loads(emit([Report("s", "pairing", "error", None, 0.0, "boom")]))
    assert obj["witness"] is None


def test_emit_five_tasks_in_order():
    a = parse(MINIMAL.replace("task pairing", "task pairing\ntask residue g=x\ntask local-duality"))
    b = parse("ring R = Q[x, y]\nseq t = [x, y]\ntask pairing\ntask koszul-ext\n")
    lines = emit(run(a) + run(b)).splitlines()
    assert len(lines) == 5
    assert [json.loads(l)["task"] for l in lines] == [
        "pairing", "residue g=x", "local-duality", "pairing", "koszul-ext"]


def test_emit_text_table():
    out = emit(run(parse(MINIMAL)), "text")
    assert out.splitlines()[0].split()[:3] == ["scenario", "task", "status"]


def test_exit_codes():
    ok = Report("s", "t", "pass", {}, 0)
    bad = Report("s", "t", "fail", {}, 0)
    err = Report("s", "t", "error", None, 0)
    assert exit_code([ok]) == 0
    assert exit_code([ok, bad]) == 1
    assert exit_code([bad, err]) == 2


# -- command line ------------------------------------------------------------------------------------------

def test_main_check(tmp_path, capsys):
    f = tmp_path / "m.scn"
    f.write_text(MINIMAL)
    assert main(["check", str(f)]) == 0
    g = tmp_path / "bad.scn"
    g.write_text("ring R = Q[x]\nseq t = [x^2\n")
    assert main(["check", str(g)]) == 2
    assert "bad.scn:2:9" in capsys.readouterr().err


def test_main_usage(capsys):
    with pytest.raises(SystemExit) as err:
        main(["run"])
    assert err.value.code == 3
    assert main([]) == 3
    assert main(["run", "/nonexistent.scn"]) == 3


def test_main_negative_control(capsys):
    assert main(["run", str(NEGATIVE)]) == 1


def test_console_script_is_deterministic():
    cmd = [sys.executable, "-m", "dualis.cli", "run", *map(str, CORPUS[:3])]
    outs = []
    for _ in range(2):
        proc = subprocess.run(cmd, capture_output=True, text=True, check=False)
        assert proc.returncode == 0
        rows = [json.loads(l) for l in proc.stdout.splitlines()]
        for r in rows:
            r.pop("ms")
        outs.append(json.dumps(rows, sort_keys=True))
    assert outs[0] == outs[1]
