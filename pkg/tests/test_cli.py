import json
import subprocess
import sys
from pathlib import Path

import pytest

from qmet.cli import builtins as B
from qmet.cli.main import main
from qmet.cli.report import CheckResult, Report, plain, to_structured
from qmet.cli.scenario import ParseError, parse_scenario, run_scenario
from qmet.quantale import INF

ROOT = Path(__file__).resolve().parents[1]
REQUIRED = [
    "quantale-laws", "interpolation", "d-construction", "inequation-lift", "met-arrows", "ball-topology",
    "metrize-all-3pt", "br-properties", "robust-specialization", "hausdorff-theorem", "monad-laws",
    "transformer-laws", "sigma2-counterexample", "linear-iso-remark", "taur-containment",
]

X3 = """scenario x3
quantale Q = product:sigma,sigma
space X over Q
  points x0 x1 x
  row x0 : (top,top) (bot,bot) (top,bot)
  row x1 : (bot,bot) (top,top) (bot,top)
  row x  : (top,bot) (bot,top) (top,top)
end
check theorem X
check feasible X expect infeasible
"""


def test_list_is_stable_and_complete(capsys):
    assert main(["list"]) == 0
    first = capsys.readouterr().out.split()
    main(["list"])
    assert capsys.readouterr().out.split() == first
    assert all(n in first for n in REQUIRED)
    assert B.list_builtins() == first


def test_describe(capsys):
    assert main(["describe", "metrize-all-3pt"]) == 0
    assert "metrize-all-3pt" in capsys.readouterr().out
    assert main(["describe", "nope"]) == 2


def test_run_builtin(capsys):
    assert main(["run", "sigma2-counterexample"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("PASS sigma2-counterexample")


def test_unknown_target_is_an_input_error(capsys):
    assert main(["run", "no-such-thing"]) == 2


@pytest.mark.parametrize(
    "text,line,col",
    [
        ("quantale Q = nope\n", 1, 14),
        ("quantale Q = sigma\nspace X over Q\n  points a b\n  row a : top zz\n  row b : bot top\nend\n", 4, 15),
        ("quantale Q = sigma\nspace X over R\n", 2, 14),
        ("frobnicate\n", 1, 1),
        ("quantale Q = sigma\ncheck teleport Q\n", 2, 7),
        ("quantale Q = sigma\nspace X over Q\n  points a\n  row a : top\n", 2, 1),
        ("quantale Q = sigma\nspace X over Q\n  points a b\n  row a : top\nend\n", 4, 9),
        ("quantale Q = sigma\nspace X over Q\n  points a\n  row a : top\nend\narrow f : X -> X = a->b\n", 6, 20),
        ("cap points many\n", 1, 12),
    ],
)
def test_parse_errors_carry_locations(text, line, col):
    with pytest.raises(ParseError) as e:
        parse_scenario(text)
    assert (e.value.line, e.value.col) == (line, col)


def test_malformed_file_exits_2(tmp_path, capsys):
    p = tmp_path / "bad.qmet"
    p.write_text("quantale Q = sigma\nspace X over Q\n  points a b\n  row a : top nope\n")
    assert main(["run", str(p)]) == 2
    assert "line 4, column 15" in capsys.readouterr().err


def test_scenario_checks_and_caps():
    sc = parse_scenario(X3)
    rep = run_scenario(sc)
    assert rep.passed and [c.status for c in rep.checks] == ["pass", "pass"]
    assert rep.checks[0].strategy == "exhaustive"
    rep = run_scenario(parse_scenario("cap points 2\n" + X3))
    assert [c.status for c in rep.checks] == ["skipped", "skipped"] and rep.passed


def test_failed_expectation_exits_1(tmp_path):
    p = tmp_path / "x.qmet"
    p.write_text(X3.replace("expect infeasible", "expect feasible"))
    assert main(["run", str(p)]) == 1
    p.write_text(X3.replace("expect infeasible", "expect feasible") + "check theorem X\n")
    out = tmp_path / "r.json"
    assert main(["run", str(p), "--fail-fast", "--format", "structured", "-o", str(out)]) == 1
    doc = json.loads(out.read_text())
    assert len(doc["reports"][0]["checks"]) == 2


@pytest.mark.parametrize("path", sorted((ROOT / "scenarios").glob("*.qmet")), ids=lambda p: p.name)
def test_shipped_scenarios_pass(path):
    assert main(["run", str(path)]) == 0


def test_structured_report_is_deterministic(tmp_path):
    outs = []
    for i in range(2):
        o = tmp_path / f"{i}.json"
        assert main(["run", "monad-laws", "sigma2-counterexample", "--seed", "5", "--format", "structured", "-o", str(o)]) == 0
        outs.append(o.read_bytes())
    assert outs[0] == outs[1]
    assert b"seconds" not in outs[0]


def test_environment_overrides(tmp_path, monkeypatch):
    monkeypatch.setenv("QMET_SEED", "9")
    monkeypatch.setenv("QMET_FORMAT", "structured")
    o = tmp_path / "r.json"
    assert main(["run", "taur-containment", "-o", str(o)]) == 0
    assert json.loads(o.read_text())["reports"][0]["seed"] == 9
    assert main(["run", "taur-containment", "--seed", "3", "-o", str(o)]) == 0
    assert json.loads(o.read_text())["reports"][0]["seed"] == 3
    monkeypatch.setenv("QMET_SEED", "many")
    assert main(["run", "taur-containment"]) == 2


def test_cap_points_skips_large_theorem_checks():
    res = B.run_builtin("hausdorff-theorem", B.RunContext(seed=0, cap_points=4))
    assert any(r.status == "skipped" for r in res)
    assert all(r.ok for r in res)


def test_plain_values():
    assert plain({"a": INF, "b": (1, 2), "c": {3, 1}}) == {"a": "inf", "b": [1, 2], "c": [1, 3]}
    rep = Report("s", 0, [CheckResult("c", "fail", {}, INF)])
    assert json.loads(to_structured([rep]))["reports"][0]["checks"][0]["witness"] == "inf"


def test_console_script():
    r = subprocess.run([sys.executable, "-m", "qmet.cli.main", "list"], capture_output=True, text=True)
    assert r.returncode == 0 and "hausdorff-theorem" in r.stdout
