"""The twelve acceptance criteria, each run through its builtin(s) under a time limit."""

import time

import pytest

from qmet.cli.builtins import RunContext, run_all, run_builtin
from qmet.cli.report import to_structured

from conftest import ACCEPTANCE_LINES

SEED = 0

CRITERIA = [
    (1, "quantale law suite", ["quantale-laws"], 5),
    (2, "way-below oracle", ["way-below"], 10),
    (3, "interpolation", ["interpolation"], 10),
    (4, "lower-set construction", ["d-construction", "inequation-lift"], 30),
    (5, "Met arrows", ["met-arrows"], 60),
    (6, "metrization", ["metrize-all-3pt"], 30),
    (7, "robustness calculus", ["br-properties", "robust-specialization"], 60),
    (8, "robust topology = d_S topology", ["hausdorff-theorem"], 120),
    (9, "monad suites", ["monad-laws", "transformer-laws"], 60),
    (10, "Σ² counterexample", ["sigma2-counterexample"], 5),
    (11, "linear remark", ["linear-iso-remark"], 10),
]


def record(num, title, ok, seconds, limit, failed):
    verdict = "PASS" if ok and seconds < limit else "FAIL"
    extra = f"; failing: {', '.join(failed)}" if failed else ""
    if seconds >= limit:
        extra += f"; over the {limit}s limit"
    line = f"criterion {num}: {verdict} {title} ({seconds:.2f}s < {limit}s){extra}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return verdict == "PASS"


@pytest.mark.parametrize("num,title,names,limit", CRITERIA, ids=[f"criterion-{c[0]}" for c in CRITERIA])
def test_criterion(num, title, names, limit):
    ctx = RunContext(seed=SEED)
    t0 = time.perf_counter()
    results = [r for n in names for r in run_builtin(n, ctx)]
    seconds = time.perf_counter() - t0
    failed = [r.name for r in results if not r.ok]
    skipped = [r.name for r in results if r.status == "skipped"]
    assert not skipped, f"checks skipped under default caps: {skipped}"
    assert record(num, title, not failed, seconds, limit, failed), failed


def test_criterion_12_determinism():
    t0 = time.perf_counter()
    a = to_structured(run_all(RunContext(seed=SEED)))
    b = to_structured(run_all(RunContext(seed=SEED)))
    seconds = time.perf_counter() - t0
    assert record(12, "determinism", a == b, seconds, 300, [] if a == b else ["structured reports differ"])
