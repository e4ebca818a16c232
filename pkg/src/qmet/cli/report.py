"""Check results and their text / structured renderings."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..quantale import EMPTY, INF

PASS, FAIL, SKIPPED = "pass", "fail", "skipped"


@dataclass
class CheckResult:
    name: str
    status: str
    detail: dict = field(default_factory=dict)
    witness: object = None
    strategy: str | None = None

    @property
    def ok(self) -> bool:
        return self.status != FAIL


def check(name: str, ok: bool, witness=None, strategy=None, **detail) -> CheckResult:
    return CheckResult(name, PASS if ok else FAIL, detail, None if ok else witness, strategy)


def skipped(name: str, reason: str) -> CheckResult:
    return CheckResult(name, SKIPPED, {"reason": reason})


@dataclass
class Report:
    scenario: str
    seed: int
    checks: list = field(default_factory=list)
    seconds: float = 0.0  # text output only; structured reports stay deterministic

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks)

    def counts(self) -> dict:
        out = {PASS: 0, FAIL: 0, SKIPPED: 0}
        for c in self.checks:
            out[c.status] += 1
        return out


def plain(v):
    """JSON-ready copy of nested results."""
    if v is INF:
        return "inf"
    if v is EMPTY:
        return "empty"
    if isinstance(v, bool) or v is None or isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, dict):
        return {str(k): plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, set, frozenset)):
        items = [plain(x) for x in v]
        return sorted(items, key=repr) if isinstance(v, (set, frozenset)) else items
    if isinstance(v, np.ndarray):
        return plain(v.tolist())
    return repr(v)


def to_structured(reports: list) -> str:
    doc = {
        "reports": [
            {
                "scenario": r.scenario,
                "seed": r.seed,
                "passed": r.passed,
                "counts": r.counts(),
                "checks": [
                    {
                        "name": c.name,
                        "status": c.status,
                        "strategy": c.strategy,
                        "detail": plain(c.detail),
                        "witness": plain(c.witness),
                    }
                    for c in r.checks
                ],
            }
            for r in reports
        ]
    }
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def to_text(reports: list) -> str:
    lines = []
    for r in reports:
        c = r.counts()
        head = "PASS" if r.passed else "FAIL"
        lines.append(f"{head} {r.scenario} (seed {r.seed}): {c[PASS]} passed, {c[FAIL]} failed, {c[SKIPPED]} skipped in {r.seconds:.2f}s")
        for ch in r.checks:
            tag = {PASS: "ok  ", FAIL: "FAIL", SKIPPED: "skip"}[ch.status]
            extra = f" [{ch.strategy}]" if ch.strategy else ""
            lines.append(f"  {tag} {ch.name}{extra}")
            if ch.status == FAIL and ch.witness is not None:
                lines.append(f"       witness: {json.dumps(plain(ch.witness), ensure_ascii=False)}")
            if ch.status != PASS and ch.detail:
                for k, v in ch.detail.items():
                    lines.append(f"       {k}: {json.dumps(plain(v), ensure_ascii=False)}")
    return "\n".join(lines) + "\n"
