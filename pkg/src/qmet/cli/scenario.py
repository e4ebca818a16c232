"""Line-oriented scenario files.

::

    scenario x3
    cap points 5
    quantale Q = product:sigma,sigma
    space X over Q
      points x0 x1 x
      row x0 : (top,top) (bot,bot) (top,bot)
      row x1 : (bot,bot) (top,top) (bot,top)
      row x  : (top,bot) (bot,top) (top,top)
    end
    arrow f : X -> X = x0->x0 x1->x1 x->x
    check theorem X
    check feasible X expect infeasible

Blank lines and text after ``#`` are ignored. Elements are referenced by label.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Callable

from .. import metric as M
from .. import powerspace as PS
from .. import quantale as QT
from ..errors import CapExceededError, QmetError
from .report import FAIL, PASS, CheckResult, Report, skipped


class ParseError(Exception):
    def __init__(self, line: int, col: int, msg: str):
        super().__init__(f"line {line}, column {col}: {msg}")
        self.line, self.col, self.msg = line, col, msg


@dataclass
class CheckSpec:
    name: str
    args: list
    expect: str | None
    line: int


@dataclass
class Scenario:
    name: str = "scenario"
    quantales: dict = field(default_factory=dict)
    spaces: dict = field(default_factory=dict)
    arrows: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    caps: dict = field(default_factory=dict)


def _tokens(text: str):
    """``(column, token)`` pairs, 1-based columns, comments stripped."""
    text = text.split("#", 1)[0]
    out, i = [], 0
    while i < len(text):
        if text[i].isspace():
            i += 1
            continue
        j = i
        while j < len(text) and not text[j].isspace():
            j += 1
        out.append((i + 1, text[i:j]))
        i = j
    return out


def parse_scenario(text: str) -> Scenario:
    sc = Scenario()
    lines = text.splitlines()
    i = 0
    while i < len(lines):
        ln = i + 1
        toks = _tokens(lines[i])
        i += 1
        if not toks:
            continue
        col, kw = toks[0]
        words = [t for _, t in toks]
        if kw == "scenario":
            _arity(toks, 2, ln)
            sc.name = words[1]
        elif kw == "cap":
            _arity(toks, 3, ln)
            if words[1] not in ("points", "carrier"):
                raise ParseError(ln, toks[1][0], f"unknown cap {words[1]!r}")
            sc.caps[words[1]] = _int(toks[2], ln)
        elif kw == "quantale":
            if len(toks) != 4 or words[2] != "=":
                raise ParseError(ln, col, "expected 'quantale NAME = EXPR'")
            sc.quantales[words[1]] = _quantale(toks[3], ln, sc.caps.get("carrier", QT.DEFAULT_CAP))
        elif kw == "space":
            if len(toks) != 4 or words[2] != "over":
                raise ParseError(ln, col, "expected 'space NAME over QUANTALE'")
            q = _lookup(sc.quantales, toks[3], ln, "quantale")
            i = _space_block(sc, words[1], q, lines, i, ln)
        elif kw == "arrow":
            sc.arrows[words[1] if len(words) > 1 else ""] = _arrow(sc, toks, ln)
        elif kw == "check":
            if len(toks) < 2:
                raise ParseError(ln, col, "expected 'check NAME ARGS'")
            name = words[1]
            if name not in CHECKS:
                raise ParseError(ln, toks[1][0], f"unknown check {name!r}")
            args, expect = toks[2:], None
            if len(args) >= 2 and args[-2][1] == "expect":
                expect = args[-1][1]
                args = args[:-2]
            kinds = CHECKS[name].args
            if len(args) != len(kinds):
                raise ParseError(ln, toks[1][0], f"check {name!r} takes {len(kinds)} arguments: {' '.join(kinds)}")
            resolved = [_resolve_arg(sc, k, a, ln, args) for k, a in zip(kinds, args)]
            sc.checks.append(CheckSpec(name, resolved, expect, ln))
        else:
            raise ParseError(ln, col, f"unknown directive {kw!r}")
    return sc


def _arity(toks, n, ln):
    if len(toks) != n:
        raise ParseError(ln, toks[0][0], f"{toks[0][1]!r} takes {n - 1} argument(s)")


def _int(tok, ln) -> int:
    try:
        v = int(tok[1])
    except ValueError:
        raise ParseError(ln, tok[0], f"expected an integer, got {tok[1]!r}") from None
    if v < 0:
        raise ParseError(ln, tok[0], "caps are non-negative")
    return v


def _lookup(table, tok, ln, what):
    if tok[1] not in table:
        raise ParseError(ln, tok[0], f"unknown {what} {tok[1]!r}")
    return table[tok[1]]


def _quantale(tok, ln, cap):
    try:
        return QT.from_spec(tok[1], cap)
    except CapExceededError:
        raise
    except (QmetError, ValueError) as exc:
        raise ParseError(ln, tok[0], f"bad quantale expression: {exc}") from None


def _element(q, tok, ln):
    try:
        return q.parse(tok[1])
    except (QmetError, ValueError) as exc:
        raise ParseError(ln, tok[0], str(exc).strip('"')) from None


def _space_block(sc: Scenario, name: str, q, lines, i: int, start: int) -> int:
    points, rows = None, {}
    while i < len(lines):
        ln = i + 1
        toks = _tokens(lines[i])
        i += 1
        if not toks:
            continue
        kw = toks[0][1]
        if kw == "end":
            break
        if kw == "points":
            points = [t for _, t in toks[1:]]
            if len(set(points)) != len(points):
                raise ParseError(ln, toks[0][0], "duplicate point label")
        elif kw == "row":
            if points is None:
                raise ParseError(ln, toks[0][0], "'row' before 'points'")
            if len(toks) < 3 or toks[2][1] != ":":
                raise ParseError(ln, toks[0][0], "expected 'row LABEL : VALUES'")
            label = toks[1]
            if label[1] not in points:
                raise ParseError(ln, label[0], f"unknown point {label[1]!r}")
            vals = toks[3:]
            if len(vals) != len(points):
                raise ParseError(ln, toks[2][0], f"expected {len(points)} values, got {len(vals)}")
            rows[label[1]] = [_element(q, v, ln) for v in vals]
        else:
            raise ParseError(ln, toks[0][0], f"unknown space directive {kw!r}")
    else:
        raise ParseError(start, 1, f"space {name!r} has no 'end'")
    if points is None:
        raise ParseError(start, 1, f"space {name!r} has no points")
    missing = [p for p in points if p not in rows]
    if missing:
        raise ParseError(start, 1, f"space {name!r} is missing rows for {missing}")
    d = [rows[p] for p in points]
    sc.spaces[name] = M.QMetricSpace(points, q, d, name)
    return i


def _arrow(sc: Scenario, toks, ln):
    words = [t for _, t in toks]
    if len(toks) < 7 or words[2] != ":" or words[4] != "->" or words[6] != "=":
        raise ParseError(ln, toks[0][0], "expected 'arrow NAME : X -> Y = a->b ...'")
    X = _lookup(sc.spaces, toks[3], ln, "space")
    Y = _lookup(sc.spaces, toks[5], ln, "space")
    f = {}
    for col, t in toks[7:]:
        a, sep, b = t.partition("->")
        if not sep or a not in X.points or b not in Y.points:
            raise ParseError(ln, col, f"bad assignment {t!r}")
        f[a] = Y.points.index(b)
    missing = [p for p in X.points if p not in f]
    if missing:
        raise ParseError(ln, toks[0][0], f"arrow {words[1]!r} is undefined on {missing}")
    return (X, Y, [f[p] for p in X.points])


def _resolve_arg(sc: Scenario, kind: str, tok, ln, args):
    if kind == "quantale":
        return _lookup(sc.quantales, tok, ln, "quantale")
    if kind == "space":
        return _lookup(sc.spaces, tok, ln, "space")
    if kind == "arrow":
        return _lookup(sc.arrows, tok, ln, "arrow")
    if kind == "element":
        q = _lookup(sc.quantales, args[0], ln, "quantale")
        return _element(q, tok, ln)
    raise AssertionError(kind)


# ---------------------------------------------------------------- checks


@dataclass
class CheckDef:
    args: tuple
    default: str
    fn: Callable  # (*args) -> (outcome, witness, strategy)


def _bool(v: bool) -> str:
    return "true" if v else "false"


def _quantale_laws(q):
    rep = QT.verify_quantale(q)
    return _bool(rep.passed), rep.violations[:3], None


def _interp(q):
    if isinstance(q, QT.TableQuantale):
        f = QT.interpolation_failures(q)
    else:
        grid = q.sample()
        f = QT.interpolation_failures(q, list(itertools.product(grid, repeat=3)))
    return _bool(not f), f[:3], None


def _metric(s):
    rep = M.verify_metric(s)
    return _bool(rep.passed), rep.violations[:3], None


def _theorem(s):
    rep = PS.hausdorff_theorem_check(s)
    return ("holds" if rep.holds else "fails"), rep.witness, rep.strategy


def _feasible(s):
    rep = PS.powerset_metric_feasible(s)
    w = None
    if rep.violation is not None:
        A, B = rep.violation
        w = {"pair": (PS.subset_label(s, A), PS.subset_label(s, B)), "bound": s.q.label(rep.forced_lower_bounds[A, B])}
    return ("feasible" if rep.feasible else "infeasible"), w, rep.basis


def _br(s):
    bad = {k: v for k, v in PS.br_properties(s).items() if v is not None}
    return _bool(not bad), bad, None


def _robust_spec(s):
    try:
        PS.robust_specialization(s)
    except AssertionError as exc:
        return "false", str(exc), None
    return "true", None, None


def _linear(s):
    r = PS.linear_remark(s)
    return _bool(r.join_matches and r.inverse_realizes and r.topologies_equal), vars(r), None


def _arrow_pred(pred):
    def run(a):
        X, Y, f = a
        return _bool(pred(f, X, Y)), None, None

    return run


CHECKS: dict[str, CheckDef] = {
    "quantale": CheckDef(("quantale",), "true", _quantale_laws),
    "interpolation": CheckDef(("quantale",), "true", _interp),
    "way-below": CheckDef(("quantale", "element", "element"), "true", lambda q, a, b: (_bool(q.way_below(a, b)), None, None)),
    "totally-below": CheckDef(("quantale", "element", "element"), "true", lambda q, a, b: (_bool(q.totally_below(a, b)), None, None)),
    "metric": CheckDef(("space",), "true", _metric),
    "theorem": CheckDef(("space",), "holds", _theorem),
    "feasible": CheckDef(("space",), "feasible", _feasible),
    "br-properties": CheckDef(("space",), "true", _br),
    "robust-specialization": CheckDef(("space",), "true", _robust_spec),
    "linear-remark": CheckDef(("space",), "true", _linear),
    "uniform": CheckDef(("arrow",), "true", _arrow_pred(M.is_uniformly_continuous)),
    "pointwise": CheckDef(("arrow",), "true", _arrow_pred(M.is_pointwise_continuous)),
    "topological": CheckDef(("arrow",), "true", _arrow_pred(M.is_topologically_continuous)),
    "isometry": CheckDef(("arrow",), "true", _arrow_pred(M.is_isometry)),
}


def _points_in(args) -> int:
    n = 0
    for a in args:
        if isinstance(a, M.QMetricSpace):
            n = max(n, a.n)
        elif isinstance(a, tuple):
            n = max(n, a[0].n, a[1].n)
    return n


def run_scenario(sc: Scenario, seed: int = 0, cap_points: int = 12, fail_fast: bool = False) -> Report:
    cap_points = sc.caps.get("points", cap_points)
    t0 = time.perf_counter()
    results = []
    for c in sc.checks:
        label = f"{c.name} (line {c.line})"
        n = _points_in(c.args)
        if n > cap_points:
            results.append(skipped(label, f"{n} points exceed cap {cap_points}"))
            continue
        expect = c.expect or CHECKS[c.name].default
        try:
            outcome, witness, strategy = CHECKS[c.name].fn(*c.args)
        except CapExceededError as exc:
            results.append(skipped(label, str(exc)))
            continue
        ok = outcome == expect
        results.append(CheckResult(label, PASS if ok else FAIL, {"outcome": outcome, "expected": expect}, witness if (witness and (not ok or c.name == "feasible")) else None, strategy))
        if fail_fast and not ok:
            break
    return Report(sc.name, seed, results, time.perf_counter() - t0)
