"""Built-in scenarios: each runs one family of checks and returns results."""

from __future__ import annotations

import itertools
import zlib
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .. import metric as M
from .. import order as O
from .. import powerspace as PS
from .. import quantale as QT
from .. import topology as T
from ..errors import CapExceededError
from ..rng import Lcg
from .report import CheckResult, check, skipped


@dataclass
class RunContext:
    seed: int = 0
    cap_carrier: int = O.DEFAULT_CAP
    cap_points: int = 12

    def rng(self, name: str) -> Lcg:
        return Lcg(self.seed * 0x9E3779B97F4A7C15 + zlib.crc32(name.encode()))


@dataclass
class Builtin:
    name: str
    summary: str
    run: Callable[[RunContext], list]


BUILTINS: dict[str, Builtin] = {}


def builtin(name: str, summary: str):
    def deco(fn):
        BUILTINS[name] = Builtin(name, summary, fn)
        return fn

    return deco


def list_builtins() -> list[str]:
    return list(BUILTINS)


def small_tables(limit: int = 5) -> list:
    return [e for e in QT.BUILTIN_TABLES if len(QT.from_spec(e)) <= limit]


def _first(items):
    return next(iter(items), None)


# ---------------------------------------------------------------- quantales


def mutants(Q: QT.TableQuantale, rng: Lcg, count: int):
    """Random single-cell tensor mutations of ``Q`` as ``(cell, value, mutant)``."""
    n = len(Q)
    cells = [(a, b, v) for a in range(n) for b in range(n) for v in range(n) if v != Q.tensor_table[a, b]]
    rng.shuffle(cells)
    for a, b, v in cells[:count]:
        t = Q.tensor_table.copy()
        t[a, b] = v
        yield (a, b), v, QT.TableQuantale(Q.poset, t, Q.unit, Q.name + "~", Q.join_table, Q.meet_table, Q.claims)


@builtin("quantale-laws", "every constructor passes the law checker; single-cell tensor mutations are caught")
def quantale_laws(ctx: RunContext) -> list:
    rng = ctx.rng("quantale-laws")
    out = []
    for e in QT.BUILTIN_TABLES + ("rplus", "rmax"):
        Q = QT.from_spec(e, ctx.cap_carrier)
        rep = QT.verify_quantale(Q)
        out.append(check(f"laws {e}", rep.passed, rep.violations, trusted=rep.trusted))
    missed, genuine, caught = [], 0, 0
    for e in QT.BUILTIN_TABLES:
        Q = QT.from_spec(e, ctx.cap_carrier)
        if len(Q) > 6:
            continue
        for cell, v, mq in mutants(Q, rng, 40):
            rep = QT.verify_quantale(mq)
            if not rep.passed and rep.violations:
                caught += 1
            elif QT.quantale_oracle_ok(mq):
                genuine += 1
            else:
                missed.append((e, cell, Q.label(v)))
    out.append(check("mutations detected with a witness", not missed, missed, caught=caught, still_quantales=genuine))
    return out


@builtin("way-below", "quantifier definitions of way-below and totally-below match the closed forms")
def way_below_suite(ctx: RunContext) -> list:
    out = []
    bad = []
    count = 0
    for n in range(1, 7):
        for L in O.enumerate_lattices(n):
            count += 1
            for x, y in itertools.product(range(n), repeat=2):
                if O.way_below(L, x, y) != O.way_below_oracle(L, x, y):
                    bad.append(("way-below", n, x, y))
                if O.totally_below(L, x, y) != O.totally_below_oracle(L, x, y):
                    bad.append(("totally-below", n, x, y))
            if O.classify_lattice(L) != O.classify_lattice(L, oracle=True):
                bad.append(("classification", n))
    out.append(check("closed forms = quantifier definitions (lattices up to 6 elements)", not bad, bad[:5], lattices=count))
    # in the diamond every cover of top contains a or lies above it, so a is totally below top
    D = O.diamond()
    a, top = D.index("a"), D.index("top")
    out.append(check("diamond: a is totally below top", O.totally_below_oracle(D, a, top) and O.totally_below(D, a, top)))
    M3 = O.m3()
    a3, top3 = M3.index("a"), M3.index("top")
    out.append(check("M3: a is not totally below top", not O.totally_below_oracle(M3, a3, top3)))
    out.append(check("M3 is not prime-continuous", not O.classify_lattice(O.m3(), oracle=True).prime_continuous))
    R = QT.rational_rplus()
    grid = R.sample(ctx.rng("way-below"), 24)
    wb_bad = [(x, y) for x in grid for y in grid if R.way_below(x, y) != (x is QT.INF or (y is not QT.INF and x > y))]
    out.append(check("rplus: x << y iff x = inf or x > y", not wb_bad, wb_bad[:3]))
    compact = sorted({x for x in grid if R.way_below(x, x)}, key=str)
    out.append(check("rplus: the only compact element is inf", compact == [QT.INF], compact))
    return out


@builtin("interpolation", "interpolation for way-below, totally-below and the tensor")
def interpolation_suite(ctx: RunContext) -> list:
    out = []
    for e in QT.BUILTIN_TABLES:
        Q = QT.from_spec(e, ctx.cap_carrier)
        f = QT.interpolation_failures(Q)
        out.append(check(f"interpolation {e}", not f, f[:3]))
    rng = ctx.rng("interpolation")
    for R in (QT.rational_rplus(), QT.rational_rmax()):
        triples = [tuple(QT.INF if rng.chance(1, 8) else rng.fraction() for _ in range(3)) for _ in range(1000)]
        f = QT.interpolation_failures(R, triples)
        out.append(check(f"interpolation {R.name} (1000 random triples)", not f, f[:3]))
    return out


# ---------------------------------------------------------------- lower sets


def random_algebra(rng: Lcg, n: int):
    """A random poset with a monotone binary ``*``, a constant ``1`` and ``meet`` when it exists."""
    for _ in range(50):
        P = O.random_poset(rng, n)
        op = O.random_monotone_op(rng, P, 2)
        if op is None:
            continue
        ops = {"*": op, "1": np.array(rng.below(n), dtype=np.int64)}
        if P.is_lattice():
            ops["meet"] = P.meet_table()
        return O.TermAlgebra(P, ops)
    raise RuntimeError("no monotone operation found")


def _monoid_algebras():
    out = []
    for e in small_tables(5):
        Q = QT.from_spec(e)
        out.append(O.TermAlgebra(Q.poset, {"*": Q.tensor_table, "1": np.array(Q.unit), "meet": Q.meet_table}))
    return out


def d_construction_items(A: O.TermAlgebra) -> list:
    """Failures of the lower-set construction facts for the algebra ``A``."""
    P = A.carrier
    D = O.lower_set_lattice(P)
    n, k = len(P), len(D)
    bad = []
    L = D.poset
    if not L.is_lattice():
        return [("complete lattice", None)]
    for i, j in itertools.product(range(k), repeat=2):
        if D.masks[L.join([i, j])] != D.masks[i] | D.masks[j] or D.masks[L.meet([i, j])] != D.masks[i] & D.masks[j]:
            bad.append(("joins are unions, meets intersections", (i, j)))
            break
    if D.masks[L.bottom] != 0 or D.masks[L.top] != P.full:
        bad.append(("empty join and meet", None))
    for p, q in itertools.product(range(n), repeat=2):
        if P.leq(p, q) != L.leq(D.eta(p), D.eta(q)):
            bad.append(("eta reflects order", (p, q)))
    lifted, _ = A.lift()
    mul, mul_hat = A.ops["*"], lifted.ops["*"]
    for p, q in itertools.product(range(n), repeat=2):
        if mul_hat[D.eta(p), D.eta(q)] != D.eta(int(mul[p, q])):
            bad.append(("lift on principal sets", (p, q)))
    for x in range(k):
        for a, b in itertools.product(range(k), repeat=2):
            j = L.join([a, b])
            if mul_hat[x, j] != L.join([mul_hat[x, a], mul_hat[x, b]]) or mul_hat[j, x] != L.join([mul_hat[a, x], mul_hat[b, x]]):
                bad.append(("lift distributes over joins", (x, a, b)))
        if mul_hat[x, L.bottom] != L.bottom or mul_hat[L.bottom, x] != L.bottom:
            bad.append(("lift preserves the empty join", (x,)))
    if "meet" in A.ops:
        mh = lifted.ops["meet"]
        for a, b in itertools.product(range(k), repeat=2):
            if mh[a, b] != L.meet([a, b]):
                bad.append(("lifted meet is the meet", (a, b)))
                break
    return bad


@builtin("d-construction", "lower-set lattices: joins, embedding, lifted operations, meets")
def d_construction(ctx: RunContext) -> list:
    rng = ctx.rng("d-construction")
    algs = [random_algebra(rng, 1 + rng.below(5)) for _ in range(100)] + _monoid_algebras()
    bad = []
    for i, A in enumerate(algs):
        for b in d_construction_items(A):
            bad.append((i, *b))
    out = [check(f"construction facts on {len(algs)} algebras", not bad, bad[:5])]
    P = O.antichain(2)
    out.append(check("antichain of 2 has 4 lower sets", len(O.lower_set_lattice(P)) == 4))
    out.append(check("lower sets of a 3-chain form a 4-chain", O.lower_set_lattice(O.chain(3)).poset.is_chain() and len(O.lower_set_lattice(O.chain(3))) == 4))
    return out


@builtin("inequation-lift", "inequations with a linear left side survive the lift to lower sets")
def inequation_lift(ctx: RunContext) -> list:
    rng = ctx.rng("inequation-lift")
    algs = [random_algebra(rng, 1 + rng.below(5)) for _ in range(100)] + _monoid_algebras()
    lost, tried, shown = [], 0, []
    for i, A in enumerate(algs):
        for lhs, rhs in O.PRESERVED_INEQUATIONS + O.UNPRESERVED_INEQUATIONS:
            if "meet" in lhs + rhs and "meet" not in A.ops:
                continue
            try:
                rep = O.check_inequation_lift(A, lhs, rhs)
            except AssertionError as exc:
                lost.append((i, lhs, rhs, str(exc)))
                continue
            if rep.linearity_ok and rep.holds_in_A:
                tried += 1
            if not rep.linearity_ok and rep.holds_in_A and not rep.holds_in_lift:
                shown.append((i, lhs, rhs))
    out = [check("hypotheses + base validity imply lifted validity", not lost, lost[:3], instances=tried)]
    out.append(check("unlisted inequations can fail after lifting", bool(shown), None, examples=shown[:3]))
    return out


# ---------------------------------------------------------------- metric spaces


def _space_quantales():
    return [QT.from_spec(e) for e in ("sigma", "product:sigma,sigma", "chain_plus:3")] + [QT.rational_rplus()]


@builtin("ball-topology", "ball axioms, the membership law and the specialization preorder")
def ball_topology_suite(ctx: RunContext) -> list:
    rng = ctx.rng("ball-topology")
    bad = []
    count = 0
    for q in _space_quantales() + [QT.from_spec("chain_max:3")]:
        for _ in range(25):
            s = M.random_space(rng, q, 1 + rng.below(5))
            count += 1
            bad += [(s.name, q.name, b) for b in ball_axioms(s)]
    out = [check(f"ball axioms on {count} spaces", not bad, bad[:3])]
    X3 = M.x3_fixture()
    out.append(check("X3: ball(x0, top) = {x0} and the topology is discrete", M.ball(X3, 0, X3.q.top) == 1 and M.ball_topology(X3) == T.discrete(3)))
    p = M.path_space(3)
    out.append(check("path space: ball(1, 1) = {0,1,2}", M.ball(p, 1, p.q.parse("1")) == 0b111))
    return out


def ball_axioms(s: M.QMetricSpace) -> list:
    q = s.q
    deltas = PS.all_deltas(s)
    bad = []
    tau = M.ball_topology(s)
    for x in range(s.n):
        for r in deltas:
            B = M.ball(s, x, r)
            if not B >> x & 1:
                bad.append(("centre in ball", x, r))
            for r2 in deltas:
                if q.leq(r, r2) and M.ball(s, x, r2) & ~B:
                    bad.append(("antitone", x, r, r2))
                if not any(M.ball(s, x, r3) & ~(B & M.ball(s, x, r2)) == 0 for r3 in s.radii()):
                    bad.append(("intersection refinement", x, r, r2))
            for y in O.bits(B):
                if not any(M.ball(s, y, r2) & ~B == 0 for r2 in s.radii()):
                    bad.append(("ball inside ball", x, y, r))
    for U in range(1 << s.n):
        if (U in tau.opens) != M.is_open_by_balls(s, U):
            bad.append(("membership law", U))
    pre = M.d_preorder(s)
    if not np.array_equal(tau.specialization(), pre):
        bad.append(("specialization is the d-preorder", None))
    if not np.array_equal(M.dual_ball_topology(s).specialization(), pre.T):
        bad.append(("dual specialization is the reverse d-preorder", None))
    return bad


def _arrow_quantales():
    return [QT.from_spec(e) for e in small_tables(5)]


@builtin("met-arrows", "uniform continuity: greatest realizer, epsilon-delta and brute-force search agree")
def met_arrows(ctx: RunContext) -> list:
    rng = ctx.rng("met-arrows")
    qs = _arrow_quantales()
    bad, uni, pw, topo, pw_only = [], 0, 0, 0, []
    for i in range(100):
        q1, q2 = rng.choice(qs), rng.choice(qs)
        s = M.random_space(rng, q1, 1 + rng.below(4))
        t = M.random_space(rng, q2, 1 + rng.below(4))
        f = [rng.below(t.n) for _ in range(s.n)]
        try:
            u = M.is_uniformly_continuous(f, s, t)
            p = M.is_pointwise_continuous(f, s, t)
        except AssertionError as exc:
            bad.append((i, str(exc)))
            continue
        brute = M.brute_force_realizer(f, s, t) is not None
        if brute != u:
            bad.append((i, "brute-force search disagrees", q1.name, q2.name))
        if u and not p:
            bad.append((i, "uniform but not pointwise"))
        if p and not M.is_topologically_continuous(f, s, t):
            bad.append((i, "pointwise but not topological"))
        uni += u
        pw += p
        topo += M.is_topologically_continuous(f, s, t)
        if p and not u:
            pw_only.append(i)
    out = [check("realizer = epsilon-delta = brute force on 100 arrows", not bad, bad[:3], uniform=uni, pointwise=pw, topological=topo)]
    out.append(collapse_example())
    # a pointwise-but-not-uniform pair cannot exist on finite spaces: the join of
    # the finitely many per-point radii is still way-below the unit
    trunc = truncation_moduli(5)
    out.append(
        check(
            "stored pointwise-not-uniform witness",
            bool(pw_only),
            "no finite witness exists; see truncation_moduli",
            sampled=len(pw_only),
            truncation_moduli=trunc,
        )
    )
    return out


def collapse_example() -> CheckResult:
    """An indiscrete Σ source mapped onto two far-apart chain points."""
    S = QT.sigma()
    s = M.QMetricSpace(["a", "b"], S, [[S.top, S.top], [S.top, S.top]], "indiscrete")
    C = QT.chain_plus(2)
    t = M.QMetricSpace(["u", "v"], C, [[0, 2], [2, 0]], "far")
    f = [0, 1]
    u = M.is_uniformly_continuous(f, s, t)
    brute = M.brute_force_realizer(f, s, t)
    g = M.greatest_realizer(f, s, t)
    return check("collapsing arrow has no realizer", not u and brute is None, g.graph(), greatest=g.graph())


def truncation_moduli(N: int) -> list:
    """Best uniform radius for ``x -> 1/x`` on ``{1/k : k <= n}`` at ``ε = 1``.

    Each truncation is uniform, but the admissible radius shrinks to ``0``.
    """
    R = QT.rational_rplus()
    out = []
    for n in range(2, N + 1):
        xs = [Fraction(1, k) for k in range(1, n + 1)]
        s = M.QMetricSpace([str(x) for x in xs], R, [[abs(a - b) for b in xs] for a in xs], f"inv{n}")
        ys = [1 / x for x in xs]
        t = M.QMetricSpace([str(y) for y in ys], R, [[abs(a - b) for b in ys] for a in ys], f"img{n}")
        f = list(range(n))
        assert M.is_uniformly_continuous(f, s, t)
        eps = Fraction(1)
        good = [r for r in s.radii() if r is not QT.INF and all(M._f_ball_inside(f, s, t, x, r, eps) for x in range(n))]
        out.append((n, str(max(good))))
    return out


@builtin("metrize-all-3pt", "every topology on 3 points is the ball topology of its metrization")
def metrize_all(ctx: RunContext) -> list:
    tops = T.all_topologies(3)
    by_closure = T.all_topologies_by_closure(3)
    out = [check("29 topologies on 3 points, two enumerations agree", len(tops) == 29 and set(tops) == by_closure, (len(tops), len(by_closure)))]
    bad = []
    literal = 0
    for t in tops:
        mz = M.metrize(t)
        if M.metrized_topology(mz) != t:
            bad.append(("ball topology", T.serialize(t)))
        if M.metrized_total_topology(mz) != t:
            bad.append(("totally-below topology", T.serialize(t)))
        if len(t) <= 4:
            tau, tau_t = M.metrized_topology_literal(mz)
            literal += 1
            if tau != t or tau_t != t:
                bad.append(("literal", T.serialize(t)))
    out.append(check("metrization round-trip", not bad, bad[:3], literal_checks=literal))
    sier = T.sierpinski()
    out.append(check("Sierpinski round-trip", M.metrized_topology(M.metrize(sier)) == sier))
    return out


# ---------------------------------------------------------------- robustness


def _br_spaces(ctx: RunContext, rng: Lcg):
    qs = [QT.from_spec(e) for e in ("sigma", "product:sigma,sigma", "chain_plus:3")]
    spaces = [M.x3_fixture(), M.path_space(3)]
    for q in qs:
        for n in range(1, 5):
            for _ in range(4 if n < 4 else 3):
                spaces.append(M.random_space(rng, q, n))
    for n in range(1, min(ctx.cap_points, 4) + 1):
        spaces += M.all_sigma_spaces(n)
    return spaces


@builtin("br-properties", "imprecision neighbourhoods: monotone, composable, closure-invariant, fattening bounds")
def br_properties(ctx: RunContext) -> list:
    rng = ctx.rng("br-properties")
    spaces = _br_spaces(ctx, rng)
    bad = []
    for s in spaces:
        for k, v in PS.br_properties(s).items():
            if v is not None:
                bad.append((s.name, s.q.name, k, v))
    p = M.path_space(3)
    out = [check(f"imprecision laws on {len(spaces)} spaces", not bad, bad[:3])]
    out.append(check("path space: B_R({1}, 1) = {0,1,2}", PS.b_r(p, 0b10, p.q.parse("1")) == 0b111))
    D = M.discrete_space(QT.sigma(), 3)
    out.append(check("discrete metric: B_R(A, top) = A", all(PS.b_r(D, A, D.q.top) == A for A in range(8))))
    return out


@builtin("robust-specialization", "robust specialization from open sets equals the dual-closure criterion")
def robust_specialization(ctx: RunContext) -> list:
    rng = ctx.rng("robust-specialization")
    spaces = _br_spaces(ctx, rng)
    bad = []
    for s in spaces:
        try:
            PS.robust_specialization(s)
        except AssertionError as exc:
            bad.append((s.name, str(exc)))
    out = [check(f"three computations agree on {len(spaces)} spaces", not bad, bad[:3])]
    X3 = M.x3_fixture()
    sp = PS.robust_specialization(X3)
    out.append(check("X3: robust specialization is reverse inclusion", all(sp[A, B] == (B & ~A == 0) for A in range(8) for B in range(8))))
    D = M.discrete_space(QT.sigma(), 2)
    R = PS.robust_topology_small(D)
    down = {U for U in range(1 << 4) if all((U >> B) & 1 for A in O.bits(U) for B in PS.submasks(A))}
    out.append(check("discrete Σ on 2 points: robust opens are the down-closed families", set(R.opens) == down))
    return out


@builtin("hausdorff-theorem", "robust topology = ball topology of the d_S powerspace")
def hausdorff_theorem(ctx: RunContext) -> list:
    rng = ctx.rng("hausdorff-theorem")
    out = []
    for q in _space_quantales():
        bad = []
        for i in range(50):
            s = M.random_space(rng, q, 3)
            rep = PS.hausdorff_theorem_check(s)
            if not rep.holds:
                bad.append((i, rep.witness))
        out.append(check(f"exhaustive oracle, 50 spaces of 3 points over {q.name}", not bad, bad[:3], strategy="exhaustive"))
    if ctx.cap_points < 5:
        out.append(skipped("filter refinement on 5-point spaces", f"cap-points {ctx.cap_points} < 5"))
        return out
    qs = _space_quantales()
    bad = []
    for i in range(50):
        s = M.random_space(rng, qs[i % len(qs)], 5)
        rep = PS.hausdorff_theorem_check(s)
        if not rep.holds or rep.strategy != "filter-refinement":
            bad.append((i, s.q.name, rep.witness))
    out.append(CheckResult("filter refinement, 50 spaces of 5 points", "pass" if not bad else "fail", {}, bad[:3] or None, "filter-refinement"))
    out.append(check("X3 fixture", PS.hausdorff_theorem_check(M.x3_fixture()).holds, strategy="exhaustive"))
    return out


# ---------------------------------------------------------------- monads


def _monad_spaces(rng: Lcg, q, k: int = 4):
    return [M.random_space(rng, q, 1 + rng.below(3), name=f"{q.name}#{i}") for i in range(k)]


def monad_law_report(m: PS.MonadInstance, rng: Lcg, rounds: int = 30) -> PS.LawReport:
    rep = PS.LawReport()
    for e in ("sigma", "product:sigma,sigma", "chain_plus:2"):
        q = QT.from_spec(e)
        spaces = _monad_spaces(rng, q)
        if e == "product:sigma,sigma":
            spaces.append(M.x3_fixture() if m.tag == "P_S" else spaces[0])
        if m.tag == "P_Q" and e == "product:sigma,sigma":
            spaces[-1] = M.random_space(rng, q, 3)
        arrows = []
        enrich = []
        for _ in range(rounds):
            X, Y, Z = (rng.choice(spaces) for _ in range(3))
            if m.tag == "P_Q" and not (X.q is Y.q is Z.q):
                continue
            f, g = PS.random_kleisli(rng, m, X, Y), PS.random_kleisli(rng, m, Y, Z)
            arrows.append((f, g))
            for k in (f, g):
                if k is not None:
                    k2 = PS.ordered_variant(rng, m, k)
                    if k2 is not None:
                        enrich.append((k2, k))
        PS.verify_monad_laws(m, spaces, arrows, rep)
        PS.verify_enrichment(m, enrich, rep)
    return rep


def _law_checks(tag: str, rep: PS.LawReport) -> list:
    return [check(f"{tag}: {law}", not any(f[0] == law for f in rep.failures), _first(f for f in rep.failures if f[0] == law), instances=n) for law, n in sorted(rep.counts.items())]


@builtin("monad-laws", "Kleisli laws, arrow-ness of extensions and enrichment for P_Q, P_S and C_S")
def monad_laws(ctx: RunContext) -> list:
    rng = ctx.rng("monad-laws")
    out = []
    total = 0
    for tag in ("P_Q", "P_S"):
        rep = monad_law_report(PS.monad_ops(tag), rng)
        total += rep.instances
        out += _law_checks(tag, rep)
    qs = [QT.from_spec(e) for e in ("sigma", "product:sigma,sigma", "chain_plus:2")]
    crep = PS.LawReport()
    for Q, Q2, Q3 in itertools.product(qs, repeat=3):
        arrows = [(PS.random_cs_arrow(rng, Q, Q2), PS.random_cs_arrow(rng, Q, Q2), PS.random_cs_arrow(rng, Q2, Q3)) for _ in range(4)]
        PS.verify_cs_laws(Q, Q2, Q3, arrows, crep)
    total += crep.instances
    out += _law_checks("C_S", crep)
    X3 = M.x3_fixture()
    m = PS.monad_ops("P_S")
    e = m.extend(m.unit(X3))
    out.append(check("X3: extending the unit gives the identity", list(e.f) == list(range(8))))
    empty = PS.KleisliArrow(X3, X3, (0, 0, 0), [0] * len(X3.q))
    out.append(check("the empty-valued arrow extends to the constant empty map", all(v == 0 for v in PS.monad_ops("P_Q").extend(empty).f)))
    out.append(check("at least 500 law instances", total >= 500, total, instances=total))
    return out


@builtin("transformer-laws", "the separated P_S monad: laws, section independence, agreement on separated powerspaces")
def transformer_laws(ctx: RunContext) -> list:
    rng = ctx.rng("transformer-laws")
    m = PS.transformed_monad(PS.monad_ops("P_S"))
    rep = monad_law_report(m, rng)
    out = _law_checks("T(P_S)", rep)
    ks = []
    for e in ("sigma", "product:sigma,sigma"):
        q = QT.from_spec(e)
        for _ in range(10):
            X = M.random_space(rng, q, 3)
            k = PS.random_kleisli(rng, m, X, X)
            if k is not None:
                ks.append(k)
    out.append(check("extension does not depend on the section", PS.section_independence(m, ks), instances=len(ks)))
    X3 = M.x3_fixture()
    S = PS.separated_powerspace(X3)
    u = m.unit(X3)
    out.append(check("unit is the class of the closure of {x}", all(S.section[u.f[x]] == M.closure_dual(X3, 1 << x) for x in range(3))))
    # X3 is separated and every subset is its own closure, so nothing is identified
    ps = PS.monad_ops("P_S")
    k = PS.random_kleisli(rng, ps, X3, X3)
    kt = PS.KleisliArrow(X3, X3, tuple(S.r[a] for a in k.f), k.realizer)
    agree = len(S.section) == 8 and [S.section[c] for c in m.extend(kt).f] == [ps.extend(k).f[S.section[c]] for c in range(8)]
    out.append(check("on a separated powerspace the transformer agrees with P_S", agree))
    out.append(check("at least 100 law instances", rep.instances >= 100, rep.instances, instances=rep.instances))
    return out


# ---------------------------------------------------------------- paper fixtures


def transported_fixture() -> M.QMetricSpace:
    C = QT.chain_plus(2)
    d = [[0, 2, 1], [2, 0, 1], [1, 1, 0]]
    return M.QMetricSpace(["x0", "x1", "x"], C, d, "X3-linear")


@builtin("sigma2-counterexample", "no metric on P(X) over Σ² induces the robust topology of X3")
def sigma2_counterexample(ctx: RunContext) -> list:
    X3 = M.x3_fixture()
    res = PS.powerset_metric_feasible(X3)
    out = [
        check(
            "X3: infeasible at ({x0,x1}, {x}) with forced bound top",
            not res.feasible and res.violation == (0b011, 0b100) and int(res.forced_lower_bounds[0b011, 0b100]) == X3.q.top,
            res.violation,
            basis=res.basis,
        )
    ]
    s = transported_fixture()
    res2 = PS.powerset_metric_feasible(s)
    target = PS.robust_specialization(s)
    dq = PS.build_powerspace(s, "dq").space.d
    out.append(check("chain_plus(2) transport: feasible, d_Q is a witness", res2.feasible and PS.is_feasibility_witness(s, dq, target, res2.forced_lower_bounds), basis=res2.basis))
    one = M.discrete_space(QT.sigma(), 1)
    out.append(check("one-point space is feasible", PS.powerset_metric_feasible(one).feasible))
    return out


@builtin("linear-iso-remark", "for linear Q the two powerspace metrics agree; for Σ² they do not")
def linear_iso_remark(ctx: RunContext) -> list:
    rng = ctx.rng("linear-iso-remark")
    out = []
    for n in (1, 2, 3):
        q = QT.chain_plus(n)
        spaces = [M.random_space(rng, q, 1 + rng.below(4)) for _ in range(20)] + [M.path_space(n)]
        bad = []
        for s in spaces:
            r = PS.linear_remark(s)
            if not (r.join_matches and r.inverse_realizes and r.topologies_equal):
                bad.append((s.name, r))
        out.append(check(f"chain_plus({n}): join of d_S = d_Q, inverse realizer, equal topologies", not bad, bad[:2], spaces=len(spaces)))
    R = QT.rational_rplus()
    bad = [s.name for s in (M.random_space(rng, R, 3) for _ in range(10)) if not all(vars(PS.linear_remark(s)).values())]
    out.append(check("rplus: the same on 10 spaces", not bad, bad))
    X3 = M.x3_fixture()
    tq = M.ball_topology(PS.build_powerspace(X3, "dq").space)
    out.append(check("Σ² fixture: d_Q topology differs from the robust topology", tq != PS.robust_topology_small(X3)))
    return out


def truncation(N: int, discrete: bool) -> M.QMetricSpace:
    R = QT.rational_rplus()
    xs = [Fraction(1, 2**k) for k in range(N)]
    if discrete:
        d = [[Fraction(0) if a == b else Fraction(1) for b in xs] for a in xs]
    else:
        d = [[abs(a - b) for b in xs] for a in xs]
    return M.QMetricSpace([str(x) for x in xs], R, d, "discrete" if discrete else "euclid")


@builtin("taur-containment", "on finite truncations the Euclidean robust topology sits inside the discrete one")
def taur_containment(ctx: RunContext) -> list:
    out = []
    for N in range(1, 5):
        e, dsc = truncation(N, False), truncation(N, True)
        Re, Rd = PS.robust_topology_small(e), PS.robust_topology_small(dsc)
        same_balls = M.ball_topology(e) == M.ball_topology(dsc) == T.discrete(N)
        out.append(check(f"N={N}: equal ball topologies, robust containment", same_balls and Re.is_subtopology_of(Rd), opens=(len(Re), len(Rd))))
    return out


def run_builtin(name: str, ctx: RunContext) -> list:
    b = BUILTINS[name]
    try:
        return b.run(ctx)
    except CapExceededError as exc:
        return [skipped(name, str(exc))]


def run_all(ctx: RunContext, names=None) -> list:
    """Reports for ``names`` (default: every builtin except ``determinism``)."""
    from .report import Report

    names = names or [n for n in BUILTINS if n != "determinism"]
    return [Report(n, ctx.seed, run_builtin(n, ctx)) for n in names]


@builtin("determinism", "two runs of every other builtin with the same seed give identical structured reports")
def determinism(ctx: RunContext) -> list:
    from .report import to_structured

    a = to_structured(run_all(ctx))
    b = to_structured(run_all(ctx))
    diff = _first(i for i, (x, y) in enumerate(zip(a.splitlines(), b.splitlines())) if x != y)
    return [check("byte-identical structured reports", a == b, diff, size=len(a))]
