import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qmet import metric as M
from qmet import powerspace as PS
from qmet import quantale as QT
from qmet import topology as T
from qmet.cli.builtins import transported_fixture, truncation
from qmet.errors import CapExceededError, RadiusError
from qmet.order import bits
from qmet.rng import Lcg

seeds = st.integers(0, 2**32 - 1)
TABLES = [QT.from_spec(e) for e in QT.BUILTIN_TABLES if len(QT.from_spec(e)) <= 6]
THEOREM_QS = [QT.from_spec(e) for e in ("sigma", "product:sigma,sigma", "chain_plus:3")] + [QT.rational_rplus()]


def spaces(qs, max_n=4, min_n=1):
    return st.builds(lambda seed, qi, n: M.random_space(Lcg(seed), qs[qi], n), seeds, st.integers(0, len(qs) - 1), st.integers(min_n, max_n))


def test_b_r_examples():
    p = M.path_space(3)
    assert PS.b_r(p, 0b0010, p.q.parse("1")) == 0b0111
    assert PS.b_r(p, 0, p.q.unit) == 0
    D = M.discrete_space(QT.sigma(), 3)
    assert all(PS.b_r(D, A, D.q.top) == A for A in range(8))
    R = M.QMetricSpace(["a"], QT.rational_rplus(), [[Fraction(0)]])
    with pytest.raises(RadiusError):
        PS.b_r(R, 1, Fraction(0))


def test_fattening_contains_the_imprecision_ball():
    p = M.path_space(3)
    for A in range(16):
        for r in PS.all_deltas(p):
            assert PS.b_r(p, A, r) & ~PS.fattening(p, A, r) == 0


@given(spaces(TABLES))
def test_imprecision_laws_on_tables(s):
    assert all(v is None for v in PS.br_properties(s).values())


@given(spaces([QT.rational_rplus(), QT.rational_rmax()]))
def test_imprecision_laws_on_rationals(s):
    assert all(v is None for v in PS.br_properties(s).values())


def test_robust_open_examples():
    X = M.x3_fixture()
    assert PS.robust_open(X, range(8))
    assert PS.robust_open(X, [])
    assert not PS.robust_open(X, [0b111])
    D = M.discrete_space(QT.sigma(), 2)
    R = PS.robust_topology_small(D)
    down = {U for U in range(1 << 4) if all(U >> B & 1 for A in bits(U) for B in PS.submasks(A))}
    assert set(R.opens) == down


def test_robust_specialization_of_x3_is_reverse_inclusion():
    sp = PS.robust_specialization(M.x3_fixture())
    assert all(sp[A, B] == (B & ~A == 0) for A in range(8) for B in range(8))


@given(spaces(THEOREM_QS))
def test_robust_specialization_matches_dual_closure(s):
    sp = PS.robust_specialization(s)
    for A, B in itertools.product(range(1 << s.n), repeat=2):
        assert sp[A, B] == (B & ~M.closure_dual(s, A) == 0)
    tau = PS.robust_topology_small(s)
    assert np.array_equal(tau.specialization(), sp)


@given(spaces(THEOREM_QS, max_n=3))
def test_least_robust_open_is_generated_by_the_dual_closure(s):
    tau = PS.robust_topology_small(s)
    for A in range(1 << s.n):
        Mx = PS.minimal_robust_open(s, A)
        assert Mx == M.closure_dual(s, A)
        assert tau.neighbourhood(A) == PS.family_of_subsets(Mx)


def test_robust_enumerator_cap():
    with pytest.raises(CapExceededError):
        PS.robust_topology_small(M.discrete_space(QT.sigma(), 5))


@given(spaces(TABLES + [QT.rational_rplus()], max_n=3))
def test_powerspace_metrics(s):
    q = s.q
    PQ = PS.build_powerspace(s, "dq").space
    PSp = PS.build_powerspace(s, "ds").space
    C = PSp.q
    assert M.verify_metric(PQ).passed and M.verify_metric(PSp).passed
    m = 1 << s.n
    for A1, A2 in itertools.product(range(m), repeat=2):
        want = q.finite_meet(q.finite_join(s.dist(x1, x2) for x1 in bits(A1)) for x2 in bits(A2))
        assert PQ.dist(A1, A2) == want
    assert [list(r) for r in np.asarray(PS.ds_table(s, C) if isinstance(q, QT.TableQuantale) else PSp.d)] == [
        list(r) for r in np.asarray(PS.ds_via_eta(s, C))
    ]
    for A in range(1, m):
        assert PSp.dist(A, 0) == C.top and PSp.dist(0, A) == C.bottom
        assert PQ.dist(A, 0) == q.top and PQ.dist(0, A) == q.bottom


def test_unit_arrows_have_realizers():
    X = M.x3_fixture()
    for v in ("dq", "ds"):
        assert PS.unit_arrow(X, v).check_realizer()


def test_theorem_on_fixtures():
    assert PS.hausdorff_theorem_check(M.x3_fixture()).holds
    for q in THEOREM_QS:
        one = M.discrete_space(q, 1)
        rep = PS.hausdorff_theorem_check(one)
        assert rep.holds and rep.strategy == "exhaustive"


@given(spaces(THEOREM_QS, max_n=3))
def test_theorem_strategies_agree(s):
    a = PS.hausdorff_theorem_check(s, "exhaustive")
    b = PS.hausdorff_theorem_check(s, "filter-refinement")
    assert a.holds and b.holds


@given(spaces(THEOREM_QS, max_n=5, min_n=4))
def test_theorem_by_filter_refinement(s):
    rep = PS.hausdorff_theorem_check(s)
    assert rep.holds and rep.strategy == "filter-refinement"


def test_theorem_cap():
    with pytest.raises(CapExceededError):
        PS.hausdorff_theorem_check(M.discrete_space(QT.sigma(), 6))


def test_feasibility_on_the_sigma2_fixture():
    X = M.x3_fixture()
    res = PS.powerset_metric_feasible(X)
    assert not res.feasible and res.basis == "necessary-condition"
    assert res.violation == (0b011, 0b100)
    assert int(res.forced_lower_bounds[0b011, 0b100]) == X.q.top


def test_feasibility_after_transport_to_a_chain():
    s = transported_fixture()
    res = PS.powerset_metric_feasible(s)
    assert res.feasible
    dq = PS.build_powerspace(s, "dq").space.d
    assert PS.is_feasibility_witness(s, dq, PS.robust_specialization(s), res.forced_lower_bounds)
    assert PS.powerset_metric_feasible(M.discrete_space(QT.sigma(), 1)).feasible


def test_dq_is_not_a_witness_for_sigma2():
    X = M.x3_fixture()
    dq = PS.build_powerspace(X, "dq").space
    assert dq.dist(0b011, 0b100) == X.q.top
    assert not PS.is_feasibility_witness(X, dq.d, PS.robust_specialization(X))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_linear_remark_on_chains(n):
    rng = Lcg(n)
    for _ in range(10):
        r = PS.linear_remark(M.random_space(rng, QT.chain_plus(n), 1 + rng.below(3)))
        assert r.join_matches and r.inverse_realizes and r.topologies_equal


def test_sigma2_dq_topology_is_not_robust():
    X = M.x3_fixture()
    assert M.ball_topology(PS.build_powerspace(X, "dq").space) != PS.robust_topology_small(X)
    assert not PS.linear_remark(X).topologies_equal


@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_truncation_containment(N):
    e, d = truncation(N, False), truncation(N, True)
    assert PS.robust_topology_small(e).is_subtopology_of(PS.robust_topology_small(d))


# ---------------------------------------------------------------- monads


def law_spaces(rng, q, k=3):
    return [M.random_space(rng, q, 1 + rng.below(3)) for _ in range(k)]


@pytest.mark.parametrize("tag", ["P_Q", "P_S", "T(P_S)"])
@pytest.mark.parametrize("expr", ["sigma", "product:sigma,sigma", "chain_plus:2"])
def test_monad_laws(tag, expr):
    rng = Lcg(11)
    m = PS.monad_ops(tag)
    sp = law_spaces(rng, QT.from_spec(expr))
    arrows, enrich = [], []
    for _ in range(12):
        X, Y, Z = (rng.choice(sp) for _ in range(3))
        f, g = PS.random_kleisli(rng, m, X, Y), PS.random_kleisli(rng, m, Y, Z)
        arrows.append((f, g))
        if f is not None:
            f2 = PS.ordered_variant(rng, m, f)
            if f2 is not None:
                enrich.append((f2, f))
    rep = PS.verify_monad_laws(m, sp, arrows)
    PS.verify_enrichment(m, enrich, rep)
    assert rep.passed, rep.failures[:3]
    assert rep.instances > 0


def test_extending_the_unit_is_the_identity():
    X = M.x3_fixture()
    for tag in ("P_Q", "P_S"):
        m = PS.monad_ops(tag)
        assert list(m.extend(m.unit(X)).f) == list(range(8))


def test_empty_valued_arrow():
    X = M.x3_fixture()
    m = PS.monad_ops("P_Q")
    k = PS.KleisliArrow(X, X, (0, 0, 0), list(X.q.elements()))
    assert all(v == 0 for v in m.extend(k).f)


def test_x3_associativity_over_sigma2():
    rng = Lcg(4)
    X = M.x3_fixture()
    m = PS.monad_ops("P_S")
    pairs = [(PS.random_kleisli(rng, m, X, X), PS.random_kleisli(rng, m, X, X)) for _ in range(10)]
    assert PS.verify_monad_laws(m, [X], pairs).passed


def test_transformer():
    m = PS.transformed_monad(PS.monad_ops("P_S"))
    X = M.x3_fixture()
    S = PS.separated_powerspace(X)
    u = m.unit(X)
    assert all(S.section[u.f[x]] == M.closure_dual(X, 1 << x) for x in range(3))
    rng = Lcg(2)
    ks = [PS.random_kleisli(rng, m, X, X) for _ in range(6)]
    assert PS.section_independence(m, [k for k in ks if k is not None])
    alt = PS.transformed_monad(PS.monad_ops("P_S"), alt_section=True)
    pairs = [(PS.random_kleisli(rng, alt, X, X), PS.random_kleisli(rng, alt, X, X)) for _ in range(6)]
    assert PS.verify_monad_laws(alt, [X], pairs).passed


def test_transformer_identifies_equivalent_subsets():
    S = QT.sigma()
    s = M.QMetricSpace(["a", "b"], S, [[S.top, S.top], [S.bottom, S.top]])
    sp = PS.separated_powerspace(s)
    assert len(sp.section) < 4
    for c in range(len(sp.section)):
        A = sp.section[c]
        assert M.closure_dual(s, A) == A


@pytest.mark.parametrize("exprs", [("sigma", "sigma", "sigma"), ("product:sigma,sigma", "chain_plus:2", "sigma")])
def test_scott_closed_monad_laws(exprs):
    rng = Lcg(8)
    Q, Q2, Q3 = map(QT.from_spec, exprs)
    arrows = [(PS.random_cs_arrow(rng, Q, Q2), PS.random_cs_arrow(rng, Q, Q2), PS.random_cs_arrow(rng, Q2, Q3)) for _ in range(5)]
    rep = PS.verify_cs_laws(Q, Q2, Q3, arrows)
    assert rep.passed and rep.instances > 0


def test_cs_unit_extends_to_identity():
    Q = QT.product(QT.sigma(), QT.sigma())
    C = QT.scott_closed_quantale(Q)
    assert PS.cs_extend(Q, Q, PS.cs_unit(Q)) == list(range(len(C)))
