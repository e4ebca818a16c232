import itertools
import threading
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qmet import metric as M
from qmet import quantale as QT
from qmet import topology as T
from qmet.cli.builtins import ball_axioms, collapse_example, truncation_moduli
from qmet.errors import HypothesisViolation, RadiusError
from qmet.quantale import INF
from qmet.rng import Lcg

seeds = st.integers(0, 2**32 - 1)
QUANTALES = [QT.from_spec(e) for e in ("sigma", "product:sigma,sigma", "chain_plus:3", "chain_max:2", "relations:2")] + [
    QT.rational_rplus(),
    QT.rational_rmax(),
]
SMALL = [q for q in QUANTALES if isinstance(q, QT.TableQuantale) and len(q) <= 5]


def spaces(max_n=4, qs=QUANTALES):
    return st.builds(lambda seed, qi, n: M.random_space(Lcg(seed), qs[qi], n), seeds, st.integers(0, len(qs) - 1), st.integers(1, max_n))


def test_x3_fixture():
    X = M.x3_fixture()
    rep = M.verify_metric(X)
    assert rep.passed and rep.symmetric and rep.separated
    assert np.array_equal(rep.d_preorder, np.eye(3, dtype=bool))
    assert M.ball(X, 0, X.q.top) == 0b001
    assert M.ball_topology(X) == T.discrete(3)


def test_discrete_and_broken_metrics():
    S = QT.sigma()
    D = M.discrete_space(S, 3)
    rep = M.verify_metric(D)
    assert rep.passed and np.array_equal(rep.d_preorder, np.eye(3, dtype=bool))
    bad = M.QMetricSpace(["a", "b"], S, [[S.bottom, S.bottom], [S.bottom, S.top]])
    rep = M.verify_metric(bad)
    assert not rep.passed and rep.violations[0] == ("1 <= d(x,x)", (0,))


def test_path_space_balls():
    p = M.path_space(3)
    assert p.n == 4
    assert M.ball(p, 1, p.q.parse("1")) == 0b0111
    assert M.verify_metric(p).passed


@given(spaces())
def test_bottom_ball_is_everything(s):
    for x in range(s.n):
        assert M.ball(s, x, s.q.bottom) == s.full


def test_radius_must_be_way_below_unit():
    R = QT.rational_rplus()
    s = M.QMetricSpace(["a"], R, [[Fraction(0)]])
    with pytest.raises(RadiusError):
        M.ball(s, 0, Fraction(0))
    assert M.ball(s, 0, Fraction(1)) == 1


@given(spaces())
def test_random_spaces_are_metrics(s):
    assert M.verify_metric(s).passed


@given(spaces(max_n=5))
def test_ball_laws(s):
    assert ball_axioms(s) == []


def test_dual_metric_needs_commutativity():
    R = QT.relations(2)
    s = M.random_space(Lcg(1), R, 2)
    with pytest.raises(HypothesisViolation):
        M.dual_space(s)
    t = M.random_space(Lcg(1), QT.sigma(), 3)
    assert M.ball_topology(M.dual_space(t)) == M.dual_ball_topology(t)


@given(spaces(max_n=3))
def test_closure_is_the_topological_closure(s):
    tau, dual = M.ball_topology(s), M.dual_ball_topology(s)
    for A in range(1 << s.n):
        assert M.closure(s, A) == tau.closure(A)
        assert M.closure_dual(s, A) == dual.closure(A)


def test_identity_and_constant_maps_are_uniform():
    rng = Lcg(3)
    for q in QUANTALES:
        s = M.random_space(rng, q, 3)
        ident = list(range(3))
        assert M.is_uniformly_continuous(ident, s, s)
        g = M.greatest_realizer(ident, s, s)
        assert q.leq(q.unit, g(q.unit))
        assert M.is_uniformly_continuous([1, 1, 1], s, s)
        assert M.MetArrow(s, s, ident, M.identity_morphism(q)).check_realizer() or not isinstance(q, QT.TableQuantale)


def test_collapsing_arrow_has_no_realizer():
    assert collapse_example().ok


def test_discrete_source_collapse_is_uniform():
    # a discrete source constrains only the diagonal, so the collapse is uniform
    s = M.discrete_space(QT.sigma(), 2)
    C = QT.chain_plus(2)
    t = M.QMetricSpace(["u", "v"], C, [[0, 2], [2, 0]])
    assert M.is_uniformly_continuous([0, 1], s, t)


@given(seeds)
def test_uniformity_characterizations_agree(seed):
    rng = Lcg(seed)
    s = M.random_space(rng, rng.choice(SMALL), 1 + rng.below(4))
    t = M.random_space(rng, rng.choice(SMALL), 1 + rng.below(4))
    f = [rng.below(t.n) for _ in range(s.n)]
    u = M.is_uniformly_continuous(f, s, t)
    assert u == (M.brute_force_realizer(f, s, t) is not None)
    p = M.is_pointwise_continuous(f, s, t)
    assert (not u or p) and p == M.is_topologically_continuous(f, s, t)
    if u:
        arrow = M.MetArrow(s, t, f, M.greatest_realizer(f, s, t))
        assert arrow.check_realizer()


def test_truncations_need_shrinking_radii():
    moduli = [Fraction(r) for _, r in truncation_moduli(5)]
    assert moduli == sorted(moduli, reverse=True) and moduli[-1] < moduli[0] / 8


def test_equalizer_of_equal_maps_is_the_source():
    s = M.path_space(2)
    e, arrow = M.equalizer([0, 1, 1], [0, 1, 1], s, s)
    assert e.n == s.n and M.is_isometry(arrow.f, e, s)
    e, arrow = M.equalizer([0, 1, 2], [0, 2, 2], s, s)
    assert arrow.f == [0, 2]


def test_coequalizer_joins_representatives():
    C = QT.chain_plus(3)
    t = M.path_space(3)
    one = M.discrete_space(C, 1)
    co = M.coequalizer([0], [1], one, t)
    assert co.classes[0] == [0, 1]
    d = co.space.d
    assert C.label(d[0, 1]) == "1"  # join of d(0,2)=2 and d(1,2)=1
    assert M.verify_metric(co.space).passed
    assert M.is_uniformly_continuous(co.arrow.f, t, co.space)


@given(spaces(max_n=3, qs=SMALL), seeds)
def test_coequalizer_universal_property(s, seed):
    rng = Lcg(seed)
    f = [rng.below(s.n) for _ in range(s.n)]
    g = [rng.below(s.n) for _ in range(s.n)]
    co = M.coequalizer(f, g, s, s)
    assert M.verify_metric(co.space).passed
    h = co.arrow.f
    assert all(h[f[x]] == h[g[x]] for x in range(s.n))
    for a, b in itertools.product(range(s.n), repeat=2):
        assert s.q.leq(s.dist(a, b), co.space.dist(h[a], h[b]))


def test_product_and_sum():
    a, b = M.path_space(3), M.path_space(3)
    P, projs = M.product_space([a, b])
    assert P.n == 16 and M.verify_metric(P).passed
    tup = P.q.extra["tuples"]
    i, j = P.points.index("(0,1)"), P.points.index("(2,3)")
    assert tup[P.d[i, j]] == (2, 2)
    for pr in projs:
        assert pr.check_realizer()
    S, inj = M.sum_space([a, M.discrete_space(a.q, 2)])
    assert S.n == 6 and M.verify_metric(S).passed
    assert S.dist(0, 5) == a.q.bottom
    assert all(M.is_isometry(i.f, i.source, S) for i in inj)
    with pytest.raises(HypothesisViolation):
        M.sum_space([a, M.x3_fixture()])


def test_separation_examples():
    S = QT.sigma()
    s = M.QMetricSpace(["a", "b"], S, [[S.top] * 2] * 2)
    sep = M.separate(s)
    assert sep.quotient.n == 1
    X = M.x3_fixture()
    sep = M.separate(X)
    assert sep.quotient.n == 3 and M.is_isometry(sep.r.f, X, sep.quotient)


@given(spaces(max_n=5))
def test_separation_is_an_equivalence(s):
    sep = M.separate(s)
    r, sec = sep.r.f, sep.s_section.f
    assert M.is_isometry(r, s, sep.quotient) and M.is_isometry(sec, sep.quotient, s)
    assert [r[y] for y in sec] == list(range(sep.quotient.n))
    round_trip = [sec[r[x]] for x in range(s.n)]
    assert M.hom_leq(round_trip, list(range(s.n)), s) and M.hom_leq(list(range(s.n)), round_trip, s)
    assert M.separate(sep.quotient).quotient.n == sep.quotient.n


def test_metrization_examples():
    sier = T.sierpinski()
    Mz = M.metrize(sier)
    L = Mz.space.q
    # S_ab holds the opens O with a in O implying b in O
    assert L.label(Mz.space.dist(0, 1)) == L.label(L.principal(0b101))
    assert M.metrized_topology(Mz) == sier
    assert M.metrized_topology(M.metrize(T.discrete(2))) == T.discrete(2)
    assert M.metrized_topology(M.metrize(T.indiscrete(3))) == T.indiscrete(3)


@pytest.mark.parametrize("t", T.all_topologies(3), ids=lambda t: T.serialize(t))
def test_metrization_round_trip(t):
    Mz = M.metrize(t)
    assert M.metrized_topology(Mz) == t
    assert M.metrized_total_topology(Mz) == t
    if len(t) <= 4:
        tau, tau_t = M.metrized_topology_literal(Mz)
        assert tau == t and tau_t == t


def test_metrization_cap():
    from qmet.errors import CapExceededError

    with pytest.raises(CapExceededError):
        M.metrize(T.discrete(4), cap=12)


def test_caches_compute_once_under_threads():
    s = M.random_space(Lcg(9), QT.product(QT.sigma(), QT.sigma()), 4)
    calls = []

    def build():
        calls.append(1)
        return M.ball_topology(s)

    out = []
    threads = [threading.Thread(target=lambda: out.append(s.cached("probe", build))) for _ in range(8)]
    for th in threads:
        th.start()
    for th in threads:
        th.join()
    assert len(calls) == 1 and len(set(out)) == 1


def test_empty_space():
    s = M.QMetricSpace([], QT.sigma(), np.zeros((0, 0), dtype=np.int64))
    assert M.ball_topology(s) == T.FinTopology(0, {0})


def test_rational_balls_use_distance_thresholds():
    R = QT.rational_rplus()
    xs = [Fraction(0), Fraction(1), Fraction(3)]
    s = M.QMetricSpace(["a", "b", "c"], R, [[abs(a - b) for b in xs] for a in xs])
    assert M.ball(s, 0, Fraction(3, 2)) == 0b011
    assert M.ball(s, 0, INF) == 0b111
    assert M.ball_topology(s) == T.discrete(3)
