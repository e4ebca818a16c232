import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qmet import order as O
from qmet import quantale as QT
from qmet.errors import HypothesisViolation, OrderError, UnknownSymbolError
from qmet.quantale import EMPTY, INF
from qmet.rng import Lcg

SMALL = [e for e in QT.BUILTIN_TABLES if len(QT.from_spec(e)) <= 8]
fracs = st.fractions(min_value=0, max_value=20, max_denominator=12)
values = st.one_of(fracs, st.just(INF))


@pytest.mark.parametrize("expr", QT.BUILTIN_TABLES)
def test_builtins_pass_the_law_checker(expr):
    Q = QT.from_spec(expr)
    rep = QT.verify_quantale(Q)
    assert rep.passed, rep.violations
    assert not rep.trusted


@pytest.mark.parametrize("expr", SMALL)
def test_law_checker_agrees_with_the_slow_oracle(expr):
    assert QT.quantale_oracle_ok(QT.from_spec(expr))


def test_sigma():
    S = QT.sigma()
    assert len(S) == 2 and S.unit == S.top and S.is_locale and S.is_affine
    assert S.tensor(S.top, S.bottom) == S.bottom


def test_relations_flags():
    R = QT.relations(2)
    rep = QT.verify_quantale(R)
    assert rep.passed
    assert not rep.flags["is_commutative"] and not rep.flags["is_affine"] and not rep.flags["is_linear"]
    assert R.label(R.unit) == "{00,11}"
    r, s = R.parse("{01}"), R.parse("{10}")
    assert R.label(R.tensor(r, s)) == "{00}"


def test_bottom_absorption_violation_is_reported():
    D = O.diamond()
    S2 = QT.product(QT.sigma(), QT.sigma())
    t = S2.tensor_table.copy()
    x = 1
    t[x, S2.bottom] = x
    bad = QT.TableQuantale(S2.poset, t, S2.unit, "bad")
    rep = QT.verify_quantale(bad)
    assert not rep.passed
    laws = dict(rep.violations)
    assert "x*bot = bot" in laws or "left distributivity" in laws
    assert len(D) == 4


def test_mutations_are_caught_or_genuine():
    from qmet.cli.builtins import mutants

    rng = Lcg(5)
    for expr in ("sigma", "chain_plus:2", "product:sigma,sigma"):
        Q = QT.from_spec(expr)
        for _, _, m in mutants(Q, rng, 30):
            rep = QT.verify_quantale(m)
            assert rep.passed == QT.quantale_oracle_ok(m)
            if not rep.passed:
                assert rep.violations


def test_residual_examples():
    C = QT.chain_plus(3)
    assert C.label(C.residual(C.parse("1"), C.parse("3"))) == "2"
    for Q in map(QT.from_spec, SMALL):
        for z in Q.elements():
            assert Q.residual(Q.unit, z) == z


def test_rmax_residual():
    R = QT.rational_rmax()
    assert R.residual(Fraction(1), Fraction(3)) == 3
    assert R.residual(Fraction(3), Fraction(1)) == 0


@pytest.mark.parametrize("expr", SMALL)
def test_residual_adjunction_on_tables(expr):
    Q = QT.from_spec(expr)
    for x, y, z in itertools.product(Q.elements(), repeat=3):
        assert Q.leq(Q.tensor(x, y), z) == Q.leq(y, Q.residual(x, z, "left"))
        assert Q.leq(Q.tensor(y, x), z) == Q.leq(y, Q.residual(x, z, "right"))


@given(values, values, values, st.sampled_from(["plus", "max"]))
def test_residual_adjunction_on_rationals(x, y, z, kind):
    Q = QT.RationalQuantale(kind)
    assert Q.leq(Q.tensor(x, y), z) == Q.leq(y, Q.residual(x, z))


@given(values, values)
def test_rplus_way_below(x, y):
    R = QT.rational_rplus()
    assert R.way_below(x, y) == (x is INF or (y is not INF and x > y))
    if R.totally_below(x, y):
        assert R.way_below(x, y)
    assert R.way_below(x, x) == (x is INF)


def test_rational_laws_are_trusted():
    for R in (QT.rational_rplus(), QT.rational_rmax()):
        rep = QT.verify_quantale(R)
        assert rep.passed and rep.trusted


def test_constructor_names_and_errors():
    assert QT.from_spec("product:sigma,sigma").poset.is_lattice()
    with pytest.raises(UnknownSymbolError):
        QT.from_spec("nope")
    with pytest.raises(UnknownSymbolError):
        QT.sigma().parse("middle")
    with pytest.raises(HypothesisViolation):
        QT.day_convolution(QT.OrderedMonoid.of(QT.relations(2)), QT.sigma())


def test_product_projections_are_strict_and_join_preserving():
    P = QT.product(QT.chain_plus(2), QT.sigma())
    for j in range(2):
        rep = QT.verify_morphism(QT.projection(P, j))
        assert rep.checks["strict_monoidal"] and rep.checks["join_preserving"]


@pytest.mark.parametrize("expr", SMALL)
def test_affine_part_and_preserved_flags(expr):
    Q = QT.from_spec(expr)
    A = QT.affine_part(Q)
    assert A.unit == A.top
    P = QT.product(Q, QT.sigma())
    assert P.is_commutative == Q.is_commutative
    assert QT.verify_quantale(A).passed


def test_pointwise_hom_preserves_flags():
    H = QT.pointwise_hom(O.chain(2), QT.sigma())
    assert H.is_commutative and H.is_affine and QT.verify_quantale(H).passed


def test_chain_inclusions():
    # truncation makes 1 + 2 hit the cap, so neither inclusion is strict-monoidal
    inc = QT.verify_morphism(QT.chain_inclusion(3))
    assert inc.checks["join_preserving"] and not inc.checks["lax_monoidal"]
    assert inc.witnesses["strict_monoidal"] == (1, 2)
    inc = QT.verify_morphism(QT.chain_inclusion(3, top_to_inf=False))
    assert inc.checks["lax_monoidal"] and not inc.checks["strict_monoidal"]
    assert not inc.checks["join_preserving"]


def test_morphism_examples():
    assert QT.verify_morphism(QT.top_map(QT.sigma())).checks["lax_monoidal"]
    rep = QT.verify_morphism(QT.meet_unit_map(QT.relations(2)))
    assert rep.passed and rep.checks["scott_continuous"]
    not_mono = QT.QuantaleMorphism(QT.sigma(), QT.sigma(), [1, 0])
    assert not QT.verify_morphism(not_mono).passed


def test_rational_morphisms_are_sampled():
    R = QT.rational_rplus()
    ceil = QT.QuantaleMorphism(R, R, lambda x: x if x is INF else Fraction(-((-x.numerator) // x.denominator)), "lax_monoidal")
    rep = QT.verify_morphism(ceil)
    assert rep.basis.startswith("sampled")
    assert not rep.checks["scott_continuous"]


def test_scott_closed_examples():
    C = QT.scott_closed_quantale(QT.sigma())
    assert len(C) == 3 and C.poset.is_chain()
    assert len(QT.scott_closed_quantale(QT.product(QT.sigma(), QT.sigma()))) == 6
    for n in (1, 2, 3):
        C = QT.scott_closed_quantale(QT.chain_plus(n))
        assert len(C) == n + 2 and C.poset.is_chain()
    L = QT.scott_closed_quantale(QT.rational_rplus())
    assert isinstance(L, QT.LiftedLinear) and L.bottom is EMPTY
    assert L.leq(EMPTY, INF) and not L.leq(INF, EMPTY)


@pytest.mark.parametrize("expr", ["sigma", "product:sigma,sigma", "chain_plus:2", "chain_max:3"])
def test_eta_C_is_strict_monoidal(expr):
    Q = QT.from_spec(expr)
    C = QT.scott_closed_quantale(Q)
    assert QT.verify_quantale(C).passed
    eta = lambda q: QT.eta_C(C, q)
    assert eta(Q.unit) == C.unit
    for x, y in itertools.product(Q.elements(), repeat=2):
        assert eta(Q.tensor(x, y)) == C.tensor(eta(x), eta(y))
        assert Q.leq(x, y) == C.leq(eta(x), eta(y))


def test_kleisli_C_examples():
    Q = QT.product(QT.sigma(), QT.sigma())
    C = QT.scott_closed_quantale(Q)
    unit = [QT.eta_C(C, q) for q in Q.elements()]
    assert QT.kleisli_C(C, C, unit) == list(range(len(C)))
    empty = C.bottom
    out = QT.kleisli_C(C, C, [empty] * len(Q))
    assert all(v == empty for v in out)
    h = [Q.meet(q, Q.parse("(top,bot)")) for q in Q.elements()]
    g = [QT.eta_C(C, v) for v in h]
    ext = QT.kleisli_C(C, C, g)
    for q in Q.elements():
        assert ext[QT.eta_C(C, q)] == QT.eta_C(C, h[q])
    with pytest.raises(OrderError):
        QT.kleisli_C(C, C, list(reversed(unit)))


@pytest.mark.parametrize("expr", QT.BUILTIN_TABLES)
def test_interpolation_on_tables(expr):
    assert QT.interpolation_failures(QT.from_spec(expr)) == []


@given(values, values, values, st.sampled_from(["plus", "max"]))
def test_interpolation_on_rationals(a, b, c, kind):
    assert QT.interpolation_failures(QT.RationalQuantale(kind), [(a, b, c)]) == []


def test_radius_candidates():
    R = QT.rational_rplus()
    assert R.radius_candidates([Fraction(1), Fraction(3), INF, Fraction(0)]) == (Fraction(1, 2), Fraction(2), Fraction(4), INF)
    S = QT.sigma()
    assert S.radius_candidates() == (S.unit,)


def test_free_quantale_eta_is_strict_monoidal():
    rng = Lcg(1)
    M = QT.OrderedMonoid.of(QT.chain_plus(2))
    F = QT.free_quantale(M)
    D = F.extra["lower_sets"]
    for x, y in itertools.product(range(3), repeat=2):
        assert D.eta(int(M.op[x, y])) == F.tensor(D.eta(x), D.eta(y))
    assert rng.below(3) in range(3)
