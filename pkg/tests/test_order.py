import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qmet import order as O
from qmet.errors import ArityError, NotALatticeError, OrderError, UnknownSymbolError
from qmet.rng import Lcg

seeds = st.integers(0, 2**32 - 1)


def idx(P, *labels):
    return [P.index(x) for x in labels]


def test_order_is_validated():
    with pytest.raises(OrderError):
        O.FinPoset(["a", "b"], [[True, True], [True, True]])
    with pytest.raises(OrderError):
        O.FinPoset(["a", "b"], [[False, False], [False, True]])
    with pytest.raises(OrderError):
        O.FinPoset(["a", "a"], np.eye(2, dtype=bool))
    with pytest.raises(OrderError):
        O.FinPoset("abc", [[1, 1, 0], [0, 1, 1], [0, 0, 1]])


def test_joins_and_meets():
    D = O.diamond()
    a, b, top, bot = idx(D, "a", "b", "top", "bot")
    assert D.joins_meets([a, b], "join") == top
    assert D.joins_meets([a, b], "meet") == bot
    assert D.join([]) == bot and D.meet([]) == top
    A = O.antichain(2)
    assert A.join([0, 1]) is None
    assert A.join([]) is None and A.meet([]) is None
    assert not A.is_lattice()


def test_way_below_examples():
    C = O.chain(3)
    assert O.way_below(C, 0, 2) and O.way_below_oracle(C, 0, 2)
    for L in O.enumerate_lattices(4):
        for y in range(len(L)):
            assert O.way_below(L, L.bottom, y)
    with pytest.raises(NotALatticeError):
        O.way_below(O.antichain(2), 0, 1)


def test_totally_below_in_diamond_and_m3():
    # every cover of top in the diamond contains a or something above it
    D = O.diamond()
    a, top = idx(D, "a", "top")
    assert O.totally_below(D, a, top) and O.totally_below_oracle(D, a, top)
    M = O.m3()
    a, top = idx(M, "a", "top")
    assert not O.totally_below(M, a, top) and not O.totally_below_oracle(M, a, top)


def test_lattice_counts():
    assert [len(O.enumerate_lattices(n)) for n in range(1, 7)] == [1, 1, 1, 2, 5, 15]


@pytest.mark.parametrize("n", range(1, 7))
def test_closed_forms_match_quantifier_definitions(n):
    for L in O.enumerate_lattices(n):
        for x, y in itertools.product(range(n), repeat=2):
            assert O.way_below(L, x, y) == O.way_below_oracle(L, x, y) == L.leq(x, y)
            assert O.totally_below(L, x, y) == O.totally_below_oracle(L, x, y)
            if O.totally_below(L, x, y):
                assert O.way_below(L, x, y)
        assert O.classify_lattice(L) == O.classify_lattice(L, oracle=True)


def test_classification():
    D = O.diamond()
    c = O.classify_lattice(D)
    assert c.prime_continuous and c.continuous and c.algebraic
    assert c.prime_elements == frozenset(idx(D, "a", "b"))
    assert not O.classify_lattice(O.m3()).prime_continuous
    assert not O.classify_lattice(O.n5(), oracle=True).prime_continuous
    for n in range(1, 6):
        assert O.classify_lattice(O.chain(n)).prime_continuous


def test_lower_set_lattice_examples():
    D = O.lower_set_lattice(O.antichain(2))
    assert sorted(D.masks) == [0, 1, 2, 3]
    for n in range(1, 6):
        L = O.lower_set_lattice(O.chain(n))
        assert len(L) == n + 1 and L.poset.is_chain()


@given(seeds, st.integers(1, 5))
def test_lower_sets_form_a_prime_algebraic_lattice(seed, n):
    P = O.random_poset(Lcg(seed), n)
    D = O.lower_set_lattice(P)
    L = D.poset
    assert L.is_lattice()
    for i, j in itertools.product(range(len(D)), repeat=2):
        assert D.masks[L.join([i, j])] == D.masks[i] | D.masks[j]
        assert D.masks[L.meet([i, j])] == D.masks[i] & D.masks[j]
    for p, q in itertools.product(range(n), repeat=2):
        assert P.leq(p, q) == L.leq(D.eta(p), D.eta(q))
    c = O.classify_lattice(L)
    assert c.prime_algebraic
    assert c.prime_elements == frozenset(D.eta(p) for p in range(n))


def test_lift_operation_examples():
    C = O.chain(2)
    mx = O.lift_operation(C, max, 2)
    assert mx(C.down[0], C.down[1]) == C.down[1]
    assert mx(0, C.full) == 0
    with pytest.raises(ArityError):
        mx(0)
    C3 = O.chain(3)
    mn = O.lift_operation(C3, min, 2)
    for x, y in itertools.product(range(3), repeat=2):
        assert mn(C3.down[x], C3.down[y]) == C3.down[min(x, y)]


@given(seeds, st.integers(1, 4))
def test_lifted_operations_distribute_over_joins(seed, n):
    rng = Lcg(seed)
    P = O.random_poset(rng, n)
    op = O.random_monotone_op(rng, P, 2)
    lifted = O.lift_operation(P, lambda a, b: int(op[a, b]), 2)
    masks = P.lower_sets()
    for x, a, b in itertools.product(masks, repeat=3):
        assert lifted(x, a | b) == lifted(x, a) | lifted(x, b)
        assert lifted(a | b, x) == lifted(a, x) | lifted(b, x)


def test_lower_set_representations_agree():
    D = O.diamond()
    for m in D.lower_sets():
        s = O.LowerSet.from_mask(D, m)
        assert s.to_mask(D) == m
        for x in range(len(D)):
            assert (x in s) == bool(m >> x & 1)
        assert all(not D.lt(g, h) for g in s.gens for h in s.gens)
    with pytest.raises(OrderError):
        O.LowerSet.from_mask(D, 1 << D.index("top"))


def test_symbolic_lower_sets_on_an_unmaterialized_order():
    # divisibility on the integers, never enumerated
    def div(a, b):
        return b % a == 0

    A = O.LowerSet([4, 6, 2], div)
    assert A.gens == frozenset({4, 6})
    assert 3 in A and 5 not in A
    assert O.LowerSet([2], div) <= A
    assert A.union(O.LowerSet([5], div)).gens == frozenset({4, 5, 6})


def _commutative_meet_algebra():
    C = O.chain(3)
    return O.TermAlgebra(C, {"*": C.meet_table(), "1": np.array(2), "meet": C.meet_table()})


def test_inequation_examples():
    A = _commutative_meet_algebra()
    r = O.check_inequation_lift(A, "x * y", "y * x")
    assert r.holds_in_A and r.holds_in_lift and r.linearity_ok
    r = O.check_inequation_lift(A, "x", "x * x")
    assert r.holds_in_A and r.holds_in_lift and r.linearity_ok
    r = O.check_inequation_lift(A, "x * x", "x")
    assert not r.linearity_ok and r.holds_in_A


def test_unpreserved_inequation_can_fail_after_lifting():
    # 1 <= x holds when 1 is bottom, but the empty lower set is below ↓1
    C = O.chain(2)
    A = O.TermAlgebra(C, {"*": C.join_table(), "1": np.array(0)})
    r = O.check_inequation_lift(A, "1", "x")
    assert r.holds_in_A and not r.holds_in_lift and not r.linearity_ok
    assert r.counterexample_in == "lift"


def test_term_errors():
    A = _commutative_meet_algebra()
    with pytest.raises(UnknownSymbolError):
        A.parse("join(x, y)")
    with pytest.raises(ArityError):
        A.parse("meet(x)")
    C = O.chain(2)
    with pytest.raises(OrderError):
        O.TermAlgebra(C, {"neg": np.array([1, 0])})


@given(seeds, st.integers(1, 4))
def test_preserved_inequations_survive_lifting(seed, n):
    rng = Lcg(seed)
    P = O.random_poset(rng, n)
    op = O.random_monotone_op(rng, P, 2)
    ops = {"*": op, "1": np.array(rng.below(n))}
    if P.is_lattice():
        ops["meet"] = P.meet_table()
    A = O.TermAlgebra(P, ops)
    for lhs, rhs in O.PRESERVED_INEQUATIONS:
        if "meet" in lhs + rhs and "meet" not in ops:
            continue
        r = O.check_inequation_lift(A, lhs, rhs)
        assert r.linearity_ok
        if r.holds_in_A:
            assert r.holds_in_lift


def test_lower_set_cap():
    from qmet.errors import CapExceededError

    with pytest.raises(CapExceededError):
        O.lower_set_lattice(O.antichain(12), cap=100)
