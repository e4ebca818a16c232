
import numpy as np
import pytest
from hypothesis import given, strategies as st

from qmet import _accel, kernels
from qmet import metric as M
from qmet import powerspace as PS
from qmet import quantale as QT
from qmet.rng import Lcg

pytestmark = pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="numba not installed")

seeds = st.integers(0, 2**32 - 1)
QS = [QT.from_spec(e) for e in ("sigma", "product:sigma,sigma", "chain_plus:3", "relations:2", "product:(chain_plus:2),sigma")]


def both(name, *args):
    return kernels.impl(name, "numba")(*args), kernels.impl(name, "numpy")(*args)


def same(a, b):
    return np.array_equal(np.asarray(a), np.asarray(b))


@given(seeds, st.integers(0, len(QS) - 1), st.integers(1, 6))
def test_closure_and_triangle_backends_agree(seed, qi, n):
    rng = Lcg(seed)
    q = QS[qi]
    d = np.array([[rng.below(len(q)) for _ in range(n)] for _ in range(n)], dtype=np.int64)
    a, b = both("closure", d, q.tensor_table, q.join_table)
    assert same(a, b)
    a, b = both("triangle_violation", d, q.tensor_table, np.ascontiguousarray(q.leq_matrix))
    assert same(a, b)
    assert kernels.triangle_violation(kernels.closure(d, q.tensor_table, q.join_table), q.tensor_table, q.leq_matrix) is None


@given(seeds, st.integers(0, len(QS) - 1))
def test_law_kernels_agree_on_mutants(seed, qi):
    rng = Lcg(seed)
    q = QS[qi]
    t = q.tensor_table.copy()
    t[rng.below(len(q)), rng.below(len(q))] = rng.below(len(q))
    assert same(*both("assoc_violation", t))
    assert same(*both("distrib_violation", t, np.asarray(q.join_table), q.bottom))


@given(seeds, st.integers(0, len(QS) - 1), st.integers(1, 4))
def test_powerspace_kernels_agree(seed, qi, n):
    q = QS[qi]
    s = M.random_space(Lcg(seed), q, n)
    assert same(*both("dq_table", np.asarray(s.d), np.asarray(q.join_table), np.asarray(q.meet_table), q.bottom, q.top))
    assert same(*both("ds_masks", np.asarray(s.d), q.down_masks(), np.uint64((1 << len(q)) - 1)))
    if n <= 3:
        assert same(*both("robust_open_all", PS._pmask(s), 1 << n))


def test_set_backend_switches_and_restores():
    prev = _accel.set_backend("numpy")
    try:
        assert _accel.backend() == "numpy"
        s = M.x3_fixture()
        r1 = PS.robust_topology_small(M.QMetricSpace(s.points, s.q, s.d))
    finally:
        _accel.set_backend(prev)
    r2 = PS.robust_topology_small(M.QMetricSpace(s.points, s.q, s.d))
    assert r1 == r2
    with pytest.raises(ValueError):
        _accel.set_backend("fortran")


def test_backend_from_environment(monkeypatch):
    monkeypatch.setenv("QMET_BACKEND", "numpy")
    assert _accel._initial_backend() == "numpy"
    monkeypatch.setenv("QMET_BACKEND", "cuda")
    with pytest.raises(ValueError):
        _accel._initial_backend()
