"""Compare the numba and numpy kernel backends on inputs taken from real workloads.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--seed 0]

Each kernel runs once per backend to warm up (numba compiles here), then the
best of ``--repeat`` timings is reported. Outputs of both backends must agree.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from qmet import _accel, kernels
from qmet import metric as M
from qmet import powerspace as PS
from qmet import quantale as QT
from qmet.rng import Lcg


def workloads(rng: Lcg):
    Q = QT.from_spec("product:(chain_plus:3),sigma")
    big = QT.relations(2)
    s4 = M.random_space(rng, QT.from_spec("product:sigma,sigma"), 4)
    s6 = M.random_space(rng, Q, 6)
    raw = np.array([[Q.unit if i == j else rng.below(len(Q)) for j in range(40)] for i in range(40)])
    yield "closure 40x40", "closure", (raw, Q.tensor_table, Q.join_table)
    yield f"assoc_violation |Q|={len(big)}", "assoc_violation", (big.tensor_table,)
    yield f"distrib_violation |Q|={len(big)}", "distrib_violation", (big.tensor_table, big.join_table, big.bottom)
    d = kernels.closure(raw, Q.tensor_table, Q.join_table)
    yield "triangle_violation 40x40", "triangle_violation", (d, Q.tensor_table, Q.leq_matrix)
    yield "robust_open_all n=4", "robust_open_all", (PS._pmask(s4), 1 << s4.n)
    yield "dq_table n=6", "dq_table", (s6.d, Q.join_table, Q.meet_table, Q.bottom, Q.top)
    yield "ds_masks n=6", "ds_masks", (s6.d, Q.down_masks(), np.uint64((1 << len(Q)) - 1))


WRAPPERS = {
    "closure": kernels.closure,
    "assoc_violation": kernels.assoc_violation,
    "distrib_violation": kernels.distrib_violation,
    "triangle_violation": kernels.triangle_violation,
    "robust_open_all": kernels.robust_open_all,
    "dq_table": kernels.dq_table,
    "ds_masks": kernels.ds_masks,
}


def best_of(fn, args, repeat):
    fn(*args)
    best = float("inf")
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t)
    return best, out


def same(a, b) -> bool:
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        return np.array_equal(np.asarray(a), np.asarray(b))
    return a == b


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if not _accel.HAVE_NUMBA:
        print("numba is not installed; nothing to compare")
        return 1
    print(f"{'kernel':34} {'numba':>11} {'numpy':>11} {'speedup':>8}")
    status = 0
    prev = _accel.backend()
    try:
        for label, name, kargs in workloads(Lcg(args.seed)):
            fn = WRAPPERS[name]
            _accel.set_backend("numba")
            t_nb, out_nb = best_of(fn, kargs, args.repeat)
            _accel.set_backend("numpy")
            t_np, out_np = best_of(fn, kargs, args.repeat)
            flag = "" if same(out_nb, out_np) else "  MISMATCH"
            status |= bool(flag)
            print(f"{label:34} {t_nb * 1e3:9.3f}ms {t_np * 1e3:9.3f}ms {t_np / t_nb:7.1f}x{flag}")
    finally:
        _accel.set_backend(prev)
    return status


if __name__ == "__main__":
    raise SystemExit(main())
