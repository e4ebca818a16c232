"""Hot integer kernels over table quantales.

Every kernel exists twice: a numba ``@njit`` loop (``_nb_*``) and a
pure-numpy formulation (``_np_*``).  The public functions dispatch on
:func:`qmet._accel.backend`.  Elements of a table quantale are int64 indices;
``tensor``, ``join`` and ``meet`` are (n, n) lookup tables and ``leq`` a
boolean matrix.  Subsets of a point set are bitmasks (bit i = point i).
"""

from __future__ import annotations

import numpy as np

from ._accel import backend, njit

# ---------------------------------------------------------------- numba path


@njit
def _nb_closure(d, tensor, join):
    m = d.shape[0]
    out = d.copy()
    changed = True
    while changed:
        changed = False
        for i in range(m):
            for k in range(m):
                dik = out[i, k]
                for j in range(m):
                    v = join[out[i, j], tensor[dik, out[k, j]]]
                    if v != out[i, j]:
                        out[i, j] = v
                        changed = True
    return out


@njit
def _nb_assoc_violation(tensor):
    n = tensor.shape[0]
    res = np.full(3, -1, dtype=np.int64)
    for i in range(n):
        for j in range(n):
            ij = tensor[i, j]
            for k in range(n):
                if tensor[ij, k] != tensor[i, tensor[j, k]]:
                    res[0] = i
                    res[1] = j
                    res[2] = k
                    return res
    return res


@njit
def _nb_distrib_violation(tensor, join, bottom):
    # law codes: 0 x(a+b), 1 (a+b)x, 2 x.bot, 3 bot.x
    n = tensor.shape[0]
    res = np.full(4, -1, dtype=np.int64)
    for x in range(n):
        if tensor[x, bottom] != bottom:
            res[0] = 2
            res[1] = x
            return res
        if tensor[bottom, x] != bottom:
            res[0] = 3
            res[1] = x
            return res
    for x in range(n):
        for a in range(n):
            for b in range(n):
                ab = join[a, b]
                if tensor[x, ab] != join[tensor[x, a], tensor[x, b]]:
                    res[0] = 0
                    res[1] = x
                    res[2] = a
                    res[3] = b
                    return res
                if tensor[ab, x] != join[tensor[a, x], tensor[b, x]]:
                    res[0] = 1
                    res[1] = x
                    res[2] = a
                    res[3] = b
                    return res
    return res


@njit
def _nb_triangle_violation(d, tensor, leq):
    m = d.shape[0]
    res = np.full(3, -1, dtype=np.int64)
    for x in range(m):
        for y in range(m):
            dxy = d[x, y]
            for z in range(m):
                if not leq[tensor[dxy, d[y, z]], d[x, z]]:
                    res[0] = x
                    res[1] = y
                    res[2] = z
                    return res
    return res


@njit
def _nb_robust_open_all(pmask, nsub):
    nfam = 1 << nsub
    nr = pmask.shape[1]
    out = np.zeros(nfam, dtype=np.bool_)
    for u in range(nfam):
        uu = np.uint64(u)
        ok = True
        for a in range(nsub):
            if (u >> a) & 1:
                found = False
                for r in range(nr):
                    if (pmask[a, r] & ~uu) == 0:
                        found = True
                        break
                if not found:
                    ok = False
                    break
        out[u] = ok
    return out


@njit
def _nb_dq_table(d, join, meet, bottom, top):
    n = d.shape[0]
    m = 1 << n
    col = np.empty((m, n), dtype=np.int64)
    for x2 in range(n):
        col[0, x2] = bottom
    for a in range(1, m):
        low = a & (-a)
        i = 0
        while (1 << i) != low:
            i += 1
        rest = a ^ low
        for x2 in range(n):
            col[a, x2] = join[col[rest, x2], d[i, x2]]
    out = np.empty((m, m), dtype=np.int64)
    for a1 in range(m):
        out[a1, 0] = top
        for a2 in range(1, m):
            low = a2 & (-a2)
            i = 0
            while (1 << i) != low:
                i += 1
            out[a1, a2] = meet[out[a1, a2 ^ low], col[a1, i]]
    return out


@njit
def _nb_ds_masks(d, down, full):
    n = d.shape[0]
    m = 1 << n
    col = np.empty((m, n), dtype=np.uint64)
    for x2 in range(n):
        col[0, x2] = 0
    for a in range(1, m):
        low = a & (-a)
        i = 0
        while (1 << i) != low:
            i += 1
        rest = a ^ low
        for x2 in range(n):
            col[a, x2] = col[rest, x2] | down[d[i, x2]]
    out = np.empty((m, m), dtype=np.uint64)
    for a1 in range(m):
        out[a1, 0] = full
        for a2 in range(1, m):
            low = a2 & (-a2)
            i = 0
            while (1 << i) != low:
                i += 1
            out[a1, a2] = out[a1, a2 ^ low] & col[a1, i]
    return out


# ---------------------------------------------------------------- numpy path


def _np_closure(d, tensor, join):
    out = d.copy()
    while True:
        before = out.copy()
        for k in range(out.shape[0]):
            cand = tensor[out[:, k][:, None], out[k, :][None, :]]
            out = join[out, cand]
        if np.array_equal(before, out):
            return out


def _first(idx):
    hits = np.argwhere(idx)
    return hits[0] if len(hits) else None


def _np_assoc_violation(tensor):
    n = tensor.shape[0]
    ar = np.arange(n)
    lhs = tensor[tensor]  # [i,j,k] -> (i*j)*k
    rhs = tensor[ar[:, None, None], tensor[None, :, :]]  # i*(j*k)
    hit = _first(lhs != rhs)
    return np.array([-1, -1, -1] if hit is None else hit, dtype=np.int64)


def _np_distrib_violation(tensor, join, bottom):
    n = tensor.shape[0]
    ar = np.arange(n)
    bad = np.nonzero(tensor[:, bottom] != bottom)[0]
    if len(bad):
        return np.array([2, bad[0], -1, -1], dtype=np.int64)
    bad = np.nonzero(tensor[bottom, :] != bottom)[0]
    if len(bad):
        return np.array([3, bad[0], -1, -1], dtype=np.int64)
    # [x, a, b]
    left = tensor[ar[:, None, None], join[None, :, :]]
    left_r = join[tensor[:, :, None], tensor[:, None, :]]
    right = tensor[join[None, :, :], ar[:, None, None]]
    tt = tensor.T
    right_r = join[tt[:, :, None], tt[:, None, :]]
    lbad = left != left_r
    rbad = right != right_r
    # report in the same (x, a, b, law) order as the loop version
    both = np.stack([lbad, rbad], axis=-1)
    hit = _first(both)
    if hit is None:
        return np.array([-1, -1, -1, -1], dtype=np.int64)
    x, a, b, law = hit
    return np.array([law, x, a, b], dtype=np.int64)


def _np_triangle_violation(d, tensor, leq):
    lhs = tensor[d[:, :, None], d[None, :, :]]  # [x,y,z]
    ok = leq[lhs, d[:, None, :]]
    hit = _first(~ok)
    return np.array([-1, -1, -1] if hit is None else hit, dtype=np.int64)


def _np_robust_open_all(pmask, nsub):
    fam = np.arange(1 << nsub, dtype=np.uint64)
    ok = np.ones(fam.shape, dtype=bool)
    nfam = ~fam
    for a in range(nsub):
        in_a = ((fam >> np.uint64(a)) & np.uint64(1)).astype(bool)
        some = np.zeros(fam.shape, dtype=bool)
        for r in range(pmask.shape[1]):
            some |= (pmask[a, r] & nfam) == 0
        ok &= ~in_a | some
    return ok


def _lowbit_index(m):
    a = np.arange(1, m)
    low = a & -a
    return a, a ^ low, np.log2(low).astype(np.int64)


def _np_dq_table(d, join, meet, bottom, top):
    n = d.shape[0]
    m = 1 << n
    col = np.empty((m, n), dtype=np.int64)
    col[0] = bottom
    for a, rest, i in zip(*_lowbit_index(m)):
        col[a] = join[col[rest], d[i]]
    out = np.empty((m, m), dtype=np.int64)
    out[:, 0] = top
    for a2, rest, i in zip(*_lowbit_index(m)):
        out[:, a2] = meet[out[:, rest], col[:, i]]
    return out


def _np_ds_masks(d, down, full):
    n = d.shape[0]
    m = 1 << n
    col = np.zeros((m, n), dtype=np.uint64)
    for a, rest, i in zip(*_lowbit_index(m)):
        col[a] = col[rest] | down[d[i]]
    out = np.empty((m, m), dtype=np.uint64)
    out[:, 0] = full
    for a2, rest, i in zip(*_lowbit_index(m)):
        out[:, a2] = out[:, rest] & col[:, i]
    return out


# ---------------------------------------------------------------- dispatch

_PAIRS = {
    "closure": (_nb_closure, _np_closure),
    "assoc_violation": (_nb_assoc_violation, _np_assoc_violation),
    "distrib_violation": (_nb_distrib_violation, _np_distrib_violation),
    "triangle_violation": (_nb_triangle_violation, _np_triangle_violation),
    "robust_open_all": (_nb_robust_open_all, _np_robust_open_all),
    "dq_table": (_nb_dq_table, _np_dq_table),
    "ds_masks": (_nb_ds_masks, _np_ds_masks),
}


def impl(name: str, which: str | None = None):
    nb, npy = _PAIRS[name]
    return nb if (which or backend()) == "numba" else npy


def _i64(a):
    return np.ascontiguousarray(a, dtype=np.int64)


def closure(d, tensor, join):
    """Least ``d' >= d`` with ``d'[i,k] (x) d'[k,j] <= d'[i,j]`` (joins only grow)."""
    return impl("closure")(_i64(d), _i64(tensor), _i64(join))


def assoc_violation(tensor):
    r = impl("assoc_violation")(_i64(tensor))
    return None if r[0] < 0 else tuple(int(v) for v in r)


def distrib_violation(tensor, join, bottom):
    r = impl("distrib_violation")(_i64(tensor), _i64(join), int(bottom))
    return None if r[0] < 0 else tuple(int(v) for v in r)


def triangle_violation(d, tensor, leq):
    r = impl("triangle_violation")(_i64(d), _i64(tensor), np.ascontiguousarray(leq, dtype=np.bool_))
    return None if r[0] < 0 else tuple(int(v) for v in r)


def robust_open_all(pmask, nsub):
    return impl("robust_open_all")(np.ascontiguousarray(pmask, dtype=np.uint64), int(nsub))


def dq_table(d, join, meet, bottom, top):
    return impl("dq_table")(_i64(d), _i64(join), _i64(meet), int(bottom), int(top))


def ds_masks(d, down, full):
    return impl("ds_masks")(_i64(d), np.ascontiguousarray(down, dtype=np.uint64), np.uint64(full))
