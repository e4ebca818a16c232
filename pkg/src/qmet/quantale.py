"""Quantales: finite tables, the exact-rational half-line family and constructors.

Table quantales address elements by index; the rational family uses
:class:`fractions.Fraction` plus the :data:`INF` sentinel.  All quantales
share the :class:`Quantale` interface so metric code can be written once.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, total_ordering
from typing import Callable, Iterable, Sequence

import numpy as np

from . import kernels
from .errors import CapExceededError, HypothesisViolation, OrderError, UnknownSymbolError
from .order import DEFAULT_CAP, FinPoset, LowerSetLattice, bits, chain, lower_set_lattice, popcount


class Quantale:
    """Complete lattice with an associative tensor distributing over joins."""

    name = "quantale"
    enumerable = False

    # lattice
    def leq(self, x, y) -> bool:
        raise NotImplementedError

    def join(self, x, y):
        raise NotImplementedError

    def meet(self, x, y):
        raise NotImplementedError

    def tensor(self, x, y):
        raise NotImplementedError

    unit = bottom = top = None

    def finite_join(self, S: Iterable):
        out = self.bottom
        for s in S:
            out = self.join(out, s)
        return out

    def finite_meet(self, S: Iterable):
        out = self.top
        for s in S:
            out = self.meet(out, s)
        return out

    def lt(self, x, y) -> bool:
        return self.leq(x, y) and x != y

    def way_below(self, x, y) -> bool:
        raise NotImplementedError

    def totally_below(self, x, y) -> bool:
        raise NotImplementedError

    def residual(self, x, z, side: str = "left"):
        raise NotImplementedError

    def radius_candidates(self, values: Iterable = ()) -> tuple:
        """Finitely many radii ``δ << 1`` sufficient for δ-monotone predicates.

        ``values`` are the quantale values the predicate compares against.
        """
        raise NotImplementedError

    def label(self, x) -> str:
        return str(x)

    def parse(self, text: str):
        raise NotImplementedError

    # flags
    @property
    def is_trivial(self) -> bool:
        return self.bottom == self.unit

    @property
    def is_affine(self) -> bool:
        return self.unit == self.top

    is_linear = is_commutative = is_locale = False

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"


# ---------------------------------------------------------------- tables


class TableQuantale(Quantale):
    """A finite quantale given by an order and a tensor table over indices."""

    enumerable = True

    def __init__(self, poset: FinPoset, tensor, unit: int, name: str = "table", join=None, meet=None, claims=None):
        self.poset = poset
        self.name = name
        self.tensor_table = np.ascontiguousarray(tensor, dtype=np.int64)
        self.tensor_table.setflags(write=False)
        self.unit = int(unit)
        poset.require_lattice()
        self.join_table = np.ascontiguousarray(poset.join_table() if join is None else join, dtype=np.int64)
        self.meet_table = np.ascontiguousarray(poset.meet_table() if meet is None else meet, dtype=np.int64)
        for t in (self.join_table, self.meet_table):
            t.setflags(write=False)
        self.leq_matrix = poset.leq_matrix
        self.bottom = int(poset.bottom)
        self.top = int(poset.top)
        self.claims = dict(claims or {})
        self._labels = [str(e) for e in poset.elements]
        self._by_label = {s: i for i, s in enumerate(self._labels)}
        self.extra = {}

    def __len__(self):
        return len(self.poset)

    def elements(self) -> range:
        return range(len(self.poset))

    def leq(self, x, y):
        return bool(self.leq_matrix[x, y])

    def join(self, x, y):
        return int(self.join_table[x, y])

    def meet(self, x, y):
        return int(self.meet_table[x, y])

    def tensor(self, x, y):
        return int(self.tensor_table[x, y])

    def way_below(self, x, y):
        return self.leq(x, y)

    def totally_below(self, x, y):
        rest = self.poset.full & ~self.poset.up[x]
        return not self.leq(y, self.finite_join(bits(rest)))

    def residual(self, x, z, side="left"):
        t = self.tensor_table
        if side == "left":
            ok = self.leq_matrix[t[x, :], z]
        elif side == "right":
            ok = self.leq_matrix[t[:, x], z]
        else:
            raise ValueError(side)
        return self.finite_join(int(y) for y in np.nonzero(ok)[0])

    def radius_candidates(self, values=()):
        # on a finite lattice 1 << 1, and every ball predicate shrinks with δ
        return (self.unit,)

    def way_below_unit(self) -> list[int]:
        return [x for x in self.elements() if self.way_below(x, self.unit)]

    def label(self, x):
        return self._labels[x]

    def parse(self, text):
        try:
            return self._by_label[str(text).strip()]
        except KeyError:
            raise UnknownSymbolError(f"{text!r} is not an element of {self.name}") from None

    @cached_property
    def is_commutative(self):
        return bool(np.array_equal(self.tensor_table, self.tensor_table.T))

    @cached_property
    def is_locale(self):
        return bool(np.array_equal(self.tensor_table, self.meet_table))

    @cached_property
    def is_linear(self):
        return self.poset.is_chain()

    def down_masks(self) -> np.ndarray:
        return np.array(self.poset.down, dtype=np.uint64) if len(self) <= 64 else None


@dataclass
class QuantaleReport:
    passed: bool
    violations: list = field(default_factory=list)
    trusted: bool = False
    flags: dict = field(default_factory=dict)


_DIST_LAWS = {0: "left distributivity", 1: "right distributivity", 2: "x*bot = bot", 3: "bot*x = bot"}


def verify_quantale(Q: Quantale) -> QuantaleReport:
    """Check lattice, monoid, distributivity laws and flag claims.

    Arbitrary joins reduce to binary joins plus the empty join on a finite
    carrier, so distributivity is checked on those only.
    """
    if not isinstance(Q, TableQuantale):
        return _verify_rational(Q)
    v = []
    P = Q.poset
    n = len(Q)
    if not P.is_lattice():
        v.append(("complete lattice", None))
        return QuantaleReport(False, v)
    jt, mt = P.join_table(), P.meet_table()
    if not np.array_equal(jt, Q.join_table):
        v.append(("join table", tuple(int(i) for i in np.argwhere(jt != Q.join_table)[0])))
    if not np.array_equal(mt, Q.meet_table):
        v.append(("meet table", tuple(int(i) for i in np.argwhere(mt != Q.meet_table)[0])))
    t = Q.tensor_table
    if t.shape != (n, n) or t.min() < 0 or t.max() >= n:
        v.append(("tensor closed", None))
        return QuantaleReport(False, v)
    a = kernels.assoc_violation(t)
    if a:
        v.append(("associativity", a))
    u = Q.unit
    for x in range(n):
        if t[u, x] != x:
            v.append(("left unit", (x,)))
            break
    for x in range(n):
        if t[x, u] != x:
            v.append(("right unit", (x,)))
            break
    d = kernels.distrib_violation(t, Q.join_table, Q.bottom)
    if d:
        law, x, aa, b = d
        v.append((_DIST_LAWS[law], (x,) if law >= 2 else (x, aa, b)))
    flags = {
        "is_linear": Q.is_linear,
        "is_trivial": Q.is_trivial,
        "is_affine": Q.is_affine,
        "is_commutative": Q.is_commutative,
        "is_locale": Q.is_locale,
    }
    for k, claimed in Q.claims.items():
        if flags.get(k) != claimed:
            v.append((f"flag {k}", (claimed, flags.get(k))))
    return QuantaleReport(not v, v, False, flags)


def quantale_oracle_ok(Q: TableQuantale) -> bool:
    """Slow independent check: every subset join, every triple."""
    P = Q.poset
    if not P.is_lattice():
        return False
    n = len(Q)
    t = Q.tensor_table
    for x, y, z in itertools.product(range(n), repeat=3):
        if t[t[x, y], z] != t[x, t[y, z]]:
            return False
    if any(t[Q.unit, x] != x or t[x, Q.unit] != x for x in range(n)):
        return False
    for S in range(1 << n):
        js = P.join(bits(S))
        for x in range(n):
            if t[x, js] != P.join(int(t[x, s]) for s in bits(S)):
                return False
            if t[js, x] != P.join(int(t[s, x]) for s in bits(S)):
                return False
    return True


# ---------------------------------------------------------------- constructors on tables


def _chain_quantale(n: int, op, name: str) -> TableQuantale:
    # carrier {0..n}: numeric n is bottom, 0 is top
    labels = [str(i) for i in range(n + 1)]
    leq = np.array([[i >= j for j in range(n + 1)] for i in range(n + 1)], dtype=bool)
    P = FinPoset(labels, leq)
    t = np.array([[op(i, j) for j in range(n + 1)] for i in range(n + 1)], dtype=np.int64)
    idx = np.arange(n + 1)
    return TableQuantale(P, t, 0, name, join=np.minimum.outer(idx, idx), meet=np.maximum.outer(idx, idx))


def sigma() -> TableQuantale:
    """Two-element locale ``{bot, top}``."""
    P = chain(2, ["bot", "top"])
    return TableQuantale(P, [[0, 0], [0, 1]], 1, "sigma", claims={"is_locale": True, "is_affine": True})


def trivial() -> TableQuantale:
    return TableQuantale(FinPoset(["*"], [[True]]), [[0]], 0, "trivial")


def chain_plus(n: int) -> TableQuantale:
    """Truncated natural numbers with capped addition (``n`` plays infinity)."""
    if n < 1:
        raise ValueError("chain_plus needs n >= 1")
    return _chain_quantale(n, lambda i, j: min(i + j, n), f"chain_plus:{n}")


def chain_max(n: int) -> TableQuantale:
    """Truncated naturals with tensor = numeric max (a locale)."""
    if n < 1:
        raise ValueError("chain_max needs n >= 1")
    return _chain_quantale(n, max, f"chain_max:{n}")


def relations(k: int, cap: int = 1 << 9) -> TableQuantale:
    """Binary relations on ``k`` points under composition."""
    m = k * k
    size = 1 << m
    if size > cap:
        raise CapExceededError("relations carrier", cap, size)

    def pair_bit(a, b):
        return 1 << (a * k + b)

    def compose(r, s):
        out = 0
        for a, b in itertools.product(range(k), repeat=2):
            if r & pair_bit(a, b):
                for c in range(k):
                    if s & pair_bit(b, c):
                        out |= pair_bit(a, c)
        return out

    def lab(r):
        return "{" + ",".join(f"{a}{b}" for a in range(k) for b in range(k) if r & pair_bit(a, b)) + "}"

    idx = np.arange(size)
    leq = (idx[:, None] & ~idx[None, :]) == 0
    P = FinPoset([lab(r) for r in range(size)], leq, check=False)
    t = np.array([[compose(r, s) for s in range(size)] for r in range(size)], dtype=np.int64)
    unit = sum(pair_bit(a, a) for a in range(k))
    return TableQuantale(P, t, unit, f"relations:{k}", join=idx[:, None] | idx[None, :], meet=idx[:, None] & idx[None, :])


def _cap_check(what, size, cap):
    if size > cap:
        raise CapExceededError(what, cap, size)


def product(*qs: TableQuantale, cap: int = DEFAULT_CAP) -> TableQuantale:
    """Pointwise product; elements are index tuples in row-major order."""
    if not qs:
        return trivial()
    sizes = [len(q) for q in qs]
    total = int(np.prod(sizes))
    _cap_check("product carrier", total, cap)
    tuples = list(itertools.product(*(range(s) for s in sizes)))
    enc = {t: i for i, t in enumerate(tuples)}
    labels = ["(" + ",".join(q.label(x) for q, x in zip(qs, t)) + ")" for t in tuples]
    T = np.array(tuples, dtype=np.int64).reshape(total, len(qs))
    leq = np.ones((total, total), dtype=bool)
    for j, q in enumerate(qs):
        leq &= q.leq_matrix[T[:, j][:, None], T[:, j][None, :]]
    strides = np.array([int(np.prod(sizes[j + 1 :])) for j in range(len(qs))], dtype=np.int64)

    def combine(tab_of):
        out = np.zeros((total, total), dtype=np.int64)
        for j, q in enumerate(qs):
            out += tab_of(q)[T[:, j][:, None], T[:, j][None, :]] * strides[j]
        return out

    P = FinPoset(labels, leq, check=False)
    unit = enc[tuple(q.unit for q in qs)]
    name = "product:" + ",".join(_wrap(q.name) for q in qs)
    Q = TableQuantale(
        P,
        combine(lambda q: q.tensor_table),
        unit,
        name,
        join=combine(lambda q: q.join_table),
        meet=combine(lambda q: q.meet_table),
    )
    Q.extra["factors"] = qs
    Q.extra["tuples"] = tuples
    return Q


def projection(Q: TableQuantale, j: int) -> "QuantaleMorphism":
    qs, tuples = Q.extra["factors"], Q.extra["tuples"]
    return QuantaleMorphism(Q, qs[j], [t[j] for t in tuples], "strict_monoidal", name=f"pi{j}")


def _wrap(name: str) -> str:
    return f"({name})" if ":" in name else name


def sub_quantale(Q: TableQuantale, keep: Sequence[int], name: str) -> TableQuantale:
    keep = sorted(keep)
    pos = {x: i for i, x in enumerate(keep)}
    sub = np.ix_(keep, keep)
    P = FinPoset([Q.poset.elements[x] for x in keep], Q.leq_matrix[sub], check=False)
    remap = np.vectorize(lambda x: pos[int(x)], otypes=[np.int64])

    def tab(t):
        return remap(t[sub]) if keep else np.zeros((0, 0), np.int64)

    R = TableQuantale(P, tab(Q.tensor_table), pos[Q.unit], name, join=tab(Q.join_table), meet=tab(Q.meet_table))
    R.extra["embedding"] = keep
    return R


def affine_part(Q: TableQuantale) -> TableQuantale:
    """Elements below the unit; the unit becomes top."""
    keep = [x for x in Q.elements() if Q.leq(x, Q.unit)]
    return sub_quantale(Q, keep, f"affine_part:{_wrap(Q.name)}")


def monotone_maps(P: FinPoset, Q: TableQuantale, cap: int = DEFAULT_CAP) -> list[tuple]:
    """All monotone maps ``P -> Q`` as value tuples, in lexicographic order."""
    order = P.linear_extension()
    n = len(P)
    preds = {p: [r for r in range(n) if r != p and P.leq(r, p)] for p in range(n)}
    out = []
    vals = [None] * n

    def rec(k):
        if k == n:
            out.append(tuple(vals))
            if len(out) > cap:
                raise CapExceededError("monotone maps", cap)
            return
        p = order[k]
        for v in Q.elements():
            if all(Q.leq(vals[r], v) for r in preds[p]):
                vals[p] = v
                rec(k + 1)
        vals[p] = None

    rec(0)
    return sorted(out)


def _hom_quantale(P, Q, maps, tensor_fn, unit_vec, name):
    enc = {m: i for i, m in enumerate(maps)}
    M = np.array(maps, dtype=np.int64).reshape(len(maps), len(P))
    leq = np.all(Q.leq_matrix[M[:, None, :], M[None, :, :]], axis=2)
    labels = ["[" + ",".join(Q.label(v) for v in m) + "]" for m in maps]
    H = FinPoset(labels, leq, check=False)

    def pw(tab):
        out = np.empty((len(maps), len(maps)), dtype=np.int64)
        for i, f in enumerate(M):
            rows = tab[f[None, :], M]
            for j, r in enumerate(rows):
                out[i, j] = enc[tuple(int(v) for v in r)]
        return out

    t = np.empty((len(maps), len(maps)), dtype=np.int64)
    for i, f in enumerate(maps):
        for j, g in enumerate(maps):
            t[i, j] = enc[tensor_fn(f, g)]
    R = TableQuantale(H, t, enc[tuple(unit_vec)], name, join=pw(Q.join_table), meet=pw(Q.meet_table))
    R.extra["maps"] = maps
    R.extra["domain"] = P
    R.extra["codomain"] = Q
    return R


def pointwise_hom(P: FinPoset, Q: TableQuantale, cap: int = DEFAULT_CAP) -> TableQuantale:
    """Monotone maps ``P -> Q`` with the pointwise order and tensor."""
    maps = monotone_maps(P, Q, cap)

    def tens(f, g):
        return tuple(Q.tensor(a, b) for a, b in zip(f, g))

    return _hom_quantale(P, Q, maps, tens, [Q.unit] * len(P), f"pointwise_hom:{len(P)},{_wrap(Q.name)}")


@dataclass
class OrderedMonoid:
    """A poset with a monotone associative operation and a unit."""

    poset: FinPoset
    op: np.ndarray
    unit: int
    name: str = "monoid"

    def __post_init__(self):
        self.op = np.asarray(self.op, dtype=np.int64)
        P, t, n = self.poset, self.op, len(self.poset)
        if kernels.assoc_violation(t):
            raise HypothesisViolation("operation is not associative")
        if any(t[self.unit, x] != x or t[x, self.unit] != x for x in range(n)):
            raise HypothesisViolation("unit law fails")
        m = P.leq_matrix
        if not all(
            m[t[a, c], t[b, c]] and m[t[c, a], t[c, b]] for a in range(n) for b in range(n) if m[a, b] for c in range(n)
        ):
            raise HypothesisViolation("operation is not monotone")

    @classmethod
    def of(cls, Q: TableQuantale) -> "OrderedMonoid":
        return cls(Q.poset, Q.tensor_table, Q.unit, Q.name)

    @property
    def is_commutative(self):
        return bool(np.array_equal(self.op, self.op.T))


def day_convolution(P: OrderedMonoid, Q: TableQuantale, cap: int = DEFAULT_CAP) -> TableQuantale:
    """Monotone maps ``P -> Q`` with Day convolution as tensor."""
    if isinstance(P, TableQuantale):
        P = OrderedMonoid.of(P)
    if not P.is_commutative:
        raise HypothesisViolation("day_convolution needs a commutative ordered monoid")
    if not Q.is_commutative:
        raise HypothesisViolation("day_convolution needs a commutative quantale")
    maps = monotone_maps(P.poset, Q, cap)
    n = len(P.poset)
    m = P.poset.leq_matrix
    below = [[(a, b) for a in range(n) for b in range(n) if m[P.op[a, b], x]] for x in range(n)]

    def conv(f, g):
        return tuple(Q.finite_join(Q.tensor(f[a], g[b]) for a, b in below[x]) for x in range(n))

    eps = [Q.unit if m[P.unit, x] else Q.bottom for x in range(n)]
    R = _hom_quantale(P.poset, Q, maps, conv, eps, f"day:{_wrap(P.name)},{_wrap(Q.name)}")
    R.extra["monoid"] = P
    return R


def day_star_conditions(P: OrderedMonoid) -> dict:
    """Whether the prime-continuity side conditions of Day convolution hold on ``P``.

    ``star``: totally-below is preserved by the operation; ``star2``: every
    ``x <<< y`` can be fattened by elements totally above the unit.
    Only meaningful when ``P`` is a complete lattice.
    """
    L = P.poset
    L.require_lattice()
    n = len(L)
    full = L.full

    def tb(x, y):
        return not L.leq(y, L.join(bits(full & ~L.up[x])))

    star = all(
        tb(P.op[x1, x2], P.op[y1, y2])
        for x1, y1, x2, y2 in itertools.product(range(n), repeat=4)
        if tb(x1, y1) and tb(x2, y2)
    )
    above_unit = [z for z in range(n) if tb(P.unit, z)]
    star2 = all(
        any(tb(P.op[a, x], y) for a in above_unit) and any(tb(P.op[x, b], y) for b in above_unit)
        for x in range(n)
        for y in range(n)
        if tb(x, y)
    )
    return {"star": star, "star2": star2}


def free_quantale(P: OrderedMonoid, cap: int = DEFAULT_CAP) -> TableQuantale:
    """Lower sets of an ordered monoid with the lifted operation."""
    if isinstance(P, TableQuantale):
        P = OrderedMonoid.of(P)
    D = lower_set_lattice(P.poset, cap)
    k = len(D)
    masks = D.masks
    down = P.poset.down
    op = P.op
    t = np.empty((k, k), dtype=np.int64)
    for i, a in enumerate(masks):
        la = list(bits(a))
        for j, b in enumerate(masks):
            out = 0
            for x in la:
                for y in bits(b):
                    out |= down[op[x, y]]
            t[i, j] = D.of_mask(out)
    jt = np.array([[D.of_mask(a | b) for b in masks] for a in masks], dtype=np.int64)
    mt = np.array([[D.of_mask(a & b) for b in masks] for a in masks], dtype=np.int64)
    Q = TableQuantale(D.poset, t, D.eta(P.unit), f"free:{_wrap(P.name)}", join=jt, meet=mt)
    Q.extra["lower_sets"] = D
    Q.extra["monoid"] = P
    return Q


# ---------------------------------------------------------------- rationals


@total_ordering
class _Inf:
    """Positive infinity for exact rationals."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("qmet-inf")

    def __lt__(self, other):
        return False

    def __gt__(self, other):
        return other is not self

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __repr__(self):
        return "inf"

    __str__ = __repr__

    def __reduce__(self):
        return (_Inf, ())


INF = _Inf()


def as_value(v):
    if v is INF or isinstance(v, _Inf):
        return INF
    if isinstance(v, float):
        raise TypeError("floats are not accepted; use Fraction or a string")
    if isinstance(v, str):
        s = v.strip()
        if s in ("inf", "oo", "infinity"):
            return INF
        return Fraction(s)
    f = Fraction(v)
    if f < 0:
        raise ValueError(f"negative distance {f}")
    return f


class RationalQuantale(Quantale):
    """Exact rationals in ``[0, inf]`` ordered by reverse numeric order.

    ``kind='plus'`` uses addition as tensor, ``kind='max'`` uses max (a locale).
    Bottom is ``inf``, unit and top are ``0``.
    """

    is_linear = True
    is_commutative = True

    def __init__(self, kind: str):
        if kind not in ("plus", "max"):
            raise ValueError(kind)
        self.kind = kind
        self.name = "rplus" if kind == "plus" else "rmax"
        self.unit = Fraction(0)
        self.top = Fraction(0)
        self.bottom = INF

    @property
    def is_locale(self):
        return self.kind == "max"

    def __eq__(self, other):
        return isinstance(other, RationalQuantale) and other.kind == self.kind

    def __hash__(self):
        return hash(("rational", self.kind))

    def leq(self, x, y):
        return x >= y

    def join(self, x, y):
        return x if x <= y else y

    def meet(self, x, y):
        return x if x >= y else y

    def tensor(self, x, y):
        if self.kind == "plus":
            return x + y if (x is not INF and y is not INF) else INF
        return self.meet(x, y)

    def way_below(self, x, y):
        return x is INF or x > y

    def totally_below(self, x, y):
        return x > y

    def residual(self, x, z, side="left"):
        if side not in ("left", "right"):
            raise ValueError(side)
        if self.kind == "max":
            return z if x < z else Fraction(0)
        if x is INF:
            return Fraction(0)
        if z is INF:
            return INF
        return max(z - x, Fraction(0))

    def radius_candidates(self, values=()):
        pos = sorted({as_value(v) for v in values if v is not INF and v > 0})
        if not pos:
            return (Fraction(1), INF)
        out = [pos[0] / 2]
        out += [(a + b) / 2 for a, b in zip(pos, pos[1:])]
        out += [pos[-1] + 1, INF]
        return tuple(out)

    def parse(self, text):
        try:
            return as_value(text)
        except (ValueError, ZeroDivisionError):
            raise UnknownSymbolError(f"{text!r} is not a value of {self.name}") from None

    def label(self, x):
        return str(x)

    def sample(self, rng=None, count: int = 0) -> list:
        """A fixed grid of values, plus ``count`` random ones from ``rng``."""
        base = [Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2), Fraction(7, 3), INF]
        extra = [rng.fraction() for _ in range(count)] if rng else []
        return base + extra


def rational_rplus() -> RationalQuantale:
    return RationalQuantale("plus")


def rational_rmax() -> RationalQuantale:
    return RationalQuantale("max")


def _verify_rational(Q) -> QuantaleReport:
    """Laws hold by construction; a sampled exact check guards the encoding."""
    v = []
    vals = Q.sample() if hasattr(Q, "sample") else []
    for x, y, z in itertools.product(vals, repeat=3):
        if Q.tensor(Q.tensor(x, y), z) != Q.tensor(x, Q.tensor(y, z)):
            v.append(("associativity", (x, y, z)))
        if Q.tensor(x, Q.join(y, z)) != Q.join(Q.tensor(x, y), Q.tensor(x, z)):
            v.append(("left distributivity", (x, y, z)))
        if Q.tensor(Q.join(y, z), x) != Q.join(Q.tensor(y, x), Q.tensor(z, x)):
            v.append(("right distributivity", (x, y, z)))
    for x in vals:
        if Q.tensor(Q.unit, x) != x or Q.tensor(x, Q.unit) != x:
            v.append(("unit", (x,)))
        if Q.tensor(x, Q.bottom) != Q.bottom or Q.tensor(Q.bottom, x) != Q.bottom:
            v.append(("x*bot = bot", (x,)))
    flags = {
        "is_linear": Q.is_linear,
        "is_trivial": Q.is_trivial,
        "is_affine": Q.is_affine,
        "is_commutative": Q.is_commutative,
        "is_locale": Q.is_locale,
    }
    return QuantaleReport(not v, v, True, flags)


@total_ordering
class _Empty:
    """The empty lower set, bottom of a lifted linear quantale."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("qmet-empty")

    def __lt__(self, other):
        return other is not self

    def __repr__(self):
        return "empty"

    __str__ = __repr__

    def __reduce__(self):
        return (_Empty, ())


EMPTY = _Empty()


class LiftedLinear(Quantale):
    """``Q_bot`` for a linear quantale ``Q``: lower sets ``down q`` plus the empty set.

    A non-empty lower set of a linear complete lattice that is Scott closed
    is principal, so elements are either :data:`EMPTY` or a base value ``q``
    standing for ``down q``.
    """

    def __init__(self, base: Quantale):
        if not base.is_linear:
            raise HypothesisViolation("Q_bot representation needs a linear quantale")
        self.base = base
        self.name = f"scott_closed:{_wrap(base.name)}"
        self.unit = base.unit
        self.top = base.top
        self.bottom = EMPTY
        self.is_commutative = base.is_commutative
        self.enumerable = base.enumerable

    is_linear = True

    @property
    def is_locale(self):
        return self.base.is_locale

    def __eq__(self, other):
        return isinstance(other, LiftedLinear) and other.base == self.base

    def __hash__(self):
        return hash(("lifted", self.base))

    def leq(self, x, y):
        if x is EMPTY:
            return True
        if y is EMPTY:
            return False
        return self.base.leq(x, y)

    def join(self, x, y):
        return x if self.leq(y, x) else y

    def meet(self, x, y):
        return x if self.leq(x, y) else y

    def tensor(self, x, y):
        if x is EMPTY or y is EMPTY:
            return EMPTY
        return self.base.tensor(x, y)

    def way_below(self, x, y):
        if x is EMPTY:
            return True
        if y is EMPTY:
            return False
        return self.base.way_below(x, y)

    def totally_below(self, x, y):
        if y is EMPTY:
            return False
        if x is EMPTY:
            return True
        return self.base.totally_below(x, y)

    def residual(self, x, z, side="left"):
        if x is EMPTY:
            return self.top
        if z is EMPTY:
            return EMPTY
        return self.base.residual(x, z, side)

    def radius_candidates(self, values=()):
        return self.base.radius_candidates(v for v in values if v is not EMPTY)

    def eta(self, q):
        return q

    def label(self, x):
        return "empty" if x is EMPTY else self.base.label(x)

    def parse(self, text):
        if str(text).strip() == "empty":
            return EMPTY
        return self.base.parse(text)

    def sample(self, rng=None, count=0):
        return [EMPTY, *self.base.sample(rng, count)]


# ---------------------------------------------------------------- Scott-closed sets


def scott_closed_quantale(Q: Quantale, cap: int = DEFAULT_CAP):
    """Quantale of Scott-closed (on finite carriers: lower) subsets of ``Q``.

    Tables give a table quantale whose ``extra['lower_sets']`` maps indices
    to masks over ``Q``; linear non-table quantales use the ``Q_bot`` form.
    """
    if isinstance(Q, TableQuantale):
        C = Q.extra.get("scott_closed")
        if C is None:
            C = free_quantale(OrderedMonoid.of(Q), cap)
            C.name = f"scott_closed:{_wrap(Q.name)}"
            C.extra["base"] = Q
            Q.extra["scott_closed"] = C
        return C
    if Q.is_linear:
        return LiftedLinear(Q)
    raise HypothesisViolation("Scott-closed sets are only provided for tables and linear quantales")


def eta_C(C, q):
    """``q -> down q`` into the Scott-closed-set quantale ``C``."""
    if isinstance(C, LiftedLinear):
        return q
    return C.extra["lower_sets"].eta(q)


def lowerset_mask(C: TableQuantale, A: int) -> int:
    return C.extra["lower_sets"].masks[A]


def kleisli_C(C: TableQuantale, C2: TableQuantale, g: Sequence[int]) -> list[int]:
    """Extend ``g: Q -> C(Q')`` (indices) to ``C(Q) -> C(Q')`` by unions."""
    Q = C.extra["base"]
    for x in Q.elements():
        for y in Q.elements():
            if Q.leq(x, y) and not C2.leq(g[x], g[y]):
                raise OrderError(f"g is not monotone at {Q.label(x)} <= {Q.label(y)}")
    D2 = C2.extra["lower_sets"]
    out = []
    for A in C.extra["lower_sets"].masks:
        m = 0
        for q in bits(A):
            m |= D2.masks[g[q]]
        out.append(D2.of_mask(m))
    return out


# ---------------------------------------------------------------- morphisms

KINDS = ("monotone", "scott_continuous", "lax_unital", "lax_monoidal", "strict_monoidal", "join_preserving")


class QuantaleMorphism:
    """A map between quantales; ``mapping`` is a list over table indices or a callable."""

    def __init__(self, source: Quantale, target: Quantale, mapping, claimed_kind: str = "monotone", name: str = "h"):
        if claimed_kind not in KINDS:
            raise ValueError(claimed_kind)
        self.source = source
        self.target = target
        self.mapping = mapping
        self.claimed_kind = claimed_kind
        self.name = name

    def __call__(self, x):
        if callable(self.mapping):
            return self.mapping(x)
        return self.mapping[x]

    def graph(self) -> list:
        """Explicit ``(label, label)`` pairs (table sources only)."""
        return [(self.source.label(x), self.target.label(self(x))) for x in self.source.elements()]


@dataclass
class MorphismReport:
    checks: dict
    witnesses: dict
    basis: str
    claimed_kind: str

    @property
    def passed(self) -> bool:
        return self.checks[self.claimed_kind]


def verify_morphism(m: QuantaleMorphism, samples: Sequence | None = None) -> MorphismReport:
    """Check each morphism class; exhaustive on tables, on ``samples`` otherwise."""
    S, T = m.source, m.target
    if isinstance(S, TableQuantale):
        pts = list(S.elements())
        basis = "exhaustive"
    else:
        pts = list(samples if samples is not None else S.sample())
        basis = "sampled"
    h = {x: m(x) for x in pts}
    wit = {}

    def first(pred, cands):
        for c in cands:
            if not pred(*c):
                return c
        return None

    pairs = list(itertools.product(pts, repeat=2))
    mono = first(lambda x, y: not S.leq(x, y) or T.leq(h[x], h[y]), pairs)
    wit["monotone"] = mono
    hu = m(S.unit)
    lax_u = T.leq(T.unit, hu)
    wit["lax_unital"] = None if lax_u else (S.unit,)
    lm = first(lambda x, y: T.leq(T.tensor(h[x], h[y]), m(S.tensor(x, y))), pairs)
    wit["lax_monoidal"] = lm if lm else (None if lax_u else (S.unit,))
    sm = first(lambda x, y: T.tensor(h[x], h[y]) == m(S.tensor(x, y)), pairs)
    wit["strict_monoidal"] = sm if sm else (None if T.unit == hu else (S.unit,))
    jp = first(lambda x, y: m(S.join(x, y)) == T.join(h[x], h[y]), pairs)
    if jp is None and m(S.bottom) != T.bottom:
        jp = (S.bottom,)
    wit["join_preserving"] = jp
    if isinstance(S, TableQuantale):
        # directed subsets of a finite lattice contain their join
        scott = mono is None
        sc_basis = "finite"
    else:
        scott, sc_basis = _scott_sampled(m, pts)
    wit["scott_continuous"] = None if scott else "directed join not preserved"
    checks = {
        "monotone": mono is None,
        "scott_continuous": scott and mono is None,
        "lax_unital": mono is None and lax_u,
        "lax_monoidal": mono is None and wit["lax_monoidal"] is None,
        "strict_monoidal": mono is None and wit["strict_monoidal"] is None,
        "join_preserving": mono is None and jp is None,
    }
    return MorphismReport(checks, wit, f"{basis}; scott via {sc_basis}", m.claimed_kind)


def _scott_sampled(m, pts):
    """Directed joins in the half-line are numeric infima approached from above."""
    for x in pts:
        if x is INF or x is EMPTY:
            continue
        if m(x + Fraction(1, 2**40)) != m(x):
            return False, "sampled right limits"
    return True, "sampled right limits"


def meet_unit_map(Q: TableQuantale) -> QuantaleMorphism:
    """``x -> x meet 1`` into the affine part."""
    A = affine_part(Q)
    pos = {x: i for i, x in enumerate(A.extra["embedding"])}
    return QuantaleMorphism(Q, A, [pos[Q.meet(x, Q.unit)] for x in Q.elements()], "lax_monoidal", "meet_unit")


def top_map(Q: TableQuantale) -> QuantaleMorphism:
    """The map from the one-point quantale picking ``top``."""
    return QuantaleMorphism(trivial(), Q, [Q.top], "lax_monoidal", "top")


def chain_inclusion(n: int, top_to_inf: bool = True) -> QuantaleMorphism:
    """``chain_plus(n)`` into ``rplus``; the truncation value maps to ``inf`` or to ``n``."""
    C = chain_plus(n)
    R = rational_rplus()
    vals = [Fraction(i) for i in range(n)] + [INF if top_to_inf else Fraction(n)]
    return QuantaleMorphism(C, R, vals, "strict_monoidal", "inclusion")


# ---------------------------------------------------------------- names


def _split_args(s: str) -> list[str]:
    out, depth, cur = [], 0, []
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ValueError(f"unbalanced parentheses in {s!r}")
        if ch == "," and depth == 0:
            out.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    if depth:
        raise ValueError(f"unbalanced parentheses in {s!r}")
    out.append("".join(cur).strip())
    return out


def _strip_parens(s: str) -> str:
    s = s.strip()
    while s.startswith("(") and s.endswith(")"):
        depth = 0
        for i, ch in enumerate(s):
            depth += ch == "("
            depth -= ch == ")"
            if depth == 0:
                break
        if i != len(s) - 1:
            break
        s = s[1:-1].strip()
    return s


def parse_poset(expr: str) -> FinPoset:
    from . import order

    expr = _strip_parens(expr)
    name, _, rest = expr.partition(":")
    name = name.strip()
    if name == "chain":
        return order.chain(int(rest))
    if name == "antichain":
        return order.antichain(int(rest))
    if name == "diamond":
        return order.diamond()
    if name == "m3":
        return order.m3()
    if name == "n5":
        return order.n5()
    raise UnknownSymbolError(f"unknown poset constructor {name!r}")


CONSTRUCTORS = (
    "sigma",
    "trivial",
    "chain_plus",
    "chain_max",
    "rplus",
    "rmax",
    "relations",
    "product",
    "affine_part",
    "pointwise_hom",
    "day",
    "free",
    "scott_closed",
)


def from_spec(expr: str, cap: int = DEFAULT_CAP) -> Quantale:
    """Build a quantale from a constructor expression such as ``product:sigma,sigma``.

    Nested arguments may be parenthesized: ``affine_part:(product:sigma,sigma)``.
    """
    expr = _strip_parens(expr)
    name, sep, rest = expr.partition(":")
    name = name.strip()
    args = _split_args(rest) if sep else []

    def need(k):
        if len(args) != k:
            raise ValueError(f"{name} takes {k} argument(s), got {len(args)}")

    def table(a):
        q = from_spec(a, cap)
        if not isinstance(q, TableQuantale):
            raise HypothesisViolation(f"{name} needs a finite table quantale, got {q.name}")
        return q

    if name == "sigma":
        need(0)
        return sigma()
    if name == "trivial":
        need(0)
        return trivial()
    if name in ("chain_plus", "chain_max"):
        need(1)
        return (chain_plus if name == "chain_plus" else chain_max)(int(args[0]))
    if name == "rplus":
        need(0)
        return rational_rplus()
    if name == "rmax":
        need(0)
        return rational_rmax()
    if name == "relations":
        need(1)
        return relations(int(args[0]))
    if name == "product":
        if len(args) < 1:
            raise ValueError("product needs at least one factor")
        return product(*(table(a) for a in args), cap=cap)
    if name == "affine_part":
        need(1)
        return affine_part(table(args[0]))
    if name == "pointwise_hom":
        need(2)
        return pointwise_hom(parse_poset(args[0]), table(args[1]), cap)
    if name == "day":
        need(2)
        return day_convolution(OrderedMonoid.of(table(args[0])), table(args[1]), cap)
    if name == "free":
        need(1)
        return free_quantale(OrderedMonoid.of(table(args[0])), cap)
    if name == "scott_closed":
        need(1)
        return scott_closed_quantale(from_spec(args[0], cap), cap)
    raise UnknownSymbolError(f"unknown quantale constructor {name!r}")


BUILTIN_TABLES = (
    "sigma",
    "chain_plus:1",
    "chain_plus:2",
    "chain_plus:3",
    "chain_max:2",
    "chain_max:3",
    "relations:2",
    "product:sigma,sigma",
    "product:(chain_plus:2),sigma",
    "affine_part:(relations:2)",
    "pointwise_hom:(chain:2),sigma",
    "pointwise_hom:diamond,(chain_plus:1)",
    "day:(chain_plus:2),sigma",
    "day:(chain_max:2),(chain_plus:1)",
    "free:(chain_plus:2)",
    "scott_closed:sigma",
    "scott_closed:(product:sigma,sigma)",
    "scott_closed:(chain_plus:2)",
)


# ---------------------------------------------------------------- interpolation


def interpolation_candidates(Q: Quantale, values: Iterable) -> list:
    """Elements to search when interpolating between ``values``.

    Tables search every element.  On the rational family the relevant
    predicates compare sums and maxima of the inputs against thresholds, so
    halved sums and differences of the inputs cover every solution class.
    """
    if isinstance(Q, TableQuantale):
        return list(Q.elements())
    fin = sorted({as_value(v) for v in values if v is not INF} | {Fraction(0)})
    out = {INF, *fin}
    for a in fin:
        out.add(a + 1)
        for b in fin:
            out.add((a + b) / 2)
            if a > b:
                out.add((a - b) / 2)
            for c in fin:
                if a + b > c:
                    out.add((a + b - c) / 2)
    return sorted(out, key=lambda v: (v is INF, v if v is not INF else 0))


def interpolate(Q: Quantale, q1, q2, rel: str = "way_below"):
    """Some ``q`` with ``q1 R q R q2``, or ``None``."""
    r = getattr(Q, rel)
    for q in interpolation_candidates(Q, (q1, q2)):
        if r(q1, q) and r(q, q2):
            return q
    return None


def tensor_interpolate(Q: Quantale, q1, q2, side: str = "right"):
    """Some ``q << 1`` with ``q1 << q2 * q`` (``side='right'``) or ``q1 << q * q2``."""
    for q in interpolation_candidates(Q, (q1, q2)):
        if not Q.way_below(q, Q.unit):
            continue
        t = Q.tensor(q2, q) if side == "right" else Q.tensor(q, q2)
        if Q.way_below(q1, t):
            return q
    return None


def factor_interpolate(Q: Quantale, q, q1, q2, side: str = "right"):
    """From ``q << q1 * q2``: ``q' << q2`` with ``q << q1 * q'`` (or the left form)."""
    for c in interpolation_candidates(Q, (q, q1, q2)):
        if side == "right":
            if Q.way_below(c, q2) and Q.way_below(q, Q.tensor(q1, c)):
                return c
        elif Q.way_below(c, q1) and Q.way_below(q, Q.tensor(c, q2)):
            return c
    return None


def interpolation_failures(Q: Quantale, triples: Iterable[tuple] | None = None, prime: bool | None = None) -> list:
    """Every interpolation law with no witness, as ``(law, inputs)``.

    Tables are checked on all pairs and triples; other quantales on the
    supplied triples.
    """
    if triples is None:
        els = list(Q.elements())
        pairs = list(itertools.product(els, repeat=2))
        triples = list(itertools.product(els, repeat=3))
    else:
        triples = list(triples)
        pairs = [(a, b) for a, b, _ in triples]
    if prime is None:
        prime = not isinstance(Q, TableQuantale) or _prime_continuous(Q)
    out = []
    for q1, q2 in pairs:
        if Q.way_below(q1, q2):
            if interpolate(Q, q1, q2) is None:
                out.append(("way-below interpolation", (q1, q2)))
            for side in ("right", "left"):
                if tensor_interpolate(Q, q1, q2, side) is None:
                    out.append((f"tensor interpolation ({side})", (q1, q2)))
        if prime and Q.totally_below(q1, q2) and interpolate(Q, q1, q2, "totally_below") is None:
            out.append(("totally-below interpolation", (q1, q2)))
    for q, q1, q2 in triples:
        if Q.way_below(q, Q.tensor(q1, q2)):
            for side in ("right", "left"):
                if factor_interpolate(Q, q, q1, q2, side) is None:
                    out.append((f"factor interpolation ({side})", (q, q1, q2)))
    return out


def _prime_continuous(Q: TableQuantale) -> bool:
    return all(Q.finite_join(x for x in Q.elements() if Q.totally_below(x, y)) == y for y in Q.elements())
