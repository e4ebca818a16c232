"""Quantale-valued metric spaces, their ball topologies and arrows.

A space stores its distance matrix as element values of its quantale (int
indices for table quantales).  Subsets of points are bitmasks.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .errors import CapExceededError, HypothesisViolation, RadiusError
from .order import bits
from .quantale import (
    EMPTY,
    INF,
    LiftedLinear,
    Quantale,
    QuantaleMorphism,
    RationalQuantale,
    TableQuantale,
    monotone_maps,
    product as quantale_product,
    projection,
)
from .topology import FinTopology, generate, is_continuous, preimage


class QMetricSpace:
    """Points, a quantale and a distance matrix; derived data is cached lazily."""

    def __init__(self, points: Sequence, q: Quantale, d, name: str = "space"):
        self.points = tuple(points)
        self.q = q
        self.name = name
        n = len(self.points)
        if isinstance(q, TableQuantale):
            arr = np.asarray(d, dtype=np.int64).reshape(n, n)
            arr.setflags(write=False)
            self.d = arr
        else:
            self.d = tuple(tuple(row) for row in d)
            if len(self.d) != n or any(len(r) != n for r in self.d):
                raise ValueError("distance matrix must be square")
        self._lock = threading.RLock()
        self._cache = {}

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def dist(self, x: int, y: int):
        v = self.d[x][y]
        return int(v) if isinstance(self.q, TableQuantale) else v

    def is_table(self) -> bool:
        return isinstance(self.q, TableQuantale)

    def cached(self, key, fn):
        """At-most-once computation of ``fn()`` under ``key``."""
        with self._lock:
            if key in self._cache:
                return self._cache[key]
            val = fn()
            self._cache[key] = val
            return val

    def values(self) -> list:
        return self.cached("values", lambda: [self.dist(x, y) for x in range(self.n) for y in range(self.n)])

    def radii(self) -> tuple:
        """Radius candidates ``δ << 1`` for this space."""
        return self.cached("radii", lambda: tuple(self.q.radius_candidates(self.values())))

    def label_matrix(self) -> list[list[str]]:
        return [[self.q.label(self.dist(x, y)) for y in range(self.n)] for x in range(self.n)]

    def __repr__(self):
        return f"QMetricSpace({self.name!r}, {self.n} points over {self.q.name})"


# ---------------------------------------------------------------- axioms


@dataclass
class MetricReport:
    passed: bool
    symmetric: bool
    separated: bool
    d_preorder: np.ndarray
    violations: list = field(default_factory=list)


def d_preorder(s: QMetricSpace) -> np.ndarray:
    def build():
        q = s.q
        if s.is_table():
            return q.leq_matrix[q.unit, s.d].copy()
        return np.array([[q.leq(q.unit, s.dist(x, y)) for y in range(s.n)] for x in range(s.n)], dtype=bool)

    return s.cached("preorder", build)


def verify_metric(s: QMetricSpace) -> MetricReport:
    q, n = s.q, s.n
    v = []
    for x in range(n):
        if not q.leq(q.unit, s.dist(x, x)):
            v.append(("1 <= d(x,x)", (x,)))
            break
    if s.is_table():
        t = kernels.triangle_violation(s.d, q.tensor_table, q.leq_matrix)
    else:
        t = None
        for x, y, z in itertools.product(range(n), repeat=3):
            if not q.leq(q.tensor(s.dist(x, y), s.dist(y, z)), s.dist(x, z)):
                t = (x, y, z)
                break
    if t:
        v.append(("triangle", t))
    pre = d_preorder(s)
    sym = all(s.dist(x, y) == s.dist(y, x) for x in range(n) for y in range(n))
    both = pre & pre.T
    np.fill_diagonal(both, False)
    return MetricReport(not v, sym, not both.any(), pre, v)


def metric_closure(q: Quantale, d) -> list:
    """Least metric above ``d`` (diagonal raised to the unit, transitively closed)."""
    n = len(d)
    if isinstance(q, TableQuantale):
        arr = np.array(d, dtype=np.int64).reshape(n, n)
        for i in range(n):
            arr[i, i] = q.join(arr[i, i], q.unit)
        return kernels.closure(arr, q.tensor_table, q.join_table)
    out = [list(r) for r in d]
    for i in range(n):
        out[i][i] = q.join(out[i][i], q.unit)
    changed = True
    while changed:
        changed = False
        for k in range(n):
            for i in range(n):
                for j in range(n):
                    v = q.join(out[i][j], q.tensor(out[i][k], out[k][j]))
                    if v != out[i][j]:
                        out[i][j] = v
                        changed = True
    return out


def random_space(rng, q: Quantale, n: int, bottom_num: int = 1, bottom_den: int = 2, name: str = "random") -> QMetricSpace:
    """A random ``q``-metric on ``n`` points, closed into a metric."""
    if isinstance(q, TableQuantale):
        els = list(q.elements())
        d = [[q.bottom if rng.chance(bottom_num, bottom_den) else rng.choice(els) for _ in range(n)] for _ in range(n)]
    elif isinstance(q, RationalQuantale):
        d = [[INF if rng.chance(bottom_num, bottom_den) else rng.fraction(4, 2) for _ in range(n)] for _ in range(n)]
    else:
        raise HypothesisViolation(f"no random generator for {q.name}")
    return QMetricSpace([f"x{i}" for i in range(n)], q, metric_closure(q, d), name)


def dual_space(s: QMetricSpace) -> QMetricSpace:
    """``d^o(x, y) = d(y, x)``; only a metric when the tensor commutes."""
    if not s.q.is_commutative:
        raise HypothesisViolation("the dual metric needs a commutative quantale")
    n = s.n
    return QMetricSpace(s.points, s.q, [[s.dist(y, x) for y in range(n)] for x in range(n)], s.name + "^o")


# ---------------------------------------------------------------- balls


def _check_radius(s: QMetricSpace, delta):
    if not s.q.way_below(delta, s.q.unit):
        raise RadiusError(f"radius {s.q.label(delta)} is not way-below the unit")


def ball(s: QMetricSpace, x: int, delta) -> int:
    """``{y | δ << d(x, y)}``."""
    _check_radius(s, delta)
    return _ball(s, x, delta, False)


def dual_ball(s: QMetricSpace, x: int, delta) -> int:
    """``{y | δ << d(y, x)}``."""
    _check_radius(s, delta)
    return _ball(s, x, delta, True)


def _ball(s, x, delta, dual, rel=None):
    q = s.q
    rel = rel or q.way_below
    if s.is_table() and rel == q.way_below:
        col = s.d[:, x] if dual else s.d[x, :]
        row = q.leq_matrix[delta, col]
        return sum(1 << int(y) for y in np.nonzero(row)[0])
    out = 0
    for y in range(s.n):
        v = s.dist(y, x) if dual else s.dist(x, y)
        if rel(delta, v):
            out |= 1 << y
    return out


def all_balls(s: QMetricSpace, dual: bool = False, radii=None) -> dict:
    """``{(x, δ): ball}`` over the space's radius candidates."""
    radii = s.radii() if radii is None else radii
    return {(x, r): _ball(s, x, r, dual) for x in range(s.n) for r in radii}


def ball_topology(s: QMetricSpace) -> FinTopology:
    return s.cached("tau", lambda: generate(s.n, all_balls(s).values()))


def dual_ball_topology(s: QMetricSpace) -> FinTopology:
    return s.cached("tau_o", lambda: generate(s.n, all_balls(s, True).values()))


def totally_below_ball_topology(s: QMetricSpace, radii=None) -> FinTopology:
    """Topology generated by ``{y | δ <<< d(x, y)}`` with ``δ <<< 1``."""
    q = s.q
    if radii is None:
        if not isinstance(q, TableQuantale):
            raise HypothesisViolation("pass explicit radii for non-table quantales")
        radii = [r for r in q.elements() if q.totally_below(r, q.unit)]
    balls = [_ball(s, x, r, False, q.totally_below) for x in range(s.n) for r in radii]
    return generate(s.n, balls)


def is_open_by_balls(s: QMetricSpace, mask: int, dual: bool = False) -> bool:
    """Membership law: every point of ``mask`` has a ball inside ``mask``."""
    return all(any(_ball(s, x, r, dual) & ~mask == 0 for r in s.radii()) for x in bits(mask))


def closure(s: QMetricSpace, A: int) -> int:
    """Closure in ``τ_d``: ``{y | ∀δ ∃x∈A. δ << d(y, x)}``."""
    return _closure(s, A, dual=False)


def closure_dual(s: QMetricSpace, A: int) -> int:
    """Closure in ``τ_d^o``: ``{y | ∀δ ∃x∈A. δ << d(x, y)}``."""
    return _closure(s, A, dual=True)


def _closure(s, A, dual):
    out = s.full
    for r in s.radii():
        reach = 0
        for x in bits(A):
            # points y with δ << d(x, y) (dual) or δ << d(y, x)
            reach |= _ball(s, x, r, not dual)
        out &= reach
    return out


# ---------------------------------------------------------------- arrows


@dataclass
class MetArrow:
    source: QMetricSpace
    target: QMetricSpace
    f: Sequence[int]
    realizer: QuantaleMorphism | None = None

    def __call__(self, x):
        return self.f[x]

    def check_realizer(self) -> bool:
        h = self.realizer
        if h is None:
            return False
        s, t = self.source, self.target
        rep = _morphism_checks(h)
        return (
            rep["monotone"]
            and rep["lax_unital"]
            and all(
                t.q.leq(h(s.dist(x, y)), t.dist(self.f[x], self.f[y])) for x in range(s.n) for y in range(s.n)
            )
        )


def _morphism_checks(h):
    from .quantale import verify_morphism

    return verify_morphism(h).checks


def greatest_realizer(f: Sequence[int], s: QMetricSpace, t: QMetricSpace) -> QuantaleMorphism:
    """``g(q) = meet{d'(fx, fy) : q <= d(x, y)}``, ``top`` for an empty constraint set."""
    Q, Q2 = s.q, t.q
    pairs = [(s.dist(x, y), t.dist(f[x], f[y])) for x in range(s.n) for y in range(s.n)]

    def g(qv):
        return Q2.finite_meet(v for dv, v in pairs if Q.leq(qv, dv))

    if isinstance(Q, TableQuantale):
        return QuantaleMorphism(Q, Q2, [g(v) for v in Q.elements()], "lax_unital", "greatest_realizer")
    return QuantaleMorphism(Q, Q2, g, "lax_unital", "greatest_realizer")


def is_uniform_by_realizer(f, s, t) -> bool:
    g = greatest_realizer(f, s, t)
    return t.q.leq(t.q.unit, g(s.q.unit))


def _f_ball_inside(f, s, t, x, delta, eps) -> bool:
    img = _ball(s, x, delta, False)
    target = _ball(t, f[x], eps, False)
    return all(target >> f[y] & 1 for y in bits(img))


def is_uniform_by_epsilon_delta(f, s, t) -> bool:
    """``∀ε ∃δ ∀x. f(B(x,δ)) ⊆ B(fx,ε)`` over radius candidates."""
    return all(any(all(_f_ball_inside(f, s, t, x, dl, ep) for x in range(s.n)) for dl in s.radii()) for ep in t.radii())


def is_uniformly_continuous(f, s, t) -> bool:
    a = is_uniform_by_realizer(f, s, t)
    b = is_uniform_by_epsilon_delta(f, s, t)
    assert a == b, "realizer and epsilon-delta characterizations disagree"
    return a


def is_pointwise_continuous(f, s, t) -> bool:
    """``∀x ∀ε ∃δ. f(B(x,δ)) ⊆ B(fx,ε)``, checked against topological continuity."""
    a = all(any(_f_ball_inside(f, s, t, x, dl, ep) for dl in s.radii()) for x in range(s.n) for ep in t.radii())
    b = is_topologically_continuous(f, s, t)
    assert a == b, "pointwise and topological continuity disagree"
    return a


def is_topologically_continuous(f, s, t) -> bool:
    return is_continuous(f, ball_topology(s), ball_topology(t))


def brute_force_realizer(f, s: QMetricSpace, t: QMetricSpace, cap: int = 5):
    """Search every monotone lax-unital map ``Q -> Q'`` for a realizer (oracle)."""
    Q, Q2 = s.q, t.q
    if not (isinstance(Q, TableQuantale) and isinstance(Q2, TableQuantale)):
        raise HypothesisViolation("brute-force realizer search needs table quantales")
    if max(len(Q), len(Q2)) > cap:
        raise CapExceededError("realizer search carrier", cap, max(len(Q), len(Q2)))
    pairs = {(s.dist(x, y), t.dist(f[x], f[y])) for x in range(s.n) for y in range(s.n)}
    for h in monotone_maps(Q.poset, Q2):
        if Q2.leq(Q2.unit, h[Q.unit]) and all(Q2.leq(h[a], b) for a, b in pairs):
            return QuantaleMorphism(Q, Q2, list(h), "lax_unital", "found")
    return None


def is_isometry(f, s, t) -> bool:
    same = s.q is t.q or s.q == t.q
    return same and all(s.dist(x, y) == t.dist(f[x], f[y]) for x in range(s.n) for y in range(s.n))


def identity_morphism(q: Quantale) -> QuantaleMorphism:
    if isinstance(q, TableQuantale):
        return QuantaleMorphism(q, q, list(q.elements()), "strict_monoidal", "id")
    return QuantaleMorphism(q, q, lambda v: v, "strict_monoidal", "id")


def hom_leq(f1, f2, t: QMetricSpace) -> bool:
    """``f1 <= f2`` pointwise in the target's d-preorder."""
    pre = d_preorder(t)
    return all(pre[a, b] for a, b in zip(f1, f2))


# ---------------------------------------------------------------- constructions


def subspace(s: QMetricSpace, keep: Sequence[int], name: str | None = None) -> QMetricSpace:
    return QMetricSpace(
        [s.points[i] for i in keep], s.q, [[s.dist(a, b) for b in keep] for a in keep], name or s.name + "|sub"
    )


def equalizer(f, g, s: QMetricSpace, t: QMetricSpace) -> tuple[QMetricSpace, MetArrow]:
    keep = [x for x in range(s.n) if f[x] == g[x]]
    e = subspace(s, keep, "equalizer")
    return e, MetArrow(e, s, keep, identity_morphism(s.q))


@dataclass
class Coequalizer:
    space: QMetricSpace
    arrow: MetArrow
    classes: list
    closed: bool  # whether the join over representatives needed a metric closure


def coequalizer(f, g, s: QMetricSpace, t: QMetricSpace) -> Coequalizer:
    """Quotient of ``t`` by the equivalence generated by ``f(x) ~ g(x)``.

    Class distances are joins over representatives; when that table fails
    the triangle law it is replaced by its least metric closure and
    ``closed`` is set.
    """
    parent = list(range(t.n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for x in range(s.n):
        a, b = find(f[x]), find(g[x])
        if a != b:
            parent[max(a, b)] = min(a, b)
    roots = sorted({find(a) for a in range(t.n)})
    classes = [[a for a in range(t.n) if find(a) == r] for r in roots]
    cls_of = {a: i for i, c in enumerate(classes) for a in c}
    q = t.q
    d = [[q.finite_join(t.dist(a, b) for a in ca for b in cb) for cb in classes] for ca in classes]
    labels = ["[" + "|".join(str(t.points[a]) for a in c) + "]" for c in classes]
    space = QMetricSpace(labels, q, d, "coequalizer")
    closed = False
    if not verify_metric(space).passed:
        space = QMetricSpace(labels, q, metric_closure(q, d), "coequalizer")
        closed = True
    arrow = MetArrow(t, space, [cls_of[a] for a in range(t.n)], identity_morphism(q))
    return Coequalizer(space, arrow, classes, closed)


def product_space(spaces: Sequence[QMetricSpace]) -> tuple[QMetricSpace, list]:
    """Componentwise distances valued in the product quantale; returns projections too."""
    qs = [s.q for s in spaces]
    if not all(isinstance(q, TableQuantale) for q in qs):
        raise HypothesisViolation("products are provided for table quantales")
    Q = quantale_product(*qs)
    enc = {t: i for i, t in enumerate(Q.extra["tuples"])}
    pts = list(itertools.product(*(range(s.n) for s in spaces)))
    d = [[enc[tuple(s.dist(a[j], b[j]) for j, s in enumerate(spaces))] for b in pts] for a in pts]
    labels = ["(" + ",".join(str(s.points[i]) for s, i in zip(spaces, p)) + ")" for p in pts]
    P = QMetricSpace(labels, Q, d, "product")
    projs = [MetArrow(P, s, [p[j] for p in pts], projection(Q, j)) for j, s in enumerate(spaces)]
    return P, projs


def sum_space(spaces: Sequence[QMetricSpace]) -> tuple[QMetricSpace, list]:
    q = spaces[0].q
    if any(s.q != q and s.q is not q for s in spaces):
        raise HypothesisViolation("sums need a shared quantale")
    tags = [(j, x) for j, s in enumerate(spaces) for x in range(s.n)]
    d = [[spaces[a[0]].dist(a[1], b[1]) if a[0] == b[0] else q.bottom for b in tags] for a in tags]
    labels = [f"{j}.{spaces[j].points[x]}" for j, x in tags]
    S = QMetricSpace(labels, q, d, "sum")
    pos = {t: i for i, t in enumerate(tags)}
    inj = [MetArrow(s, S, [pos[(j, x)] for x in range(s.n)], identity_morphism(q)) for j, s in enumerate(spaces)]
    return S, inj


@dataclass
class Separation:
    quotient: QMetricSpace
    r: MetArrow
    s_section: MetArrow
    classes: list


def separate(s: QMetricSpace) -> Separation:
    """Quotient by mutual ``<=_d``; the section picks the least index of each class."""
    pre = d_preorder(s)
    classes = []
    seen = set()
    for x in range(s.n):
        if x in seen:
            continue
        c = [y for y in range(s.n) if pre[x, y] and pre[y, x]]
        seen.update(c)
        classes.append(c)
    cls_of = {a: i for i, c in enumerate(classes) for a in c}
    for x in range(s.n):
        for y in range(s.n):
            # d(x, y) = d(x', y') whenever x ~ x' and y ~ y'
            if s.dist(x, y) != s.dist(classes[cls_of[x]][0], classes[cls_of[y]][0]):
                raise AssertionError(f"separation quotient is not well defined at {x}, {y}")
    reps = [c[0] for c in classes]
    labels = ["[" + "|".join(str(s.points[a]) for a in c) + "]" for c in classes]
    Q0 = QMetricSpace(labels, s.q, [[s.dist(a, b) for b in reps] for a in reps], s.name + "/~")
    idq = identity_morphism(s.q)
    return Separation(Q0, MetArrow(s, Q0, [cls_of[x] for x in range(s.n)], idq), MetArrow(Q0, s, reps, idq), classes)


# ---------------------------------------------------------------- metrization


class SymbolicLocale(Quantale):
    """``Ω(S)``: lower sets of the finite subsets of ``S``, tensor = meet.

    ``S`` has ``m`` members; a finite subset of ``S`` is an ``m``-bit mask and an
    element of the locale is a frozenset of such masks forming an antichain.
    The locale is never materialized.
    """

    is_commutative = True
    is_locale = True

    def __init__(self, m: int):
        self.m = m
        self.name = f"omega:{m}"
        self.full_s = (1 << m) - 1
        self.top = self.unit = frozenset({self.full_s})
        self.bottom = frozenset()

    def __eq__(self, other):
        return isinstance(other, SymbolicLocale) and other.m == self.m

    def __hash__(self):
        return hash(("omega", self.m))

    @staticmethod
    def reduce(gens) -> frozenset:
        gens = set(gens)
        return frozenset(g for g in gens if not any(h != g and g & ~h == 0 for h in gens))

    def principal(self, sub: int) -> frozenset:
        return frozenset({sub})

    def contains(self, A, sub: int) -> bool:
        return any(sub & ~g == 0 for g in A)

    def leq(self, A, B):
        return all(self.contains(B, g) for g in A)

    def join(self, A, B):
        return self.reduce(A | B)

    def meet(self, A, B):
        return self.reduce(g & h for g in A for h in B)

    tensor = meet

    @property
    def is_linear(self):
        return self.m == 0

    def way_below(self, A, B):
        # finite lattice
        return self.leq(A, B)

    def totally_below(self, A, B):
        if not A:
            return bool(B)
        return any(self.leq(A, self.principal(p)) for p in B)

    def radius_candidates(self, values=()):
        return (self.unit,)

    def basic_radii(self) -> list:
        """``down{{O}}`` for every member ``O`` of ``S``, plus ``down{∅}``."""
        return [self.principal(1 << i) for i in range(self.m)] + [self.principal(0)]

    def label(self, A):
        return "{" + ",".join(format(g, f"0{max(self.m, 1)}b") for g in sorted(A)) + "}"

    def parse(self, text):
        body = str(text).strip().strip("{}")
        return self.reduce(int(b, 2) for b in body.split(",") if b)

    def materialize(self, cap: int = 4096) -> list:
        """Every element, by closing principal lower sets under joins (small ``m`` only)."""
        elems = {self.bottom}
        prins = [self.principal(p) for p in range(self.full_s + 1)]
        frontier = [self.bottom]
        while frontier:
            nxt = []
            for a in frontier:
                for p in prins:
                    b = self.join(a, p)
                    if b not in elems:
                        elems.add(b)
                        if len(elems) > cap:
                            raise CapExceededError("materialized locale", cap)
                        nxt.append(b)
            frontier = nxt
        return sorted(elems, key=lambda a: (len(a), sorted(a)))


@dataclass
class Metrization:
    space: QMetricSpace
    opens: list  # members of S, in bit order
    topology: FinTopology


def metrize(T: FinTopology, cap: int = 12) -> Metrization:
    """A space over ``Ω(T.opens)`` whose ball topology is ``T``."""
    opens = T.sorted_opens()
    if len(opens) > cap:
        raise CapExceededError("opens for metrization", cap, len(opens))
    L = SymbolicLocale(len(opens))
    n = T.n

    def s_xy(x, y):
        return sum(1 << i for i, O in enumerate(opens) if not (O >> x & 1) or (O >> y & 1))

    d = [[L.principal(s_xy(x, y)) for y in range(n)] for x in range(n)]
    return Metrization(QMetricSpace([str(i) for i in range(n)], L, d, "metrized"), opens, T)


def metrized_ball(M: Metrization, x: int, delta) -> int:
    """Ball by the reduction ``B(x, down F) = ⋂{O ∈ ⋃F : x ∈ O}``."""
    used = 0
    for g in delta:
        used |= g
    out = M.space.full
    for i in bits(used):
        O = M.opens[i]
        if O >> x & 1:
            out &= O
    return out


def metrized_topology(M: Metrization) -> FinTopology:
    """``τ_d`` from the reduction: the subbasis is ``{O : x ∈ O}`` and ``X``."""
    L = M.space.q
    balls = [metrized_ball(M, x, r) for x in range(M.space.n) for r in L.basic_radii()]
    return generate(M.space.n, balls)


def metrized_total_topology(M: Metrization) -> FinTopology:
    """``τ_d^T`` over the basic radii (every radius is a join of them)."""
    L = M.space.q
    return totally_below_ball_topology(M.space, [L.bottom, *L.basic_radii()])


def metrized_topology_literal(M: Metrization, cap: int = 4096) -> tuple[FinTopology, FinTopology]:
    """``τ_d`` and ``τ_d^T`` from every radius of the materialized locale."""
    s = M.space
    L = s.q
    elems = L.materialize(cap)
    wb = [r for r in elems if L.way_below(r, L.unit)]
    tb = [r for r in elems if L.totally_below(r, L.unit)]
    tau = generate(s.n, [_ball(s, x, r, False) for x in range(s.n) for r in wb])
    tau_t = generate(s.n, [_ball(s, x, r, False, L.totally_below) for x in range(s.n) for r in tb])
    for x in range(s.n):
        for r in wb:
            assert _ball(s, x, r, False) == metrized_ball(M, x, r), "ball reduction mismatch"
    return tau, tau_t


# ---------------------------------------------------------------- fixtures


def x3_fixture() -> QMetricSpace:
    """Three points over ``Σ²``: ``d(x_i, x) = top_i``, ``d(x0, x1) = bot``."""
    from .quantale import from_spec

    Q = from_spec("product:sigma,sigma")
    bot, t0, t1, top = (Q.parse(s) for s in ("(bot,bot)", "(top,bot)", "(bot,top)", "(top,top)"))
    d = [[top, bot, t0], [bot, top, t1], [t0, t1, top]]
    return QMetricSpace(["x0", "x1", "x"], Q, d, "X3")


def discrete_space(q: Quantale, n: int) -> QMetricSpace:
    return QMetricSpace([f"p{i}" for i in range(n)], q, [[q.top if i == j else q.bottom for j in range(n)] for i in range(n)], "discrete")


def all_sigma_spaces(n: int) -> list[QMetricSpace]:
    """Every ``Σ``-valued metric on ``n`` points, one per preorder."""
    from .quantale import sigma

    S = sigma()
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    out = []
    for choice in range(1 << len(pairs)):
        m = np.eye(n, dtype=bool)
        for b, (i, j) in enumerate(pairs):
            if choice >> b & 1:
                m[i, j] = True
        closed = m.copy()
        for k in range(n):
            closed |= closed[:, k : k + 1] & closed[k : k + 1, :]
        if np.array_equal(closed, m):
            d = [[S.top if m[x, y] else S.bottom for y in range(n)] for x in range(n)]
            out.append(QMetricSpace([f"p{i}" for i in range(n)], S, d, f"sigma#{len(out)}"))
    return out


def path_space(n: int = 3) -> QMetricSpace:
    """Points ``0..n`` over ``chain_plus(n)`` with capped ``|i - j|``."""
    from .quantale import chain_plus

    Q = chain_plus(n)
    return QMetricSpace([str(i) for i in range(n + 1)], Q, [[min(abs(i - j), n) for j in range(n + 1)] for i in range(n + 1)], "path")
