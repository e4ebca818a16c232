"""Robustness calculus on ``P(X)`` and the Hausdorff-Smyth powerspace monads.

Subsets of a space are bitmasks; families of subsets are Python ints with
bit ``A`` set when the subset ``A`` belongs to the family.  Powerspace
points are subsets in numeric bitset order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .errors import CapExceededError, HypothesisViolation
from .metric import (
    MetArrow,
    QMetricSpace,
    _ball,
    ball_topology,
    closure_dual,
    d_preorder,
    greatest_realizer,
    hom_leq,
    identity_morphism,
    separate,
    verify_metric,
)
from .order import bits, popcount
from .quantale import (
    EMPTY,
    LiftedLinear,
    QuantaleMorphism,
    TableQuantale,
    eta_C,
    kleisli_C,
    lowerset_mask,
    monotone_maps,
    scott_closed_quantale,
    verify_morphism,
)
from .topology import FinTopology, generate

ROBUST_ENUM_CAP = 4
POWERSPACE_CAP = 12


def subset_label(s: QMetricSpace, A: int) -> str:
    return "{" + ",".join(str(s.points[i]) for i in bits(A)) + "}"


def submasks(B: int):
    """All subsets of ``B``, including ``0`` and ``B``."""
    sub = B
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & B


def family_of_subsets(B: int) -> int:
    """The family ``P(B)`` as a mask over subsets."""
    fam = 0
    for sub in submasks(B):
        fam |= 1 << sub
    return fam


def as_family(U) -> int:
    return U if isinstance(U, int) else sum(1 << A for A in set(U))


# ---------------------------------------------------------------- imprecision


def b_r(s: QMetricSpace, A: int, delta) -> int:
    """Union of the ``δ``-balls around the points of ``A``."""
    if not s.q.way_below(delta, s.q.unit):
        from .errors import RadiusError

        raise RadiusError(f"radius {s.q.label(delta)} is not way-below the unit")
    out = 0
    for x in bits(A):
        out |= _ball(s, x, delta, False)
    return out


def fattening(s: QMetricSpace, A: int, delta) -> int:
    return closure_dual(s, b_r(s, A, delta))


def all_deltas(s: QMetricSpace) -> list:
    """Every radius ``δ << 1`` of a table quantale, candidates otherwise."""
    q = s.q
    if isinstance(q, TableQuantale):
        return q.way_below_unit()
    return list(s.radii())


def smallest_radius_ball(s: QMetricSpace, A: int) -> int:
    """The least ``B_R(A, δ)`` over radius candidates.

    Balls shrink as ``δ`` grows, so on linear and table quantales the
    candidates give a chain of balls; anything else is rejected.
    """
    balls = sorted({b_r(s, A, r) for r in s.radii()}, key=popcount)
    for a, b in zip(balls, balls[1:]):
        if a & ~b:
            raise HypothesisViolation("radius candidates do not give a chain of balls")
    return balls[0]


# ---------------------------------------------------------------- robust topology


def robust_open(s: QMetricSpace, U) -> bool:
    """``∀A∈U ∃δ. P(B_R(A, δ)) ⊆ U`` over radius candidates."""
    fam = as_family(U)
    radii = s.radii()
    for A in bits(fam):
        if not any(family_of_subsets(b_r(s, A, r)) & ~fam == 0 for r in radii):
            return False
    return True


def _pmask(s: QMetricSpace) -> np.ndarray:
    nsub = 1 << s.n
    radii = s.radii()
    pm = np.zeros((nsub, len(radii)), dtype=np.uint64)
    for A in range(nsub):
        for j, r in enumerate(radii):
            pm[A, j] = family_of_subsets(b_r(s, A, r))
    return pm


def robust_topology_small(s: QMetricSpace, cap: int = ROBUST_ENUM_CAP) -> FinTopology:
    """Every robust-open family on ``P(X)``, as a topology on ``2^n`` points."""
    if s.n > cap:
        raise CapExceededError("points for the robust-topology enumerator", cap, s.n)

    def build():
        nsub = 1 << s.n
        ok = kernels.robust_open_all(_pmask(s), nsub)
        opens = [int(u) for u in np.nonzero(ok)[0]]
        T = FinTopology(nsub, opens, check=False)
        bad = T.violation()
        if bad:
            raise AssertionError(f"robust opens are not a topology: {bad}")
        return T

    return s.cached("robust_topology", build)


def minimal_robust_open(s: QMetricSpace, A: int) -> int:
    """Largest member of the least robust open containing ``A``.

    The least open is ``P(M)`` where ``M`` iterates the smallest ball
    around ``A`` to a fixpoint.
    """
    M = A
    while True:
        nxt = smallest_radius_ball(s, M)
        if nxt == M:
            return M
        M = nxt


def robust_specialization(s: QMetricSpace) -> np.ndarray:
    """``spec[A, B]`` iff every robust open containing ``A`` contains ``B``.

    Computed from the open sets and from dual closures; both must agree.
    """

    def build():
        nsub = 1 << s.n
        by_open = np.zeros((nsub, nsub), dtype=bool)
        by_closure = np.zeros((nsub, nsub), dtype=bool)
        for A in range(nsub):
            M = minimal_robust_open(s, A)
            c = closure_dual(s, A)
            for B in range(nsub):
                by_open[A, B] = B & ~M == 0
                by_closure[A, B] = B & ~c == 0
        if not np.array_equal(by_open, by_closure):
            A, B = map(int, np.argwhere(by_open != by_closure)[0])
            raise AssertionError(f"robust specialization disagrees at {A:#x}, {B:#x}")
        if s.n <= ROBUST_ENUM_CAP:
            enum = robust_topology_small(s).specialization()
            if not np.array_equal(enum, by_open):
                A, B = map(int, np.argwhere(enum != by_open)[0])
                raise AssertionError(f"enumerated specialization disagrees at {A:#x}, {B:#x}")
        return by_closure

    return s.cached("robust_specialization", build)


def br_properties(s: QMetricSpace, deltas=None) -> dict:
    """First counterexample per law of the imprecision calculus, or ``None``."""
    q = s.q
    deltas = all_deltas(s) if deltas is None else list(deltas)
    nsub = 1 << s.n
    out = {k: None for k in ("monotone", "tensor", "closure", "closure_invariant", "fattening", "unit_suffices")}
    br = {(A, r): b_r(s, A, r) for A in range(nsub) for r in deltas}
    cl = [closure_dual(s, A) for A in range(nsub)]
    unit_ok = isinstance(q, TableQuantale)
    for A in range(nsub):
        for r in deltas:
            B = br[A, r]
            if out["monotone"] is None:
                if A & ~B:
                    out["monotone"] = ("A in B_R(A,d)", A, r)
                for A2 in range(nsub):
                    if A & ~A2:
                        continue
                    for r2 in deltas:
                        if q.leq(r2, r) and B & ~br[A2, r2]:
                            out["monotone"] = ("monotone", A, A2, r, r2)
            if out["closure_invariant"] is None and b_r(s, cl[A], r) != B:
                out["closure_invariant"] = (A, r)
            if unit_ok and out["unit_suffices"] is None and br[A, q.unit] & ~B:
                out["unit_suffices"] = (A, r)
            fat = fattening(s, A, r)
            for r2 in deltas:
                if out["fattening"] is None and q.way_below(r2, r):
                    if B & ~fat or fat & ~br[A, r2]:
                        out["fattening"] = (A, r, r2)
        inter = s.full
        for r in deltas:
            inter &= br[A, r]
        if out["closure"] is None and inter != cl[A]:
            out["closure"] = (A, inter, cl[A])
    for r1, r2 in itertools.product(deltas, repeat=2):
        t = q.tensor(r1, r2)
        for r in deltas:
            if not q.way_below(r, t):
                continue
            for A in range(nsub):
                if b_r(s, br[A, r1], r2) & ~br[A, r]:
                    out["tensor"] = out["tensor"] or (A, r1, r2, r)
    return out


# ---------------------------------------------------------------- powerspaces


@dataclass
class PowerSpace:
    base: QMetricSpace
    variant: str  # "dq" or "ds"
    space: QMetricSpace

    @property
    def subsets(self) -> range:
        return range(1 << self.base.n)


def _dq(s: QMetricSpace) -> list:
    q, n = s.q, s.n
    m = 1 << n
    if isinstance(q, TableQuantale):
        return kernels.dq_table(s.d, q.join_table, q.meet_table, q.bottom, q.top)
    out = [[None] * m for _ in range(m)]
    for A1 in range(m):
        col = [q.finite_join(s.dist(x1, x2) for x1 in bits(A1)) for x2 in range(n)]
        for A2 in range(m):
            out[A1][A2] = q.finite_meet(col[x2] for x2 in bits(A2))
    return out


def ds_table(s: QMetricSpace, C=None):
    """``d_S`` with values in ``C_S(Q)`` (indices for tables)."""
    q = s.q
    C = C or scott_closed_quantale(q)
    n = s.n
    if isinstance(q, TableQuantale):
        down = q.down_masks()
        if down is None:
            raise CapExceededError("carrier for lower-set masks", 64, len(q))
        full = np.uint64((1 << len(q)) - 1)
        masks = kernels.ds_masks(s.d, down, full)
        D = C.extra["lower_sets"]
        return np.vectorize(lambda v: D.of_mask(int(v)), otypes=[np.int64])(masks)
    if isinstance(C, LiftedLinear):
        # the join of a principal family is principal; the empty join is EMPTY
        m = 1 << n
        out = [[None] * m for _ in range(m)]
        for A1 in range(m):
            col = [C.finite_join(s.dist(x1, x2) for x1 in bits(A1)) for x2 in range(n)]
            for A2 in range(m):
                out[A1][A2] = C.finite_meet(col[x2] for x2 in bits(A2))
        return out
    raise HypothesisViolation(f"no Scott-closed representation for {q.name}")


def ds_via_eta(s: QMetricSpace, C=None):
    """``d_S`` recomputed as ``d_Q`` over ``C_S(Q)`` of ``eta ∘ d``."""
    C = C or scott_closed_quantale(s.q)
    lifted = QMetricSpace(s.points, C, [[eta_C(C, s.dist(x, y)) for y in range(s.n)] for x in range(s.n)], s.name)
    return _dq(lifted)


def build_powerspace(s: QMetricSpace, variant: str = "ds", cap: int = POWERSPACE_CAP) -> PowerSpace:
    if variant not in ("dq", "ds"):
        raise ValueError(variant)
    if s.n > cap:
        raise CapExceededError("points for a powerspace", cap, s.n)

    def build():
        labels = [subset_label(s, A) for A in range(1 << s.n)]
        if variant == "dq":
            sp = QMetricSpace(labels, s.q, _dq(s), f"P_Q({s.name})")
        else:
            C = scott_closed_quantale(s.q)
            sp = QMetricSpace(labels, C, ds_table(s, C), f"P_S({s.name})")
        return PowerSpace(s, variant, sp)

    return s.cached(("powerspace", variant), build)


def unit_arrow(s: QMetricSpace, variant: str) -> MetArrow:
    """``x -> {x}`` with realizer identity (``dq``) or ``eta_C`` (``ds``)."""
    P = build_powerspace(s, variant)
    f = [1 << x for x in range(s.n)]
    if variant == "dq":
        return MetArrow(s, P.space, f, identity_morphism(s.q))
    C = P.space.q
    if isinstance(s.q, TableQuantale):
        h = QuantaleMorphism(s.q, C, [eta_C(C, v) for v in s.q.elements()], "strict_monoidal", "eta_C")
    else:
        h = QuantaleMorphism(s.q, C, lambda v: eta_C(C, v), "strict_monoidal", "eta_C")
    return MetArrow(s, P.space, f, h)


# ---------------------------------------------------------------- main theorem


@dataclass
class TheoremReport:
    holds: bool
    strategy: str  # "exhaustive" or "filter-refinement"
    witness: object = None


def robust_family_of_ball(P: QMetricSpace, A: int, eps) -> int:
    return _ball(P, A, eps, False)


def hausdorff_theorem_check(s: QMetricSpace, strategy: str | None = None) -> TheoremReport:
    """Compare the robust topology on ``P(X)`` with the ``d_S`` ball topology."""
    if strategy is None:
        strategy = "exhaustive" if s.n <= 3 else "filter-refinement"
    if s.n > 5 and strategy == "filter-refinement" or s.n > ROBUST_ENUM_CAP and strategy == "exhaustive":
        raise CapExceededError("points for the theorem check", 5 if strategy != "exhaustive" else ROBUST_ENUM_CAP, s.n)
    P = build_powerspace(s, "ds").space
    if strategy == "exhaustive":
        R = robust_topology_small(s)
        T = ball_topology(P)
        if R == T:
            return TheoremReport(True, strategy)
        diff = sorted(R.opens ^ T.opens)[0]
        return TheoremReport(False, strategy, ("robust" if diff in R.opens else "d_S", diff))
    # (a) every d_S ball is robust-open
    for A in range(1 << s.n):
        for eps in P.radii():
            fam = _ball(P, A, eps, False)
            if not robust_open(s, fam):
                return TheoremReport(False, strategy, ("ball not robust", A, P.q.label(eps)))
    # (b) every imprecision neighbourhood contains a d_S ball
    for A in range(1 << s.n):
        for r in s.radii():
            B = b_r(s, A, r)
            if not any(all(C & ~B == 0 for C in bits(_ball(P, A, eps, False))) for eps in P.radii()):
                return TheoremReport(False, strategy, ("no ball inside", A, s.q.label(r)))
    return TheoremReport(True, strategy)


# ---------------------------------------------------------------- feasibility


@dataclass
class Feasibility:
    feasible: bool
    forced_lower_bounds: object
    violation: tuple | None
    basis: str = "necessary-condition"


def powerset_metric_feasible(s: QMetricSpace, target: np.ndarray | None = None) -> Feasibility:
    """Necessary condition for a metric on ``P(X)`` realizing ``target`` as its preorder.

    Lower bounds start at ``1`` on target pairs and at ``d(u, v)`` on
    singletons, then close under the triangle law; a non-target pair whose
    bound reaches the unit is a contradiction.
    """
    q = s.q
    if not isinstance(q, TableQuantale):
        raise HypothesisViolation("feasibility is decided over table quantales")
    target = robust_specialization(s) if target is None else np.asarray(target, dtype=bool)
    m = 1 << s.n
    L = np.full((m, m), q.bottom, dtype=np.int64)
    L[target] = q.unit
    for u in range(s.n):
        for v in range(s.n):
            L[1 << u, 1 << v] = q.join(L[1 << u, 1 << v], s.dist(u, v))
    L = kernels.closure(L, q.tensor_table, q.join_table)
    for U in range(m):
        for V in range(m):
            if not target[U, V] and q.leq(q.unit, int(L[U, V])):
                return Feasibility(False, L, (U, V))
    return Feasibility(True, L, None)


def is_feasibility_witness(s: QMetricSpace, dprime, target: np.ndarray, bounds=None) -> bool:
    """``dprime`` is a metric, ``η`` is short into it and its preorder is ``target``."""
    q = s.q
    m = 1 << s.n
    W = QMetricSpace([subset_label(s, A) for A in range(m)], q, dprime, "witness")
    if not verify_metric(W).passed:
        return False
    if not all(q.leq(s.dist(u, v), W.dist(1 << u, 1 << v)) for u in range(s.n) for v in range(s.n)):
        return False
    if not np.array_equal(d_preorder(W), np.asarray(target, dtype=bool)):
        return False
    if bounds is not None:
        return all(q.leq(int(bounds[U, V]), W.dist(U, V)) for U in range(m) for V in range(m))
    return True


# ---------------------------------------------------------------- linear case


@dataclass
class LinearRemark:
    join_matches: bool
    inverse_realizes: bool
    topologies_equal: bool


def join_of_lowerset(C, A):
    """``⨆`` from ``C_S(Q)`` back to ``Q``."""
    if isinstance(C, LiftedLinear):
        return C.base.bottom if A is EMPTY else A
    Q = C.extra["base"]
    return Q.finite_join(bits(lowerset_mask(C, A)))


def linear_inverse(C, q):
    """``bot -> ∅`` and ``q -> ↓q`` otherwise."""
    if isinstance(C, LiftedLinear):
        return EMPTY if q == C.base.bottom else q
    Q = C.extra["base"]
    return C.bottom if q == Q.bottom else eta_C(C, q)


def linear_remark(s: QMetricSpace) -> LinearRemark:
    PQ = build_powerspace(s, "dq").space
    PS = build_powerspace(s, "ds").space
    C = PS.q
    m = PQ.n
    pairs = [(a, b) for a in range(m) for b in range(m)]
    join_ok = all(join_of_lowerset(C, PS.dist(a, b)) == PQ.dist(a, b) for a, b in pairs)
    inv_ok = all(C.leq(linear_inverse(C, PQ.dist(a, b)), PS.dist(a, b)) for a, b in pairs)
    inv_ok = inv_ok and C.leq(C.unit, linear_inverse(C, s.q.unit))
    return LinearRemark(join_ok, inv_ok, ball_topology(PQ) == ball_topology(PS))


# ---------------------------------------------------------------- monads


@dataclass
class KleisliArrow:
    """``f: X -> M(Y)`` with ``f`` given on points of ``M(Y)``."""

    source: QMetricSpace
    base: QMetricSpace
    f: tuple
    realizer: list | None  # table map from source.q to the quantale of M(Y)


@dataclass
class MonadInstance:
    tag: str
    obj: Callable  # base space -> space of M(base)
    unit: Callable  # base space -> KleisliArrow
    extend: Callable  # KleisliArrow -> MetArrow between M-spaces
    unit_realizer: Callable  # quantale -> realizer list

    def compose(self, g_ext: MetArrow, f: KleisliArrow, gbase: QMetricSpace) -> KleisliArrow:
        """``g* ∘ f`` as a Kleisli arrow, realizers composed."""
        h = g_ext.realizer
        real = None if f.realizer is None or h is None else [h(v) for v in f.realizer]
        return KleisliArrow(f.source, gbase, tuple(g_ext.f[p] for p in f.f), real)


def _union_image(f, A: int) -> int:
    out = 0
    for x in bits(A):
        out |= f[x]
    return out


def _require_table(s: QMetricSpace):
    if not isinstance(s.q, TableQuantale):
        raise HypothesisViolation("monad suites run over table quantales")


def _pq_ops() -> MonadInstance:
    def obj(Y):
        return build_powerspace(Y, "dq").space

    def unit(X):
        return KleisliArrow(X, X, tuple(1 << x for x in range(X.n)), list(X.q.elements()))

    def extend(k: KleisliArrow) -> MetArrow:
        _require_table(k.source)
        if k.source.q != k.base.q:
            raise HypothesisViolation("P_Q arrows keep the quantale fixed")
        PX, PY = obj(k.source), obj(k.base)
        f = [_union_image(k.f, A) for A in range(PX.n)]
        return MetArrow(PX, PY, f, identity_morphism(k.source.q))

    return MonadInstance("P_Q", obj, unit, extend, lambda q: list(q.elements()))


def _ps_ops() -> MonadInstance:
    def obj(Y):
        return build_powerspace(Y, "ds").space

    def unit_real(q):
        C = obj_q(q)
        return [eta_C(C, v) for v in q.elements()]

    def obj_q(q):
        return scott_closed_quantale(q)

    def unit(X):
        C = obj(X).q
        return KleisliArrow(X, X, tuple(1 << x for x in range(X.n)), [eta_C(C, v) for v in X.q.elements()])

    def extend(k: KleisliArrow) -> MetArrow:
        _require_table(k.source)
        PX, PY = obj(k.source), obj(k.base)
        if k.realizer is None:
            raise HypothesisViolation("P_S arrows need a realizer")
        f = [_union_image(k.f, A) for A in range(PX.n)]
        g = kleisli_C(PX.q, PY.q, k.realizer)
        return MetArrow(PX, PY, f, QuantaleMorphism(PX.q, PY.q, g, "lax_unital", "g*"))

    return MonadInstance("P_S", obj, unit, extend, unit_real)


@dataclass
class SeparatedPower:
    """Separated quotient of ``P_S(Y)`` with the closure section."""

    base: QMetricSpace
    space: QMetricSpace
    r: list  # subset -> class
    section: list  # class -> cl(A)^o
    alt_section: list  # class -> least subset


def separated_powerspace(Y: QMetricSpace) -> SeparatedPower:
    def build():
        P = build_powerspace(Y, "ds").space
        sep = separate(P)
        cls = {}
        r = []
        for A in range(P.n):
            c = closure_dual(Y, A)
            r.append(cls.setdefault(c, len(cls)))
        section = [0] * len(cls)
        for c, i in cls.items():
            section[i] = c
        # classes by dual closure are exactly the d_S-equivalence classes
        by_sep = sorted(sorted(c) for c in sep.classes)
        by_cl = sorted(sorted(A for A in range(P.n) if r[A] == i) for i in range(len(cls)))
        if by_sep != by_cl:
            raise AssertionError("dual-closure classes differ from the separation classes")
        labels = [subset_label(Y, c) for c in section]
        Q = QMetricSpace(labels, P.q, [[P.dist(a, b) for b in section] for a in section], f"R({P.name})")
        alt = [min(A for A in range(P.n) if r[A] == i) for i in range(len(cls))]
        return SeparatedPower(Y, Q, r, section, alt)

    return Y.cached("separated_powerspace", build)


def _transformed_ops(base: MonadInstance | None = None, alt: bool = False) -> MonadInstance:
    base = base or _ps_ops()

    def obj(Y):
        return separated_powerspace(Y).space

    def unit(X):
        S = separated_powerspace(X)
        u = base.unit(X)
        return KleisliArrow(X, X, tuple(S.r[A] for A in u.f), u.realizer)

    def extend(k: KleisliArrow) -> MetArrow:
        SX, SY = separated_powerspace(k.source), separated_powerspace(k.base)
        secY = SY.alt_section if alt else SY.section
        secX = SX.alt_section if alt else SX.section
        lifted = base.extend(KleisliArrow(k.source, k.base, tuple(secY[c] for c in k.f), k.realizer))
        f = [SY.r[lifted.f[secX[c]]] for c in range(SX.space.n)]
        return MetArrow(SX.space, SY.space, f, lifted.realizer)

    return MonadInstance("T(P_S)", obj, unit, extend, base.unit_realizer)


def monad_ops(tag: str) -> MonadInstance:
    if tag == "P_Q":
        return _pq_ops()
    if tag == "P_S":
        return _ps_ops()
    if tag in ("T(P_S)", "transformed"):
        return _transformed_ops()
    raise ValueError(f"unknown monad {tag!r}")


def transformed_monad(m: MonadInstance, alt_section: bool = False) -> MonadInstance:
    if m.tag != "P_S":
        raise HypothesisViolation("the transformer is applied to P_S")
    return _transformed_ops(m, alt_section)


def kleisli_realizer_ok(m: MonadInstance, k: KleisliArrow) -> bool:
    """Check the stored realizer of ``k`` into ``M(base)``."""
    T = m.obj(k.base)
    X = k.source
    h = QuantaleMorphism(X.q, T.q, list(k.realizer), "lax_unital")
    return MetArrow(X, T, list(k.f), h).check_realizer()


def random_kleisli(rng, m: MonadInstance, X: QMetricSpace, Y: QMetricSpace, tries: int = 40):
    """A random Kleisli arrow ``X -> M(Y)`` whose greatest realizer is lax-unital."""
    T = m.obj(Y)
    for _ in range(tries):
        f = [rng.below(T.n) for _ in range(X.n)]
        if m.tag == "P_Q":
            real = list(X.q.elements())
            h = QuantaleMorphism(X.q, T.q, real, "lax_unital")
            if not MetArrow(X, T, f, h).check_realizer():
                continue
        else:
            g = greatest_realizer(f, X, T)
            if not T.q.leq(T.q.unit, g(X.q.unit)):
                continue
            real = list(g.mapping)
        return KleisliArrow(X, Y, tuple(f), real)
    return None


@dataclass
class LawReport:
    counts: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    @property
    def instances(self) -> int:
        return sum(self.counts.values())

    def record(self, law: str, ok: bool, witness=None):
        self.counts[law] = self.counts.get(law, 0) + 1
        if not ok:
            self.failures.append((law, witness))


def _arrow_ok(a: MetArrow) -> bool:
    """Stored realizer works and the greatest realizer is lax-unital."""
    g = greatest_realizer(list(a.f), a.source, a.target)
    return a.check_realizer() and a.target.q.leq(a.target.q.unit, g(a.source.q.unit))


def verify_monad_laws(m: MonadInstance, spaces: Sequence[QMetricSpace], arrows: Sequence[tuple], rep: LawReport | None = None) -> LawReport:
    """Kleisli-triple equations, arrow-ness of extensions and enrichment.

    ``arrows`` holds pairs ``(f, g)`` of Kleisli arrows with ``f: X -> MY``
    and ``g: Y -> MZ``; either may be ``None``.
    """
    rep = rep or LawReport()
    for X in spaces:
        u = m.unit(X)
        rep.record("unit is an arrow", kleisli_realizer_ok(m, u), X.name)
        e = m.extend(u)
        rep.record("eta* = id", list(e.f) == list(range(m.obj(X).n)), X.name)
    for f, g in arrows:
        for k in (f, g):
            if k is None:
                continue
            ek = m.extend(k)
            u = m.unit(k.source)
            rep.record("f* . eta = f", tuple(ek.f[p] for p in u.f) == tuple(k.f), k.f)
            rep.record("f* is an arrow", _arrow_ok(ek), k.f)
        if f is None or g is None:
            continue
        ef, eg = m.extend(f), m.extend(g)
        gf = m.compose(eg, f, g.base)
        lhs = [eg.f[p] for p in ef.f]
        rhs = list(m.extend(gf).f)
        rep.record("g* . f* = (g* . f)*", lhs == rhs, (f.f, g.f))
    return rep


def verify_enrichment(m: MonadInstance, pairs: Sequence[tuple], rep: LawReport | None = None) -> LawReport:
    """``f1 <= f2`` pointwise implies ``f1* <= f2*``; pairs not ordered are skipped."""
    rep = rep or LawReport()
    for f1, f2 in pairs:
        T = m.obj(f1.base)
        if not hom_leq(f1.f, f2.f, T):
            continue
        e1, e2 = m.extend(f1), m.extend(f2)
        rep.record("extension is monotone", hom_leq(e1.f, e2.f, e1.target), (f1.f, f2.f))
    return rep


def ordered_variant(rng, m: MonadInstance, k: KleisliArrow) -> KleisliArrow | None:
    """An arrow below ``k`` in the hom-preorder, when the random draw gives one."""
    T = m.obj(k.base)
    pre = d_preorder(T)
    f = []
    for p in k.f:
        below = [a for a in range(T.n) if pre[a, p]]
        f.append(rng.choice(below))
    X = k.source
    if m.tag == "P_Q":
        real = list(X.q.elements())
        if not MetArrow(X, T, f, QuantaleMorphism(X.q, T.q, real, "lax_unital")).check_realizer():
            return None
        return KleisliArrow(X, k.base, tuple(f), real)
    g = greatest_realizer(f, X, T)
    if not T.q.leq(T.q.unit, g(X.q.unit)):
        return None
    return KleisliArrow(X, k.base, tuple(f), list(g.mapping))


def section_independence(m: MonadInstance, arrows: Sequence[KleisliArrow]) -> bool:
    """Extensions through the closure section and the least-subset section agree."""
    other = transformed_monad(_ps_ops(), alt_section=True)
    return all(list(m.extend(k).f) == list(other.extend(k).f) for k in arrows)


# ---------------------------------------------------------------- the C_S monad


def cs_unit(Q: TableQuantale) -> list:
    C = scott_closed_quantale(Q)
    return [eta_C(C, v) for v in Q.elements()]


def cs_extend(Q: TableQuantale, Q2: TableQuantale, g: Sequence[int]) -> list:
    return kleisli_C(scott_closed_quantale(Q), scott_closed_quantale(Q2), g)


def random_cs_arrow(rng, Q: TableQuantale, Q2: TableQuantale, cap: int = 1 << 16) -> list | None:
    """A random monotone lax-unital map ``Q -> C_S(Q2)``."""
    C2 = scott_closed_quantale(Q2)
    key = ("cs_maps", Q.name, Q2.name)
    maps = _CS_MAPS.get(key)
    if maps is None:
        maps = [h for h in monotone_maps(Q.poset, C2, cap) if C2.leq(C2.unit, h[Q.unit])]
        _CS_MAPS[key] = maps
    return list(rng.choice(maps)) if maps else None


_CS_MAPS: dict = {}


def verify_cs_laws(Q: TableQuantale, Q2: TableQuantale, Q3: TableQuantale, arrows: Sequence[tuple], rep: LawReport | None = None) -> LawReport:
    """Kleisli laws, morphism class and enrichment for ``C_S`` on table arrows.

    ``arrows`` holds ``(g1, g2, h)`` with ``g1, g2: Q -> C(Q2)`` and ``h: Q2 -> C(Q3)``.
    """
    rep = rep or LawReport()
    C, C2 = scott_closed_quantale(Q), scott_closed_quantale(Q2)
    eta = cs_unit(Q)
    rep.record("eta* = id", cs_extend(Q, Q, eta) == list(C.elements()), Q.name)
    for g1, g2, h in arrows:
        e1 = cs_extend(Q, Q2, g1)
        rep.record("g* . eta = g", [e1[e] for e in eta] == list(g1), g1)
        hm = QuantaleMorphism(C, C2, e1, "join_preserving")
        rep.record("g* is join-preserving and lax-unital", verify_morphism(hm).checks["join_preserving"] and verify_morphism(hm).checks["lax_unital"], g1)
        eh = cs_extend(Q2, Q3, h)
        lhs = [eh[a] for a in e1]
        rhs = cs_extend(Q, Q3, [eh[a] for a in g1])
        rep.record("h* . g* = (h* . g)*", lhs == rhs, (g1, h))
        if all(C2.leq(a, b) for a, b in zip(g1, g2)):
            e2 = cs_extend(Q, Q2, g2)
            rep.record("extension is monotone", all(C2.leq(a, b) for a, b in zip(e1, e2)), (g1, g2))
    return rep
