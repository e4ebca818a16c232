"""Finite posets and lattices.

Elements are addressed by index ``0..n-1``; labels are kept for display and
parsing.  Subsets of a poset are Python ints used as bitmasks.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Sequence

import numpy as np

from .errors import ArityError, CapExceededError, NotALatticeError, OrderError, UnknownSymbolError

DEFAULT_CAP = 100_000


def bits(mask: int):
    """Indices of set bits, ascending."""
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def popcount(mask: int) -> int:
    return bin(mask).count("1")


class FinPoset:
    """A finite partial order given by a boolean ``leq`` matrix."""

    def __init__(self, elements: Sequence[Hashable], leq, check: bool = True):
        self.elements = tuple(elements)
        self.leq_matrix = np.array(leq, dtype=bool)
        self.leq_matrix.setflags(write=False)
        n = len(self.elements)
        if self.leq_matrix.shape != (n, n):
            raise OrderError(f"order matrix has shape {self.leq_matrix.shape}, expected {(n, n)}")
        self._index = {e: i for i, e in enumerate(self.elements)}
        if len(self._index) != n:
            raise OrderError("element labels must be distinct")
        if check:
            self._check()
        m = self.leq_matrix
        self.down = tuple(sum(1 << i for i in range(n) if m[i, j]) for j in range(n))
        self.up = tuple(sum(1 << j for j in range(n) if m[i, j]) for i in range(n))
        self.full = (1 << n) - 1

    def _check(self):
        m = self.leq_matrix
        n = len(self)
        if not m.diagonal().all():
            raise OrderError("order is not reflexive")
        anti = m & m.T
        np.fill_diagonal(anti, False)
        if anti.any():
            i, j = map(int, np.argwhere(anti)[0])
            raise OrderError(f"order is not antisymmetric at {self.elements[i]!r}, {self.elements[j]!r}")
        mi = m.astype(np.int64)
        if n and ((mi @ mi > 0) & ~m).any():
            raise OrderError("order is not transitive")

    # construction helpers
    @classmethod
    def from_relation(cls, elements, pairs: Iterable[tuple]) -> "FinPoset":
        """Reflexive-transitive closure of ``pairs`` (given as label pairs)."""
        elements = list(elements)
        idx = {e: i for i, e in enumerate(elements)}
        n = len(elements)
        m = np.eye(n, dtype=bool)
        for a, b in pairs:
            m[idx[a], idx[b]] = True
        for k in range(n):
            m |= m[:, k : k + 1] & m[k : k + 1, :]
        return cls(elements, m)

    @classmethod
    def from_leq(cls, elements, leq: Callable) -> "FinPoset":
        elements = list(elements)
        return cls(elements, [[bool(leq(a, b)) for b in elements] for a in elements])

    # basic queries
    def __len__(self):
        return len(self.elements)

    def __repr__(self):
        return f"FinPoset({list(self.elements)!r})"

    def __eq__(self, other):
        return (
            isinstance(other, FinPoset)
            and self.elements == other.elements
            and np.array_equal(self.leq_matrix, other.leq_matrix)
        )

    def __hash__(self):
        return hash((self.elements, self.leq_matrix.tobytes()))

    def index(self, label) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise UnknownSymbolError(f"unknown element {label!r}") from None

    def label(self, i: int):
        return self.elements[i]

    def leq(self, i: int, j: int) -> bool:
        return bool(self.leq_matrix[i, j])

    def lt(self, i: int, j: int) -> bool:
        return i != j and bool(self.leq_matrix[i, j])

    def upper_bounds(self, S: Iterable[int]) -> int:
        ub = self.full
        for s in S:
            ub &= self.up[s]
        return ub

    def lower_bounds(self, S: Iterable[int]) -> int:
        lb = self.full
        for s in S:
            lb &= self.down[s]
        return lb

    def least(self, mask: int):
        for u in bits(mask):
            if mask & ~self.up[u] == 0:
                return u
        return None

    def greatest(self, mask: int):
        for u in bits(mask):
            if mask & ~self.down[u] == 0:
                return u
        return None

    def join(self, S: Iterable[int]):
        """Least upper bound of ``S`` or ``None``; the join of nothing is bottom."""
        return self.least(self.upper_bounds(S))

    def meet(self, S: Iterable[int]):
        return self.greatest(self.lower_bounds(S))

    def joins_meets(self, S: Iterable[int], which: str = "join"):
        if which == "join":
            return self.join(S)
        if which == "meet":
            return self.meet(S)
        raise ValueError(which)

    @property
    def bottom(self):
        return self.join(())

    @property
    def top(self):
        return self.meet(())

    def is_lattice(self) -> bool:
        """True iff complete; for finite posets: bottom plus all binary joins."""
        if len(self) == 0 or self.bottom is None:
            return False
        n = len(self)
        return all(self.join((i, j)) is not None for i in range(n) for j in range(i + 1, n))

    def require_lattice(self):
        if not self.is_lattice():
            raise NotALatticeError(f"{self!r} is not a complete lattice")

    def is_chain(self) -> bool:
        m = self.leq_matrix
        return bool((m | m.T).all())

    def join_table(self) -> np.ndarray:
        self.require_lattice()
        n = len(self)
        return np.array([[self.join((i, j)) for j in range(n)] for i in range(n)], dtype=np.int64)

    def meet_table(self) -> np.ndarray:
        self.require_lattice()
        n = len(self)
        return np.array([[self.meet((i, j)) for j in range(n)] for i in range(n)], dtype=np.int64)

    # lower sets
    def downclose(self, mask: int) -> int:
        out = 0
        for i in bits(mask):
            out |= self.down[i]
        return out

    def upclose(self, mask: int) -> int:
        out = 0
        for i in bits(mask):
            out |= self.up[i]
        return out

    def is_lower(self, mask: int) -> bool:
        return self.downclose(mask) == mask

    def maximal(self, mask: int) -> int:
        """Maximal elements of the subset ``mask``."""
        out = 0
        for i in bits(mask):
            if mask & self.up[i] == 1 << i:
                out |= 1 << i
        return out

    def lower_sets(self, cap: int = DEFAULT_CAP) -> list[int]:
        """All lower sets as masks, sorted by (size, mask)."""
        seen = {0}
        frontier = [0]
        while frontier:
            nxt = []
            for s in frontier:
                for m in bits(self.full & ~s):
                    if self.down[m] & ~(1 << m) & ~s == 0:
                        t = s | (1 << m)
                        if t not in seen:
                            seen.add(t)
                            if len(seen) > cap:
                                raise CapExceededError("lower sets", cap)
                            nxt.append(t)
            frontier = nxt
        return sorted(seen, key=lambda s: (popcount(s), s))

    def linear_extension(self) -> list[int]:
        return sorted(range(len(self)), key=lambda i: (popcount(self.down[i]), i))

    def mask_labels(self, mask: int) -> str:
        return "[" + "|".join(str(self.elements[i]) for i in bits(mask)) + "]"

    def opposite(self) -> "FinPoset":
        return FinPoset(self.elements, self.leq_matrix.T, check=False)


# ---------------------------------------------------------------- shapes


def chain(n: int, labels=None) -> FinPoset:
    labels = list(range(n)) if labels is None else list(labels)
    return FinPoset(labels, np.triu(np.ones((n, n), dtype=bool)))


def antichain(k: int, labels=None) -> FinPoset:
    labels = [f"a{i}" for i in range(k)] if labels is None else list(labels)
    return FinPoset(labels, np.eye(k, dtype=bool))


def diamond() -> FinPoset:
    return FinPoset.from_relation(["bot", "a", "b", "top"], [("bot", "a"), ("bot", "b"), ("a", "top"), ("b", "top")])


def m3() -> FinPoset:
    atoms = ["a", "b", "c"]
    return FinPoset.from_relation(["bot", *atoms, "top"], [("bot", x) for x in atoms] + [(x, "top") for x in atoms])


def n5() -> FinPoset:
    return FinPoset.from_relation(
        ["bot", "a", "b", "c", "top"], [("bot", "a"), ("a", "b"), ("b", "top"), ("bot", "c"), ("c", "top")]
    )


def product_poset(p: FinPoset, q: FinPoset) -> FinPoset:
    els = [(a, b) for a in p.elements for b in q.elements]
    m = np.kron(p.leq_matrix.astype(np.int8), q.leq_matrix.astype(np.int8)).astype(bool)
    return FinPoset(els, m, check=False)


# ---------------------------------------------------------------- way-below


def way_below(L: FinPoset, x: int, y: int) -> bool:
    """``x << y``; on a finite lattice this is ``x <= y``."""
    L.require_lattice()
    return L.leq(x, y)


def totally_below(L: FinPoset, x: int, y: int) -> bool:
    """``x <<< y`` via ``y`` not below the join of everything not above ``x``."""
    L.require_lattice()
    rest = L.full & ~L.up[x]
    return not L.leq(y, L.join(bits(rest)))


def _subsets(n: int):
    return range(1 << n)


def is_directed(L: FinPoset, mask: int) -> bool:
    if mask == 0:
        return False
    members = list(bits(mask))
    return all(L.upper_bounds((a, b)) & mask for a in members for b in members)


def _below_quantified(L: FinPoset, x: int, y: int, only_directed: bool) -> bool:
    L.require_lattice()
    for D in _subsets(len(L)):
        if only_directed and not is_directed(L, D):
            continue
        if L.leq(y, L.join(bits(D))) and not (D & L.up[x]):
            return False
    return True


def way_below_oracle(L: FinPoset, x: int, y: int) -> bool:
    """Quantifier definition over every directed subset."""
    return _below_quantified(L, x, y, True)


def totally_below_oracle(L: FinPoset, x: int, y: int) -> bool:
    """Quantifier definition over every subset."""
    return _below_quantified(L, x, y, False)


@dataclass(frozen=True)
class LatticeClass:
    continuous: bool
    algebraic: bool
    prime_continuous: bool
    prime_algebraic: bool
    compact_elements: frozenset
    prime_elements: frozenset


def classify_lattice(L: FinPoset, oracle: bool = False) -> LatticeClass:
    """Continuity/algebraicity flags from their defining joins.

    With ``oracle=True`` the relations come from the quantifier definitions.
    """
    L.require_lattice()
    wb = way_below_oracle if oracle else way_below
    tb = totally_below_oracle if oracle else totally_below
    n = len(L)
    W = [[wb(L, x, y) for y in range(n)] for x in range(n)]
    T = [[tb(L, x, y) for y in range(n)] for x in range(n)]
    compact = frozenset(x for x in range(n) if W[x][x])
    prime = frozenset(x for x in range(n) if T[x][x])

    def reaches(rel, pool):
        return all(L.join(x for x in pool if rel[x][y]) == y for y in range(n))

    cont = reaches(W, range(n))
    alg = reaches(W, compact)
    pcont = reaches(T, range(n))
    palg = reaches(T, prime)
    assert cont and alg, "finite lattices are continuous and algebraic"
    return LatticeClass(cont, alg, pcont, palg, compact, prime)


# ---------------------------------------------------------------- lower sets


class LowerSet:
    """Down-closed subset presented by its generator antichain.

    ``leq`` is the order oracle of a possibly unmaterialized poset; the
    generators are reduced to their maximal elements on construction.
    """

    __slots__ = ("gens", "leq")

    def __init__(self, gens: Iterable, leq: Callable):
        gens = set(gens)
        self.leq = leq
        self.gens = frozenset(g for g in gens if not any(h != g and leq(g, h) for h in gens))

    @classmethod
    def from_mask(cls, P: FinPoset, mask: int) -> "LowerSet":
        if not P.is_lower(mask):
            raise OrderError(f"{P.mask_labels(mask)} is not down-closed")
        return cls(bits(P.maximal(mask)), P.leq)

    def to_mask(self, P: FinPoset) -> int:
        return P.downclose(sum(1 << g for g in self.gens))

    def __contains__(self, x) -> bool:
        return any(self.leq(x, g) for g in self.gens)

    def issubset(self, other: "LowerSet") -> bool:
        return all(g in other for g in self.gens)

    __le__ = issubset

    def union(self, other: "LowerSet") -> "LowerSet":
        return LowerSet(self.gens | other.gens, self.leq)

    def __eq__(self, other):
        return isinstance(other, LowerSet) and self.gens == other.gens

    def __hash__(self):
        return hash(self.gens)

    def __repr__(self):
        return f"LowerSet({sorted(self.gens, key=repr)!r})"


@dataclass
class LowerSetLattice:
    """``D(P)``: lower sets of ``base`` ordered by inclusion."""

    base: FinPoset
    masks: list
    poset: FinPoset
    index_of: dict = field(repr=False)

    def eta(self, p: int) -> int:
        return self.index_of[self.base.down[p]]

    def mask(self, i: int) -> int:
        return self.masks[i]

    def of_mask(self, mask: int) -> int:
        return self.index_of[mask]

    def __len__(self):
        return len(self.masks)


def lower_set_lattice(P: FinPoset, cap: int = DEFAULT_CAP) -> LowerSetLattice:
    masks = P.lower_sets(cap)
    idx = {m: i for i, m in enumerate(masks)}
    arr = np.array(masks, dtype=object)
    sub = np.array([[(a & ~b) == 0 for b in masks] for a in masks], dtype=bool) if len(arr) else np.zeros((0, 0), bool)
    poset = FinPoset([P.mask_labels(m) for m in masks], sub, check=False)
    return LowerSetLattice(P, masks, poset, idx)


def lift_operation(P: FinPoset, op: Callable, arity: int) -> Callable:
    """``o^(T1..Tk) = down{o(t) | t in T1 x .. x Tk}`` on lower-set masks."""

    def lifted(*masks: int) -> int:
        if len(masks) != arity:
            raise ArityError(f"expected {arity} arguments, got {len(masks)}")
        out = 0
        for theta in itertools.product(*(list(bits(m)) for m in masks)):
            out |= P.down[op(*theta)]
        return out

    return lifted


# ---------------------------------------------------------------- term algebras


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class App:
    op: str
    args: tuple


def term_vars(t) -> list:
    """Variable occurrences, left to right."""
    if isinstance(t, Var):
        return [t.name]
    return [v for a in t.args for v in term_vars(a)]


def is_linear(t) -> bool:
    vs = term_vars(t)
    return len(vs) == len(set(vs))


_TOKEN = re.compile(r"\s*(?:(?P<name>[A-Za-z0-9_]+)|(?P<sym>[(),*]))")


def parse_term(text: str, nullary: Iterable[str] = ()):
    """Parse ``f(x, g(y))`` / ``x * y`` terms.  ``*`` is the operation named ``*``.

    Bare names listed in ``nullary`` become constants, other names variables.
    """
    nullary = set(nullary)
    toks = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"bad term {text!r} at column {pos + 1}")
        toks.append(m.group("name") or m.group("sym"))
        pos = m.end()
    toks.append(None)
    i = 0

    def peek():
        return toks[i]

    def take(expected=None):
        nonlocal i
        t = toks[i]
        if expected is not None and t != expected:
            raise ValueError(f"bad term {text!r}: expected {expected!r}, got {t!r}")
        i += 1
        return t

    def product():
        left = atom()
        while peek() == "*":
            take()
            left = App("*", (left, atom()))
        return left

    def atom():
        t = take()
        if t == "(":
            e = product()
            take(")")
            return e
        if t is None or t in "(),*":
            raise ValueError(f"bad term {text!r}: unexpected {t!r}")
        if peek() == "(":
            take()
            args = []
            if peek() != ")":
                args.append(product())
                while peek() == ",":
                    take()
                    args.append(product())
            take(")")
            return App(t, tuple(args))
        if t in nullary:
            return App(t, ())
        return Var(t)

    out = product()
    if peek() is not None:
        raise ValueError(f"bad term {text!r}: trailing {peek()!r}")
    return out


class TermAlgebra:
    """A poset with named monotone operations given as index tables."""

    def __init__(self, carrier: FinPoset, operations: dict):
        self.carrier = carrier
        self.ops = {}
        for name, table in operations.items():
            t = np.asarray(table, dtype=np.int64)
            self.ops[name] = t
            self._check_monotone(name, t)

    @classmethod
    def from_functions(cls, carrier: FinPoset, ops: dict) -> "TermAlgebra":
        """``ops``: name -> (arity, callable on indices)."""
        n = len(carrier)
        tables = {}
        for name, (k, fn) in ops.items():
            tables[name] = np.array(
                [fn(*t) for t in itertools.product(range(n), repeat=k)], dtype=np.int64
            ).reshape((n,) * k)
        return cls(carrier, tables)

    def arity(self, name: str) -> int:
        return self.ops[name].ndim

    def _check_monotone(self, name, t):
        P = self.carrier
        m = P.leq_matrix
        for axis in range(t.ndim):
            for a in range(len(P)):
                for b in range(len(P)):
                    if a != b and m[a, b]:
                        lo = np.take(t, a, axis=axis)
                        hi = np.take(t, b, axis=axis)
                        if not m[lo, hi].all():
                            raise OrderError(f"operation {name!r} is not monotone in argument {axis}")

    def parse(self, text: str):
        t = parse_term(text, [k for k, v in self.ops.items() if v.ndim == 0])
        self._resolve(t)
        return t

    def _resolve(self, t):
        if isinstance(t, App):
            if t.op not in self.ops:
                raise UnknownSymbolError(f"unknown operation symbol {t.op!r}")
            if self.arity(t.op) != len(t.args):
                raise ArityError(f"{t.op!r} takes {self.arity(t.op)} arguments, got {len(t.args)}")
            for a in t.args:
                self._resolve(a)

    def lift(self, cap: int = DEFAULT_CAP) -> tuple["TermAlgebra", LowerSetLattice]:
        """The lifted algebra on ``D(carrier)``."""
        D = lower_set_lattice(self.carrier, cap)
        P = self.carrier
        tables = {}
        for name, t in self.ops.items():
            k = t.ndim
            lifted = lift_operation(P, lambda *a, _t=t: int(_t[a]), k)
            vals = [D.of_mask(lifted(*(D.masks[j] for j in js))) for js in itertools.product(range(len(D)), repeat=k)]
            tables[name] = np.array(vals, dtype=np.int64).reshape((len(D),) * k)
        return TermAlgebra(D.poset, tables), D


def evaluate_all(alg: TermAlgebra, t, variables: Sequence[str]) -> np.ndarray:
    """Value of ``t`` at every environment, as an array with one axis per variable."""
    n = len(alg.carrier)
    k = len(variables)
    pos = {v: i for i, v in enumerate(variables)}

    def ev(s):
        if isinstance(s, Var):
            shape = [1] * k
            shape[pos[s.name]] = n
            return np.arange(n, dtype=np.int64).reshape(shape)
        args = [ev(a) for a in s.args]
        table = alg.ops[s.op]
        if not args:
            return np.full((1,) * k, int(table), dtype=np.int64)
        return table[tuple(np.broadcast_arrays(*args))]

    return np.broadcast_to(ev(t), (n,) * k)


def _first_failure(alg: TermAlgebra, e1, e2, variables):
    v1 = evaluate_all(alg, e1, variables)
    v2 = evaluate_all(alg, e2, variables)
    bad = ~alg.carrier.leq_matrix[v1, v2]
    if not bad.any():
        return None
    where = tuple(int(i) for i in np.argwhere(bad)[0])
    return {v: alg.carrier.label(i) for v, i in zip(variables, where)}


@dataclass
class InequationReport:
    holds_in_A: bool
    holds_in_lift: bool
    linearity_ok: bool
    counterexample: dict | None = None
    counterexample_in: str | None = None


def check_inequation_lift(A: TermAlgebra, e1, e2, cap: int = DEFAULT_CAP) -> InequationReport:
    """Evaluate ``e1 <= e2`` in ``A`` and in its lower-set lift.

    ``linearity_ok`` is the hypothesis of the preservation result: ``e1``
    linear and every variable of ``e2`` occurring in ``e1``.
    """
    if isinstance(e1, str):
        e1 = A.parse(e1)
    if isinstance(e2, str):
        e2 = A.parse(e2)
    A._resolve(e1)
    A._resolve(e2)
    variables = sorted(set(term_vars(e1)) | set(term_vars(e2)))
    hyp = is_linear(e1) and set(term_vars(e2)) <= set(term_vars(e1))
    base = _first_failure(A, e1, e2, variables)
    lifted, _ = A.lift(cap)
    up = _first_failure(lifted, e1, e2, variables)
    rep = InequationReport(base is None, up is None, hyp)
    if base is not None:
        rep.counterexample, rep.counterexample_in = base, "base"
    elif up is not None:
        rep.counterexample, rep.counterexample_in = up, "lift"
    if hyp and rep.holds_in_A and not rep.holds_in_lift:
        raise AssertionError(f"lift lost a preserved inequation; environment {up}")
    return rep


# inequations discussed alongside the preservation result; pairs (lhs, rhs)
PRESERVED_INEQUATIONS = [
    ("x * 1", "x"),
    ("x", "x * 1"),
    ("1 * x", "x"),
    ("x", "1 * x"),
    ("x * y", "y * x"),
    ("x * (y * z)", "(x * y) * z"),
    ("(x * y) * z", "x * (y * z)"),
    ("x * y", "meet(x, y)"),
    ("meet(x, y)", "x * y"),
    ("x", "1"),
    ("x", "x * x"),
]
UNPRESERVED_INEQUATIONS = [("1", "x"), ("x * x", "x"), ("x * x", "1")]


# ---------------------------------------------------------------- enumeration


def enumerate_lattices(n: int) -> list[FinPoset]:
    """All lattices with ``n`` elements up to isomorphism (``n <= 7``)."""
    if n < 1:
        return []
    if n == 1:
        return [FinPoset([0], [[True]])]
    inner = n - 2
    pairs = [(i, j) for i in range(inner) for j in range(i + 1, inner)]
    seen = set()
    out = []
    for choice in range(1 << len(pairs)):
        m = np.eye(n, dtype=bool)
        m[0, :] = True
        m[:, n - 1] = True
        for b, (i, j) in enumerate(pairs):
            if choice >> b & 1:
                m[i + 1, j + 1] = True
        closed = m.copy()
        for k in range(n):
            closed |= closed[:, k : k + 1] & closed[k : k + 1, :]
        if not np.array_equal(closed, m):
            continue
        P = FinPoset(range(n), m, check=False)
        if not P.is_lattice():
            continue
        key = min(
            m[np.ix_(perm, perm)].tobytes()
            for perm in ([0, *(p + 1 for p in q), n - 1] for q in itertools.permutations(range(inner)))
        )
        if key not in seen:
            seen.add(key)
            out.append(P)
    return out


def random_poset(rng, n: int, edge_num: int = 1, edge_den: int = 3, labels=None) -> FinPoset:
    labels = [f"p{i}" for i in range(n)] if labels is None else labels
    pairs = [(labels[i], labels[j]) for i in range(n) for j in range(i + 1, n) if rng.chance(edge_num, edge_den)]
    return FinPoset.from_relation(labels, pairs)


def random_monotone_op(rng, P: FinPoset, arity: int, tries: int = 50):
    """A random monotone table ``P^arity -> P`` (``None`` if none found)."""
    n = len(P)
    cells = sorted(itertools.product(range(n), repeat=arity), key=lambda c: sum(popcount(P.down[i]) for i in c))
    for _ in range(tries):
        table = {}
        ok = True
        for c in cells:
            allowed = P.full
            for d, v in table.items():
                if all(P.leq(a, b) for a, b in zip(d, c)):
                    allowed &= P.up[v]
                elif all(P.leq(b, a) for a, b in zip(d, c)):
                    allowed &= P.down[v]
            opts = list(bits(allowed))
            if not opts:
                ok = False
                break
            table[c] = rng.choice(opts)
        if ok:
            arr = np.zeros((n,) * arity, dtype=np.int64)
            for c, v in table.items():
                arr[c] = v
            return arr
    return None
