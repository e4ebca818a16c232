"""Finite topological spaces on points ``0..n-1``; opens are bitmasks."""

from __future__ import annotations

import itertools
from typing import Iterable, Sequence

import numpy as np

from .errors import CapExceededError, OrderError
from .order import bits


class FinTopology:
    """A family of open subsets closed under union and intersection."""

    __slots__ = ("n", "opens", "full")

    def __init__(self, n: int, opens: Iterable[int], check: bool = True):
        self.n = n
        self.full = (1 << n) - 1
        self.opens = frozenset(int(o) for o in opens)
        if check:
            bad = self.violation()
            if bad:
                raise OrderError(f"not a topology: {bad}")

    def violation(self):
        if 0 not in self.opens:
            return "missing empty set"
        if self.full not in self.opens:
            return "missing whole space"
        ops = list(self.opens)
        for a in ops:
            if a & ~self.full:
                return f"open {a:#x} outside the space"
            for b in ops:
                if a | b not in self.opens:
                    return f"union of {a:#x} and {b:#x}"
                if a & b not in self.opens:
                    return f"intersection of {a:#x} and {b:#x}"
        return None

    def __eq__(self, other):
        return isinstance(other, FinTopology) and self.n == other.n and self.opens == other.opens

    def __hash__(self):
        return hash((self.n, self.opens))

    def __len__(self):
        return len(self.opens)

    def __contains__(self, mask):
        return mask in self.opens

    def __repr__(self):
        return f"FinTopology({self.n}, {sorted(self.opens)})"

    def sorted_opens(self) -> list[int]:
        return sorted(self.opens)

    def interior(self, mask: int) -> int:
        out = 0
        for o in self.opens:
            if o & ~mask == 0:
                out |= o
        return out

    def closure(self, mask: int) -> int:
        return self.full & ~self.interior(self.full & ~mask)

    def neighbourhood(self, x: int) -> int:
        """Smallest open containing ``x``."""
        out = self.full
        for o in self.opens:
            if o >> x & 1:
                out &= o
        return out

    def specialization(self) -> np.ndarray:
        """``spec[x, y]`` iff every open containing ``x`` contains ``y``."""
        m = np.zeros((self.n, self.n), dtype=bool)
        for x in range(self.n):
            nb = self.neighbourhood(x)
            for y in bits(nb):
                m[x, y] = True
        return m

    def is_T0(self) -> bool:
        s = self.specialization()
        off = s & s.T
        np.fill_diagonal(off, False)
        return not off.any()

    def is_subtopology_of(self, other: "FinTopology") -> bool:
        return self.opens <= other.opens


OPENS_CAP = 1 << 20


def generate(n: int, subbasis: Iterable[int], cap: int = OPENS_CAP) -> FinTopology:
    """Coarsest topology containing ``subbasis``."""
    full = (1 << n) - 1
    base = {full}
    for s in subbasis:
        s &= full
        base |= {b & s for b in base}
        base.add(s)
        if len(base) > cap:
            raise CapExceededError("basic opens", cap, len(base))
    opens = {0}
    for b in sorted(base):
        opens |= {o | b for o in opens}
        if len(opens) > cap:
            raise CapExceededError("opens", cap, len(opens))
    return FinTopology(n, opens, check=False)


def alexandrov(order: np.ndarray) -> FinTopology:
    """Up-sets of a preorder given as a boolean matrix."""
    n = order.shape[0]
    ups = [sum(1 << y for y in range(n) if order[x, y]) for x in range(n)]
    return generate(n, ups)


def discrete(n: int) -> FinTopology:
    return generate(n, [1 << i for i in range(n)])


def indiscrete(n: int) -> FinTopology:
    return FinTopology(n, {0, (1 << n) - 1})


def sierpinski() -> FinTopology:
    return FinTopology(2, {0, 1, 3})


def preimage(f: Sequence[int], mask: int) -> int:
    return sum(1 << x for x, fx in enumerate(f) if mask >> fx & 1)


def is_continuous(f: Sequence[int], src: FinTopology, dst: FinTopology) -> bool:
    return all(preimage(f, o) in src.opens for o in dst.opens)


def all_topologies(n: int, cap: int = 1 << 16) -> list[FinTopology]:
    """Every topology on ``n`` labeled points, by testing all candidate families."""
    full = (1 << n) - 1
    middle = list(range(1, full))
    if 1 << len(middle) > cap:
        raise CapExceededError("candidate families", cap, 1 << len(middle))
    out = []
    if n == 0:
        return [FinTopology(0, {0})]
    for choice in range(1 << len(middle)):
        fam = {0, full} | {m for i, m in enumerate(middle) if choice >> i & 1}
        ok = True
        for a in fam:
            for b in fam:
                if a | b not in fam or a & b not in fam:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.append(FinTopology(n, fam, check=False))
    return sorted(out, key=lambda t: (len(t), sorted(t.opens)))


def all_topologies_by_closure(n: int) -> set[FinTopology]:
    """Every topology on ``n`` points as the closure of some family of subsets."""
    full = (1 << n) - 1
    subsets = list(range(full + 1))
    seen = set()
    for choice in range(1 << len(subsets)):
        seen.add(generate(n, (s for i, s in enumerate(subsets) if choice >> i & 1)))
    return seen


def all_topologies_by_preorder(n: int) -> set[FinTopology]:
    """Alexandrov topologies of all preorders on ``n`` points."""
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    seen = set()
    for choice in range(1 << len(pairs)):
        m = np.eye(n, dtype=bool)
        for b, (i, j) in enumerate(pairs):
            if choice >> b & 1:
                m[i, j] = True
        closed = m.copy()
        for k in range(n):
            closed |= closed[:, k : k + 1] & closed[k : k + 1, :]
        if np.array_equal(closed, m):
            seen.add(alexandrov(m))
    return seen


def random_topology(rng, n: int, k: int = 3) -> FinTopology:
    full = (1 << n) - 1
    return generate(n, [rng.below(full + 1) for _ in range(k)])


def serialize(t: FinTopology, labels: Sequence[str] | None = None) -> str:
    labels = labels or [str(i) for i in range(t.n)]
    parts = ["{" + ",".join(labels[i] for i in bits(o)) + "}" for o in t.sorted_opens()]
    return " ".join(parts)
