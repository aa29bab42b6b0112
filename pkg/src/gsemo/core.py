"""Subsets, bi-objective vectors, dominance and the size-indexed Pareto archive.

A subset of the ground set ``{0, ..., n-1}`` is a boolean vector.  GSEMO
optimises the pair ``(f(x), -|x|)``, so two solutions are comparable on the
second objective through their sizes alone; the archive exploits this by
keeping at most one solution per size.
"""
from __future__ import annotations

from typing import Iterable, Iterator, NamedTuple, Optional, Sequence

import numpy as np

from .errors import InvariantError


class GroundSet:
    """The ground set ``V`` with ``n`` elements and optional display labels."""

    def __init__(self, n: int, labels: Optional[Sequence[str]] = None):
        if int(n) != n or n < 1:
            raise ValueError(f"ground set needs n >= 1, got {n!r}")
        self.n = int(n)
        if labels is not None:
            labels = [str(s) for s in labels]
            if len(labels) != self.n:
                raise ValueError(f"expected {self.n} labels, got {len(labels)}")
        self.labels = labels

    def label(self, i: int) -> str:
        return self.labels[i] if self.labels is not None else f"v{i}"

    def __repr__(self):
        return f"GroundSet(n={self.n})"


class ObjectiveVector(NamedTuple):
    value: float
    neg_size: int


def weakly_dominates(a: ObjectiveVector, b: ObjectiveVector) -> bool:
    return a.value >= b.value and a.neg_size >= b.neg_size


def dominates(a: ObjectiveVector, b: ObjectiveVector) -> bool:
    return weakly_dominates(a, b) and (a.value > b.value or a.neg_size > b.neg_size)


class Solution:
    """An immutable bit vector with its size and (optionally) its cached f-value."""

    __slots__ = ("bits", "size", "value")

    def __init__(self, bits, value: Optional[float] = None):
        arr = np.array(bits, dtype=bool).reshape(-1)
        arr.setflags(write=False)
        self.bits = arr
        self.size = int(np.count_nonzero(arr))
        self.value = None if value is None else float(value)

    @classmethod
    def empty(cls, n: int) -> "Solution":
        return cls(np.zeros(n, dtype=bool))

    @classmethod
    def full(cls, n: int) -> "Solution":
        return cls(np.ones(n, dtype=bool))

    @classmethod
    def from_indices(cls, n: int, indices: Iterable[int], value=None) -> "Solution":
        bits = np.zeros(n, dtype=bool)
        for i in indices:
            if not 0 <= i < n:
                raise ValueError(f"element {i} outside ground set of size {n}")
            bits[i] = True
        return cls(bits, value)

    @classmethod
    def from_mask(cls, n: int, mask: int, value=None) -> "Solution":
        bits = np.array([(mask >> i) & 1 for i in range(n)], dtype=bool)
        return cls(bits, value)

    @classmethod
    def from_bitstring(cls, s: str, value=None) -> "Solution":
        if not s or set(s) - {"0", "1"}:
            raise ValueError(f"not a bitstring: {s!r}")
        return cls([c == "1" for c in s], value)

    @property
    def n(self) -> int:
        return self.bits.shape[0]

    @property
    def mask(self) -> int:
        """Integer with bit ``i`` set iff element ``i`` is selected."""
        out = 0
        for i in np.flatnonzero(self.bits):
            out |= 1 << int(i)
        return out

    @property
    def objectives(self) -> ObjectiveVector:
        if self.value is None:
            raise ValueError("solution has not been evaluated")
        return ObjectiveVector(self.value, -self.size)

    def indices(self) -> tuple:
        return tuple(int(i) for i in np.flatnonzero(self.bits))

    def with_value(self, value: float) -> "Solution":
        out = Solution.__new__(Solution)
        out.bits = self.bits
        out.size = self.size
        out.value = float(value)
        return out

    def to_bitstring(self) -> str:
        return "".join("1" if b else "0" for b in self.bits)

    def same_subset(self, other: "Solution") -> bool:
        return np.array_equal(self.bits, other.bits)

    def __eq__(self, other):
        if not isinstance(other, Solution):
            return NotImplemented
        return self.same_subset(other) and self.value == other.value

    def __hash__(self):
        return hash((self.bits.tobytes(), self.value))

    def __repr__(self):
        return f"Solution({self.to_bitstring()!r}, value={self.value})"


class ParetoArchive:
    """The GSEMO population, stored as ``n + 1`` slots indexed by subset size.

    Incomparable solutions cannot share a size, so a slot array holds the
    whole population.  With ``check=True`` every update is followed by an
    exhaustive invariant check (pairwise incomparability, slot sizes and
    permanence of the empty set).
    """

    def __init__(self, n: int, check: bool = False):
        if n < 1:
            raise ValueError("archive needs n >= 1")
        self.n = n
        self.slots: list = [None] * (n + 1)
        self.check = check
        self._had_empty = False

    def __len__(self):
        return sum(1 for s in self.slots if s is not None)

    def __iter__(self) -> Iterator[Solution]:
        return (s for s in self.slots if s is not None)

    def solutions(self) -> list:
        """Archived solutions in ascending size order (the selection order)."""
        return [s for s in self.slots if s is not None]

    def values(self) -> list:
        """Size-indexed summary: the stored value per slot, ``None`` if empty."""
        return [None if s is None else s.value for s in self.slots]

    def update(self, y: Solution, value: Optional[float] = None) -> bool:
        """Offer ``y`` to the archive; return whether it was accepted.

        ``y`` is rejected if an archived solution strictly dominates it.
        Otherwise every archived solution it weakly dominates is dropped
        (an equal objective vector is replaced) and ``y`` takes its size slot.
        """
        if value is not None:
            y = y.with_value(value)
        if y.n != self.n:
            raise ValueError(f"solution over n={y.n}, archive over n={self.n}")
        yv = y.objectives
        for z in self.slots:
            if z is not None and dominates(z.objectives, yv):
                return False
        for s, z in enumerate(self.slots):
            if z is not None and weakly_dominates(yv, z.objectives):
                self.slots[s] = None
        self.slots[y.size] = y
        if self.check:
            self.check_invariants()
        return True

    def best_feasible(self, k: Optional[int] = None) -> Solution:
        """Highest-valued archived solution of size at most ``k`` (all if None).

        Ties go to the smaller size.
        """
        limit = self.n if k is None else min(int(k), self.n)
        best = None
        for s in range(limit + 1):
            z = self.slots[s]
            if z is not None and (best is None or z.value > best.value):
                best = z
        if best is None:
            raise InvariantError(f"archive holds no solution of size <= {limit}")
        return best

    def check_invariants(self):
        sols = []
        for s, z in enumerate(self.slots):
            if z is None:
                continue
            if z.size != s:
                raise InvariantError(f"slot {s} holds a solution of size {z.size}")
            sols.append(z)
        for i, a in enumerate(sols):
            for b in sols[i + 1:]:
                if weakly_dominates(a.objectives, b.objectives) or weakly_dominates(
                    b.objectives, a.objectives
                ):
                    raise InvariantError(f"comparable pair in archive: {a} / {b}")
        if self.slots[0] is not None:
            self._had_empty = True
        elif self._had_empty:
            raise InvariantError("empty set left the archive")
        if len(sols) > self.n + 1:
            raise InvariantError("archive larger than n + 1")
