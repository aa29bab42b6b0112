"""Set-function oracles and the benchmark instance families.

Every oracle maps a boolean membership vector to a float.  ``oracle(x)``
counts the call; ``oracle.value(bits)`` is the uncounted evaluation used by
the engines, which keep their own per-run counters.

The Python evaluators accumulate in a fixed element/edge/item order that the
compiled kernels reproduce exactly, so both backends see bit-identical
values.
"""
from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .core import GroundSet, Solution

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _as_bits(x, n: int) -> np.ndarray:
    bits = x.bits if isinstance(x, Solution) else np.asarray(x, dtype=bool).reshape(-1)
    if bits.shape[0] != n:
        raise ValueError(f"subset of length {bits.shape[0]} for ground set of size {n}")
    return bits


class SetFunction(ABC):
    """Value oracle for ``f: 2^V -> R``.

    Subclasses set the declared properties ``monotone`` and ``nonnegative``
    and implement :meth:`value`.  A declared-monotone oracle must return 0 on
    the empty set.
    """

    monotone = False
    nonnegative = False

    def __init__(self, n: int, labels=None):
        self.ground = GroundSet(n, labels)
        self.calls = 0

    @property
    def n(self) -> int:
        return self.ground.n

    def __call__(self, x) -> float:
        bits = _as_bits(x, self.n)
        self.calls += 1
        return self.value(bits)

    evaluate = __call__

    @abstractmethod
    def value(self, bits: np.ndarray) -> float:
        """Uncounted evaluation on a boolean vector of length ``n``."""

    def compiled_kernel(self, K):
        """Compiled evaluator from the kernel module ``K``.

        Oracles without a native kernel are called back through Python.
        """
        return K.PyKernel(self, self.n)


class FunctionOracle(SetFunction):
    """Wrap a Python callable taking a boolean numpy vector."""

    def __init__(self, n, fn: Callable[[np.ndarray], float], *, monotone=False,
                 nonnegative=False, labels=None):
        super().__init__(n, labels)
        self.fn = fn
        self.monotone = monotone
        self.nonnegative = nonnegative

    def value(self, bits):
        return float(self.fn(bits))


class TabulatedFunction(SetFunction):
    """A set function given by its full value table, indexed by bitmask."""

    def __init__(self, table, *, monotone=False, nonnegative=False):
        table = np.asarray(table, dtype=np.float64)
        n = int(round(math.log2(table.shape[0])))
        if table.ndim != 1 or 1 << n != table.shape[0] or n < 1:
            raise ValueError("table length must be 2**n with n >= 1")
        super().__init__(n)
        self.table = table
        self.monotone = monotone
        self.nonnegative = nonnegative
        self._weights = 1 << np.arange(n, dtype=np.int64)

    def value(self, bits):
        return float(self.table[int(self._weights[bits].sum())])

    def compiled_kernel(self, K):
        return K.TableKernel(self.n, self.table)


class ModularFunction(SetFunction):
    """``f(X) = sum of w_i over i in X``; weights may be negative."""

    def __init__(self, weights: Sequence[float]):
        w = [float(x) for x in weights]
        super().__init__(len(w))
        self.weights = w
        self.nonnegative = all(x >= 0 for x in w)
        self.monotone = self.nonnegative

    def value(self, bits):
        total = 0.0
        for i, b in enumerate(bits.tolist()):
            if b:
                total += self.weights[i]
        return total

    def compiled_kernel(self, K):
        return K.ModularKernel(self.n, np.asarray(self.weights, dtype=np.float64))


# -- maximum cut --------------------------------------------------------------


@dataclass
class WeightedGraph:
    n: int
    edges: list = field(default_factory=list)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("graph needs at least one vertex")
        seen = set()
        clean = []
        for e in self.edges:
            u, v, w = int(e[0]), int(e[1]), float(e[2])
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) outside vertex range 0..{self.n - 1}")
            if u == v:
                raise ValueError(f"self loop at vertex {u}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            if not w >= 0:
                raise ValueError(f"negative or NaN weight on edge {key}")
            seen.add(key)
            clean.append((u, v, w))
        self.edges = clean

    @property
    def total_weight(self) -> float:
        return sum(w for _, _, w in self.edges)


class CutFunction(SetFunction):
    """Weight of the edges with exactly one endpoint in ``X``.

    Submodular, symmetric and non-negative; not monotone.
    """

    monotone = False
    nonnegative = True

    def __init__(self, graph: WeightedGraph, labels=None):
        super().__init__(graph.n, labels)
        self.graph = graph
        self._edges = list(graph.edges)

    def value(self, bits):
        b = bits.tolist()
        total = 0.0
        for u, v, w in self._edges:
            if b[u] != b[v]:
                total += w
        return total

    def compiled_kernel(self, K):
        e = self._edges
        return K.CutKernel(
            self.n,
            np.array([u for u, _, _ in e], dtype=np.intp),
            np.array([v for _, v, _ in e], dtype=np.intp),
            np.array([w for _, _, w in e], dtype=np.float64),
        )


# -- weighted coverage --------------------------------------------------------


@dataclass
class CoverageInstance:
    m: int
    covered_by: list
    weights: list

    def __post_init__(self):
        self.covered_by = [tuple(sorted(set(int(i) for i in c))) for c in self.covered_by]
        self.weights = [float(w) for w in self.weights]
        if not self.covered_by:
            raise ValueError("coverage instance needs at least one ground element")
        if len(self.weights) != self.m:
            raise ValueError(f"expected {self.m} item weights, got {len(self.weights)}")
        for e, c in enumerate(self.covered_by):
            for i in c:
                if not 0 <= i < self.m:
                    raise ValueError(f"element {e} covers item {i} outside 0..{self.m - 1}")
        if any(not w >= 0 for w in self.weights):
            raise ValueError("item weights must be non-negative")

    @property
    def n(self) -> int:
        return len(self.covered_by)


class CoverageFunction(SetFunction):
    """Total weight of the items covered by at least one selected element."""

    monotone = True
    nonnegative = True

    def __init__(self, inst: CoverageInstance, labels=None):
        super().__init__(inst.n, labels)
        self.instance = inst

    def value(self, bits):
        inst = self.instance
        covered = [False] * inst.m
        for e, b in enumerate(bits.tolist()):
            if b:
                for i in inst.covered_by[e]:
                    covered[i] = True
        total = 0.0
        for i in range(inst.m):
            if covered[i]:
                total += inst.weights[i]
        return total

    def compiled_kernel(self, K):
        inst = self.instance
        indptr = np.zeros(inst.n + 1, dtype=np.intp)
        indptr[1:] = np.cumsum([len(c) for c in inst.covered_by])
        items = np.array([i for c in inst.covered_by for i in c], dtype=np.intp)
        return K.CoverageKernel(self.n, inst.m, indptr, items,
                                np.asarray(inst.weights, dtype=np.float64))


# -- facility location --------------------------------------------------------


@dataclass
class FacilityLocationInstance:
    benefit: np.ndarray
    costs: np.ndarray = None

    def __post_init__(self):
        self.benefit = np.array(self.benefit, dtype=np.float64, ndmin=2)
        if self.benefit.ndim != 2 or self.benefit.shape[1] < 1:
            raise ValueError("benefit matrix must be customers x facilities")
        if self.costs is None:
            self.costs = np.zeros(self.benefit.shape[1])
        self.costs = np.array(self.costs, dtype=np.float64).reshape(-1)
        if self.costs.shape[0] != self.benefit.shape[1]:
            raise ValueError("one cost per facility required")
        if not (self.benefit >= 0).all() or not (self.costs >= 0).all():
            raise ValueError("benefits and costs must be non-negative")


class FacilityLocationFunction(SetFunction):
    """``sum_c max_{j in X} B[c, j] - sum_{j in X} cost[j]``.

    Without costs the function is monotone submodular.  With costs it is
    non-monotone; it is declared non-negative when ``sum(costs)`` is at most
    the smallest column sum of ``B`` or, for ``n <= 16``, when exhaustive
    evaluation finds no negative value.
    """

    def __init__(self, inst: FacilityLocationInstance, labels=None):
        super().__init__(inst.benefit.shape[1], labels)
        self.instance = inst
        self._rows = inst.benefit.tolist()
        self._costs = inst.costs.tolist()
        free = not any(self._costs)
        self.monotone = free
        if free or sum(self._costs) <= inst.benefit.sum(axis=0).min():
            self.nonnegative = True
        elif self.n <= 16:
            from .diagnostics import tabulate

            self.nonnegative = bool((tabulate(self) >= 0).all())
            self.calls = 0
        else:
            self.nonnegative = False

    def value(self, bits):
        members = [j for j, b in enumerate(bits.tolist()) if b]
        total = 0.0
        for row in self._rows:
            best = 0.0
            for j in members:
                if row[j] > best:
                    best = row[j]
            total += best
        for j in members:
            total -= self._costs[j]
        return total

    def compiled_kernel(self, K):
        inst = self.instance
        return K.FacilityKernel(self.n, np.ascontiguousarray(inst.benefit), inst.costs.copy())


# -- sparse regression ---------------------------------------------------------

PIVOT_TOL = 1e-10


class RegressionInstance:
    """Design matrix (observations x candidate variables) and target vector.

    Columns and target are mean-centred on construction unless
    ``center=False`` (for data that is already centred).
    """

    def __init__(self, design, target, center: bool = True):
        X = np.array(design, dtype=np.float64, ndmin=2)
        y = np.array(target, dtype=np.float64).reshape(-1)
        if X.shape[0] != y.shape[0]:
            raise ValueError(f"{X.shape[0]} design rows but {y.shape[0]} targets")
        if X.shape[0] < 1 or X.shape[1] < 1:
            raise ValueError("regression needs at least one row and one column")
        if center:
            X = X - X.mean(axis=0)
            y = y - y.mean()
        self.design = X
        self.target = y
        self.gram = X.T @ X
        self.xty = X.T @ y
        self.yy = float(y @ y)
        if not self.yy > 0:
            raise ValueError("degenerate target: zero variance")

    @property
    def n(self) -> int:
        return self.design.shape[1]


def _explained_fraction(gram, xty, yy, idx) -> float:
    # LDL^T elimination on the selected Gram block; a pivot that falls below
    # PIVOT_TOL times its diagonal marks a dependent column and is dropped,
    # which leaves the projection (and so R^2) equal to the minimum-norm fit.
    k = len(idx)
    L = [[0.0] * k for _ in range(k)]
    d = [0.0] * k
    z = [0.0] * k
    explained = 0.0
    for a in range(k):
        ia = idx[a]
        row = gram[ia]
        La = L[a]
        for c in range(a):
            if d[c] == 0.0:
                continue
            Lc = L[c]
            s = row[idx[c]]
            for p in range(c):
                s -= La[p] * Lc[p] * d[p]
            La[c] = s / d[c]
        diag = row[ia]
        s = diag
        for p in range(a):
            s -= La[p] * La[p] * d[p]
        if diag > 0.0 and s > PIVOT_TOL * diag:
            d[a] = s
        zz = xty[ia]
        for p in range(a):
            zz -= La[p] * z[p]
        z[a] = zz
        if d[a] != 0.0:
            explained += zz * zz / d[a]
    return explained / yy


class RegressionR2(SetFunction):
    """Squared multiple correlation of the least-squares fit on the selected columns.

    Monotone and non-negative, generally not submodular.
    """

    monotone = True
    nonnegative = True

    def __init__(self, inst: RegressionInstance, labels=None):
        super().__init__(inst.n, labels)
        self.instance = inst
        self._gram = inst.gram.tolist()
        self._xty = inst.xty.tolist()

    def value(self, bits):
        idx = [j for j, b in enumerate(bits.tolist()) if b]
        if not idx:
            return 0.0
        return _explained_fraction(self._gram, self._xty, self.instance.yy, idx)

    def compiled_kernel(self, K):
        inst = self.instance
        return K.RegressionKernel(self.n, np.ascontiguousarray(inst.gram),
                                  inst.xty.copy(), inst.yy, PIVOT_TOL)


# -- perturbed (approximately submodular) functions ------------------------------


def _mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def subset_hash(bits, seed: int) -> int:
    """Keyed 64-bit hash of a membership vector (packed 64 elements per word)."""
    h = _mix64((seed + _GOLDEN) & MASK64)
    b = np.asarray(bits, dtype=bool)
    for start in range(0, b.shape[0], 64):
        word = 0
        for i in np.flatnonzero(b[start:start + 64]):
            word |= 1 << int(i)
        h = _mix64(((h ^ word) + _GOLDEN) & MASK64)
    return h


def unit_hash(bits, seed: int) -> float:
    """Hash mapped to [0, 1); exactly 0 on the empty set."""
    if not np.any(bits):
        return 0.0
    return (subset_hash(bits, seed) >> 11) * 2.0 ** -53


class PerturbedFunction(SetFunction):
    """Approximately submodular function built on a monotone submodular base ``g``.

    ``additive``: ``f(X) = g(X) + (eps/2) u(X)`` with ``u`` a keyed hash in
    [0, 1) and ``u(empty) = 0``.  Every marginal moves by at most ``eps/2``,
    so diminishing returns hold up to slack ``eps``.

    ``multiplicative``: ``f(X) = g(X) (1 + eps (2 r(X) - 1))`` where
    ``r(X) = (|X| + u(X)) / (n + 1)`` is non-decreasing in ``X``; hence
    ``(1 - eps) g <= f <= (1 + eps) g`` with witness ``g`` and ``f`` stays
    monotone.

    For ``n <= 12`` monotonicity is verified exhaustively at construction;
    larger additive instances need ``eps / 2`` below the smallest positive
    marginal of ``g`` (not checked).
    """

    monotone = True
    nonnegative = True
    VERIFY_N = 12

    def __init__(self, base: SetFunction, mode: str, epsilon: float, seed: int = 0,
                 verify: bool = True):
        if mode not in ("additive", "multiplicative"):
            raise ValueError(f"unknown perturbation mode {mode!r}")
        if not base.monotone or not base.nonnegative:
            raise ValueError("perturbation base must be monotone and non-negative")
        epsilon = float(epsilon)
        if not epsilon >= 0:
            raise ValueError("epsilon must be non-negative")
        if mode == "multiplicative" and epsilon > 1:
            raise ValueError("multiplicative epsilon must be at most 1")
        super().__init__(base.n, base.ground.labels)
        self.base = base
        self.mode = mode
        self.epsilon = epsilon
        self.seed = int(seed) & MASK64
        self._half_eps = epsilon * 0.5
        if verify and self.n <= self.VERIFY_N and epsilon > 0:
            from .diagnostics import Landscape

            if Landscape(self).monotone_violation() is not None:
                raise ValueError(f"monotonicity violated at ε={epsilon}")
            self.calls = 0

    @property
    def witness(self) -> SetFunction:
        return self.base

    def value(self, bits):
        g = self.base.value(bits)
        u = unit_hash(bits, self.seed)
        if self.mode == "additive":
            return g + self._half_eps * u
        r = (int(np.count_nonzero(bits)) + u) / (self.n + 1.0)
        return g * (1.0 + self.epsilon * (2.0 * r - 1.0))

    def compiled_kernel(self, K):
        return K.PerturbedKernel(self.n, self.base.compiled_kernel(K),
                                 self.mode == "multiplicative", self.epsilon, self.seed)
