"""Deterministic comparison algorithms: standard greedy, double greedy, local search.

All three evaluate through the counted oracle interface, so ``oracle.calls``
reflects their cost.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Solution


def standard_greedy(oracle, k: int) -> Solution:
    """Add the element with the largest marginal gain, ``k`` times.

    Ties go to the lowest index.  Meant for monotone oracles, where the
    size-``k`` result needs no truncation.
    """
    n = oracle.n
    if not 1 <= k <= n:
        raise ValueError(f"k={k} outside 1..{n}")
    bits = np.zeros(n, dtype=bool)
    current = oracle(bits)
    for _ in range(k):
        best_v, best_val = -1, None
        for v in range(n):
            if bits[v]:
                continue
            bits[v] = True
            val = oracle(bits)
            bits[v] = False
            if best_val is None or val > best_val:
                best_v, best_val = v, val
        bits[best_v] = True
        current = best_val
    return Solution(bits, current)


def double_greedy(oracle) -> Solution:
    """Deterministic double greedy for non-negative (possibly non-monotone) f.

    Sweeps the elements in index order, growing ``X`` from the empty set and
    shrinking ``Y`` from ``V``; element ``i`` joins ``X`` when its gain to
    ``X`` is at least the gain of removing it from ``Y``.
    """
    n = oracle.n
    x = np.zeros(n, dtype=bool)
    y = np.ones(n, dtype=bool)
    fx, fy = oracle(x), oracle(y)
    for i in range(n):
        x[i] = True
        fx_add = oracle(x)
        x[i] = False
        y[i] = False
        fy_del = oracle(y)
        y[i] = True
        if fx_add - fx >= fy_del - fy:
            x[i] = True
            fx = fx_add
        else:
            y[i] = False
            fy = fy_del
    return Solution(x, fx)


@dataclass(frozen=True)
class LocalSearchConfig:
    epsilon: float
    max_steps: int = 1_000_000

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be > 0")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")


@dataclass
class LocalSearchResult:
    solution: Solution
    local_optimum: Solution
    steps: int
    truncated: bool

    @property
    def value(self) -> float:
        return self.solution.value


def approximate_local_search(oracle, config: LocalSearchConfig) -> LocalSearchResult:
    """Best-improvement search for a ``(1 + eps/n^2)``-approximate local optimum.

    Starts at the best singleton.  A move (one insertion or deletion) is
    taken only if it beats ``(1 + eps/n^2)`` times the current value; among
    such moves the largest value wins, ties going to insertions and then to
    the lowest index.  Returns the better of the local optimum and its
    complement (the local optimum on ties).
    """
    n = oracle.n
    factor = 1.0 + config.epsilon / (n * n)
    bits = np.zeros(n, dtype=bool)
    start, current = 0, None
    for v in range(n):
        bits[v] = True
        val = oracle(bits)
        bits[v] = False
        if current is None or val > current:
            start, current = v, val
    bits[start] = True
    steps = 0
    truncated = False
    while True:
        threshold = factor * current
        move, move_val = -1, None
        # insertions first so that a later deletion must be strictly better
        for phase in (False, True):
            for v in range(n):
                if bits[v] != phase:
                    continue
                bits[v] = not phase
                val = oracle(bits)
                bits[v] = phase
                if val > threshold and (move_val is None or val > move_val):
                    move, move_val = v, val
        if move < 0:
            break
        if steps >= config.max_steps:
            truncated = True
            break
        bits[move] = not bits[move]
        current = move_val
        steps += 1
    local = Solution(bits, current)
    comp = Solution(~bits)
    fcomp = oracle(comp.bits)
    best = local if current >= fcomp else comp.with_value(fcomp)
    return LocalSearchResult(best, local, steps, truncated)
