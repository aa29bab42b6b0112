"""GSEMO with complement offspring, and the (1+1)-EA baseline.

GSEMO keeps a size-indexed Pareto archive over ``(f(x), -|x|)``.  Each
iteration picks a parent uniformly from the archive, flips every bit with
probability ``1/n`` and offers both the offspring and its complement
``V \\ x'`` to the archive.  Runs stop after a fixed number of iterations
(optionally earlier once the best feasible value reaches ``target``).

Both engines dispatch to the compiled kernels when available and to an
equivalent pure-Python loop otherwise; the two backends produce identical
results for the same seed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _backend, _fallback
from .core import ParetoArchive, Solution
from .errors import InvariantError
from .rng import RNG_NAME, RawStream, bit_generator

mutate = _fallback.mutate
complement = _fallback.complement


@dataclass(frozen=True)
class RunConfig:
    seed: int
    max_iterations: int
    k: Optional[int] = None
    trace_every: int = 100
    target: Optional[float] = None
    check_invariants: bool = False

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.k is not None and self.k < 1:
            raise ValueError("k must be >= 1")
        if self.trace_every < 1:
            raise ValueError("trace_every must be >= 1")


@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    best_feasible_value: float
    archive_occupancy: int


@dataclass
class RunResult:
    algorithm: str
    seed: int
    best: Optional[Solution]
    best_value: float
    oracle_calls: int
    iterations: int
    trace: list
    archive: ParetoArchive
    backend: str
    k: Optional[int] = None
    first_empty_iteration: int = -1
    rng: str = field(default=RNG_NAME)

    @property
    def feasible(self) -> bool:
        return self.best is not None

    def archive_values(self) -> list:
        return self.archive.values()

    def fingerprint(self) -> tuple:
        """Everything that must be bit-identical between repeated runs."""
        return (
            self.algorithm,
            self.seed,
            None if self.best is None else self.best.to_bitstring(),
            self.best_value,
            self.oracle_calls,
            self.iterations,
            tuple(self.trace),
            tuple((s.to_bitstring(), s.value) for s in self.archive),
            self.first_empty_iteration,
        )


def _bound(oracle, k):
    if k is None:
        return oracle.n
    if not 1 <= k <= oracle.n:
        raise ValueError(f"k={k} outside 1..{oracle.n}")
    return int(k)


def _trace(raw) -> list:
    return [TraceRecord(int(i), float(b), int(o)) for i, b, o in raw]


def gsemo(oracle, config: RunConfig, backend: Optional[str] = None) -> RunResult:
    """Run GSEMO on ``oracle`` and return the best archived solution of size <= k."""
    backend = _backend.resolve(backend)
    n = oracle.n
    kk = _bound(oracle, config.k)
    bitgen = bit_generator(config.seed)
    if backend == "compiled":
        K = _backend.kernels()
        out = K.run_gsemo(
            oracle.compiled_kernel(K), bitgen, config.max_iterations, kk,
            config.trace_every, 0.0 if config.target is None else float(config.target),
            config.target is not None, config.check_invariants,
        )
        archive = ParetoArchive(n)
        for s in np.flatnonzero(out["occupied"]):
            archive.slots[s] = Solution(out["archive"][s], out["values"][s])
        iterations, calls, trace, first_empty = (
            out["iterations"], out["calls"], out["trace"], out["first_empty"])
    else:
        archive, iterations, calls, trace, first_empty = _fallback.run_gsemo(
            oracle, bitgen, config.max_iterations, kk, config.trace_every,
            config.target, config.check_invariants)
    oracle.calls += calls
    if calls != 1 + 2 * iterations:
        raise InvariantError(f"{calls} oracle calls after {iterations} iterations")
    best = None
    if any(archive.slots[s] is not None for s in range(kk + 1)):
        best = archive.best_feasible(kk)
    best_value = -math.inf if best is None else best.value
    if best_value != trace[-1][1]:
        raise InvariantError("archive best disagrees with the tracked best value")
    return RunResult("gsemo", int(config.seed), best, best_value, calls, iterations,
                     _trace(trace), archive, backend, config.k, first_empty)


def one_plus_one_ea(oracle, config: RunConfig, backend: Optional[str] = None) -> RunResult:
    """(1+1)-EA with the same mutation operator.

    With a size bound, an infeasible solution ranks below every feasible one
    and infeasible solutions compare by smaller size.  ``best`` is ``None``
    if no feasible solution was ever reached.
    """
    backend = _backend.resolve(backend)
    n = oracle.n
    kk = _bound(oracle, config.k)
    bitgen = bit_generator(config.seed)
    if backend == "compiled":
        K = _backend.kernels()
        out = K.run_oneplusone(
            oracle.compiled_kernel(K), bitgen, config.max_iterations, kk,
            config.trace_every, 0.0 if config.target is None else float(config.target),
            config.target is not None,
        )
        x = Solution(out["x"], out["value"])
        iterations, calls, trace = out["iterations"], out["calls"], out["trace"]
    else:
        x, iterations, calls, trace = _fallback.run_oneplusone(
            oracle, bitgen, config.max_iterations, kk, config.trace_every, config.target)
    oracle.calls += calls
    archive = ParetoArchive(n)
    archive.slots[x.size] = x
    best = x if x.size <= kk else None
    best_value = -math.inf if best is None else best.value
    return RunResult("oneplusone", int(config.seed), best, best_value, calls, iterations,
                     _trace(trace), archive, backend, config.k)


def random_stream(seed: int) -> RawStream:
    """A raw-draw stream on the same generator the engines use (for ``mutate``)."""
    return RawStream(bit_generator(seed))
