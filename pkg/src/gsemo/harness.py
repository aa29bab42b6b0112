"""Multi-seed experiment orchestration and result persistence.

An :class:`ExperimentSpec` names an instance (file or built-in), an
algorithm and its parameters; :func:`run_experiment` executes it for every
seed, optionally in worker processes, and returns a :class:`ResultRecord`
that serializes to one JSON document.  Per-seed traces can be written as
CSV with columns ``iteration,bestFeasibleValue,archiveOccupancy``.
"""
from __future__ import annotations

import csv
import json
import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

from . import instances, io
from .baselines import LocalSearchConfig, approximate_local_search, double_greedy, standard_greedy
from .diagnostics import brute_force_opt
from .engines import RunConfig, gsemo, one_plus_one_ea
from .objectives import (
    CoverageFunction,
    CutFunction,
    FacilityLocationFunction,
    PerturbedFunction,
    RegressionR2,
)

PROBLEMS = ("maxcut", "coverage", "facility", "regression", "perturbed")
ALGORITHMS = ("gsemo", "oneplusone", "greedy", "doublegreedy", "localsearch")
SEEDED = ("gsemo", "oneplusone")
MAX_SEED = 2 ** 64 - 1


def parse_seeds(text: str) -> list:
    """``"1..20"``, ``"3,5,8"`` or a mix such as ``"1..3,10"``."""
    seeds = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            raise ValueError(f"empty entry in seed list {text!r}")
        if ".." in part:
            lo, hi = part.split("..", 1)
            a, b = int(lo), int(hi)
            if b < a:
                raise ValueError(f"empty seed range {part!r}")
            seeds.extend(range(a, b + 1))
        else:
            seeds.append(int(part))
    for s in seeds:
        if not 0 <= s <= MAX_SEED:
            raise ValueError(f"seed {s} is not a 64-bit unsigned integer")
    if len(set(seeds)) != len(seeds):
        raise ValueError("seeds must be distinct")
    return seeds


@dataclass(frozen=True)
class ExperimentSpec:
    problem: str
    algorithm: str
    input: Optional[str] = None
    builtin: Optional[str] = None
    k: Optional[int] = None
    budget: int = 1000
    seeds: tuple = (1,)
    epsilon: Optional[float] = None
    perturb: Optional[str] = None
    perturb_seed: int = 0
    header: bool = False
    trace_every: int = 100
    with_opt: bool = False
    guard_override: bool = False
    backend: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        if self.problem not in PROBLEMS:
            raise ValueError(f"unknown problem {self.problem!r}; choose from {', '.join(PROBLEMS)}")
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; choose from {', '.join(ALGORITHMS)}")
        if (self.input is None) == (self.builtin is None):
            raise ValueError("give exactly one of an input file or a built-in instance")
        if not self.seeds or len(set(self.seeds)) != len(self.seeds):
            raise ValueError("seeds must be non-empty and distinct")
        if self.budget < 1:
            raise ValueError("budget must be >= 1")
        if self.k is not None and self.k < 1:
            raise ValueError("k must be >= 1")
        if self.algorithm == "greedy" and self.k is None:
            raise ValueError("greedy needs --k")
        if self.problem == "perturbed" and self.perturb not in ("additive", "multiplicative"):
            raise ValueError("perturbed problems need --perturb additive|multiplicative")
        if self.epsilon is not None and not self.epsilon >= 0:
            raise ValueError("epsilon must be non-negative")


def load_oracle(spec: ExperimentSpec):
    """Fresh oracle for ``spec`` (perturbed problems use a coverage file as the base)."""
    if spec.builtin is not None:
        f = instances.builtin(spec.builtin)
    elif spec.problem == "maxcut":
        f = CutFunction(io.read_graph(spec.input))
    elif spec.problem in ("coverage", "perturbed"):
        f = CoverageFunction(io.read_coverage(spec.input))
    elif spec.problem == "facility":
        f = FacilityLocationFunction(io.read_facility(spec.input))
    else:
        f = RegressionR2(io.read_regression(spec.input, header=spec.header))
    if spec.problem == "perturbed":
        f = PerturbedFunction(f, spec.perturb, 0.0 if spec.epsilon is None else spec.epsilon,
                              seed=spec.perturb_seed)
    return f


@dataclass
class SeedRecord:
    seed: Optional[int]
    bestValue: Optional[float]
    bestSubset: Optional[str]
    oracleCalls: int
    wallMillis: float
    iterations: Optional[int] = None
    trace: Optional[list] = None

    def comparable(self) -> dict:
        """Everything except wall-clock time."""
        d = asdict(self)
        d.pop("wallMillis")
        return d


@dataclass
class ResultRecord:
    spec: dict
    runs: list
    aggregate: dict
    opt: Optional[float] = None
    ratioToOpt: Optional[float] = None
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "ResultRecord":
        d = dict(d)
        d["runs"] = [SeedRecord(**r) for r in d["runs"]]
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> "ResultRecord":
        return cls.from_dict(json.loads(text))

    def save(self, path) -> None:
        Path(path).write_text(self.to_json() + "\n")

    @classmethod
    def load(cls, path) -> "ResultRecord":
        return cls.from_json(Path(path).read_text())

    def summary(self) -> str:
        a = self.aggregate
        line = (f"{self.spec['algorithm']} on {self.spec['problem']}: {len(self.runs)} run(s), "
                f"best min/median/max = {a['min']}/{a['median']}/{a['max']}")
        if self.ratioToOpt is not None:
            line += f", OPT = {self.opt}, worst ratio = {self.ratioToOpt:.6f}"
        return line


def _run_seed(spec: ExperimentSpec, seed: Optional[int], keep_trace: bool) -> SeedRecord:
    f = load_oracle(spec)
    start = time.perf_counter()
    algo = spec.algorithm
    iterations = trace = None
    if algo in SEEDED:
        cfg = RunConfig(seed, spec.budget, k=spec.k, trace_every=spec.trace_every)
        engine = gsemo if algo == "gsemo" else one_plus_one_ea
        res = engine(f, cfg, backend=spec.backend)
        best = res.best
        calls, iterations = res.oracle_calls, res.iterations
        if keep_trace:
            trace = [[t.iteration, t.best_feasible_value, t.archive_occupancy] for t in res.trace]
    else:
        if algo == "greedy":
            best = standard_greedy(f, spec.k)
        elif algo == "doublegreedy":
            best = double_greedy(f)
        else:
            eps = 1.0 if spec.epsilon is None else spec.epsilon
            best = approximate_local_search(f, LocalSearchConfig(eps)).solution
        calls = f.calls
    wall = (time.perf_counter() - start) * 1000.0
    return SeedRecord(
        seed, None if best is None else best.value, None if best is None else best.to_bitstring(),
        int(calls), round(wall, 3), iterations, trace)


def _aggregate(runs) -> dict:
    vals = [r.bestValue for r in runs if r.bestValue is not None]
    if not vals:
        return {"min": None, "median": None, "max": None, "feasible": 0}
    return {"min": min(vals), "median": statistics.median(vals), "max": max(vals),
            "feasible": len(vals)}


def write_trace_csv(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["iteration", "bestFeasibleValue", "archiveOccupancy"])
        for it, best, occ in rows:
            w.writerow([it, "" if math.isinf(best) else repr(best), occ])


def trace_path(template, seed, many: bool) -> Path:
    """``{seed}`` in the template is substituted; otherwise a suffix is added for batches."""
    template = str(template)
    if "{seed}" in template:
        return Path(template.format(seed=seed))
    p = Path(template)
    return p.with_name(f"{p.stem}-seed{seed}{p.suffix}") if many else p


def run_experiment(spec: ExperimentSpec, jobs: int = 1, trace: Optional[str] = None) -> ResultRecord:
    """Run every seed of ``spec``; per-seed records do not depend on ``jobs``."""
    notes = []
    if spec.algorithm in SEEDED:
        seeds = list(spec.seeds)
    else:
        seeds = [None]
        notes.append(f"{spec.algorithm} is deterministic: seeds ignored, one record")
    keep = trace is not None and spec.algorithm in SEEDED
    if jobs > 1 and len(seeds) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            runs = list(pool.map(_run_seed, [spec] * len(seeds), seeds, [keep] * len(seeds)))
    else:
        runs = [_run_seed(spec, s, keep) for s in seeds]
    if keep:
        for r in runs:
            write_trace_csv(r.trace, trace_path(trace, r.seed, len(runs) > 1))
            r.trace = None  # traces live in the CSV files, not in the result document
    opt = ratio = None
    if spec.with_opt:
        f = load_oracle(spec)
        k = spec.k if spec.algorithm in ("gsemo", "oneplusone", "greedy") else None
        opt = brute_force_opt(f, k, guard_override=spec.guard_override)[0]
        vals = [r.bestValue for r in runs if r.bestValue is not None]
        if opt > 0 and vals:
            ratio = min(vals) / opt
        else:
            notes.append("ratio to OPT omitted (OPT <= 0 or no feasible result)")
    spec_dict = asdict(spec)
    spec_dict["seeds"] = list(spec.seeds)
    return ResultRecord(spec_dict, runs, _aggregate(runs), opt, ratio, notes)
