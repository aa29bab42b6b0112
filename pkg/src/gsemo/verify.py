"""Acceptance checks, grouped into named suites.

Each ``criterion_*`` function runs one check on the built-in fixed-seed
instances and returns a :class:`CriterionResult`.  The statistical checks
run 20 seeds per instance and pass when at least 18 meet the threshold.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _backend, bounds, instances
from .baselines import LocalSearchConfig, approximate_local_search, double_greedy, standard_greedy
from .core import ParetoArchive, Solution
from .diagnostics import Landscape, Verdict, is_approximate_local_optimum
from .engines import RunConfig, gsemo

log = logging.getLogger(__name__)

SEEDS = tuple(range(1, 21))
REQUIRED = 18


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    measured: str
    details: list = field(default_factory=list)

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] criterion {self.number} ({self.name}): {self.measured}"


def expected_time_budget(n: int, k: int) -> int:
    """10x the leading-order bound ``e n^2 (ln n + k)`` with constants set to 1 and e rounded up."""
    return math.ceil(20 * n * n * (math.log(n) + k))


def unconstrained_budget(n: int, eps: float) -> int:
    return math.ceil(10 * (1 / eps) * n ** 4 * math.log(n))


def _seed_sweep(oracle, k, budget, threshold, backend, seeds=SEEDS):
    """Number of seeds whose GSEMO result is feasible and reaches ``threshold``.

    The compiled backend always spends the full budget.  The pure-Python
    backend stops once the threshold is reached; since the best feasible
    value never decreases, the verdict is the same.
    """
    backend = _backend.resolve(backend)
    target = None if backend == "compiled" else threshold
    hits, values = 0, []
    for seed in seeds:
        res = gsemo(oracle, RunConfig(seed, budget, k=k, trace_every=budget, target=target),
                    backend=backend)
        ok = res.feasible and (k is None or res.best.size <= k) and res.best_value >= threshold
        hits += ok
        values.append(res.best_value)
    return hits, values


def criterion_unconstrained(backend=None) -> CriterionResult:
    eps = 1.0
    details, worst, passed = [], len(SEEDS), True
    for name, f in instances.cut_instances(12):
        opt = Landscape(f).opt()[0]
        thr = bounds.local_optimum_ratio(eps, f.n) * opt
        hits, vals = _seed_sweep(f, None, unconstrained_budget(f.n, eps), thr, backend)
        worst = min(worst, hits)
        passed &= hits >= REQUIRED
        details.append(f"{name}: OPT={opt:.6g} threshold={thr:.6g} hits={hits}/20 min={min(vals):.6g}")
    return CriterionResult(1, "unconstrained cut", passed,
                           f"worst instance {worst}/20 seeds (need {REQUIRED})", details)


def _constrained(number, name, f, k, thr_of, backend):
    land = Landscape(f)
    opt = land.opt(k)[0]
    thr = thr_of(land, opt)
    hits, vals = _seed_sweep(f, k, expected_time_budget(f.n, k), thr, backend)
    detail = f"OPT_k={opt:.6g} threshold={thr:.6g} min={min(vals):.6g}"
    return CriterionResult(number, name, hits >= REQUIRED, f"{hits}/20 seeds (need {REQUIRED}); {detail}")


def criterion_additive(backend=None) -> CriterionResult:
    eps, k = 0.05, 4
    f = instances.perturbed_coverage("additive", eps)
    return _constrained(2, "additive perturbation", f, k,
                        lambda land, opt: bounds.additive_guarantee(opt, k, eps), backend)


def criterion_ratio(backend=None) -> CriterionResult:
    k = 3
    f = instances.regression()
    gamma = {}

    def thr(land, opt):
        gamma["g"] = land.gamma_min(k)
        return bounds.ratio_guarantee(gamma["g"], k) * opt

    res = _constrained(3, "submodularity ratio", f, k, thr, backend)
    res.measured += f" gamma_min={gamma['g']:.6g}"
    return res


def criterion_multiplicative(backend=None) -> CriterionResult:
    eps, k = 0.05, 4
    f = instances.perturbed_coverage("multiplicative", eps)
    return _constrained(4, "multiplicative perturbation", f, k,
                        lambda land, opt: bounds.multiplicative_guarantee(eps, k) * opt, backend)


def criterion_local_search() -> CriterionResult:
    checked, failures = 0, []
    for name, f in instances.submodular_nonnegative_suite():
        opt = Landscape(f).opt()[0]
        for eps in (0.5, 1.0):
            res = approximate_local_search(f, LocalSearchConfig(eps))
            checked += 1
            thr = bounds.local_optimum_ratio(eps, f.n) * opt
            premise = res.truncated or is_approximate_local_optimum(f, res.local_optimum, eps / f.n ** 2)
            if res.value < thr or not premise:
                failures.append(f"{name} eps={eps}: value={res.value:.6g} threshold={thr:.6g}")
    return CriterionResult(5, "local search", not failures,
                           f"{checked - len(failures)}/{checked} instance-epsilon pairs", failures)


def criterion_improving_element() -> CriterionResult:
    checked, bad_total, failures = 0, 0, []
    for regime, cases in instances.improving_element_suite().items():
        for name, f, k in cases:
            land = Landscape(f)
            if regime == "ratio":
                bad = land.ratio_step_failures(k)
            elif regime == "additive":
                bad = land.additive_step_failures(k, land.additive_epsilon())
            else:
                bad = land.multiplicative_step_failures(k, f.epsilon)
            checked += (1 << f.n) - 1
            bad_total += len(bad)
            if bad:
                failures.append(f"{regime} {name}: {len(bad)} subsets, first mask {bad[0]}")
    return CriterionResult(6, "improving element", not failures,
                           f"{checked - bad_total}/{checked} subsets", failures)


def _collapse_ratios(land, ks):
    n = land.n
    if n <= 8:
        us = range(1 << n)
    else:
        us = [u for u in range(1 << n) if land.sizes[u] <= 3]
    ratios = [land.ratio(int(u), k) for k in ks for u in us]
    return min(ratios), max(abs(r - 1.0) for r in ratios)


def criterion_collapse() -> CriterionResult:
    cases = instances.submodular_nonnegative_suite() + [
        (name, f) for name, f, _ in instances.improving_element_suite()["ratio"]]
    failures, certified = [], 0
    for name, f in cases:
        land = Landscape(f)
        if land.certify().submodular != Verdict.PASS:
            continue
        certified += 1
        ks = range(1, min(3, f.n) + 1)
        gamma, dev = _collapse_ratios(land, ks)
        eps = land.additive_epsilon()
        opt = land.opt()[0]
        if dev > 1e-9:
            failures.append(f"{name}: gamma deviates from 1 by {dev:.3g}")
        if eps > 1e-12:
            failures.append(f"{name}: minimal additive eps {eps:.3g}")
        for k in range(1, f.n + 1):
            ref = 1.0 - (1.0 - 1.0 / k) ** k
            forms = {
                "additive": bounds.additive_guarantee(opt, k, eps, finite=True) / opt if opt > 0 else ref,
                "ratio": bounds.ratio_guarantee(gamma, k, finite=True),
                "multiplicative": bounds.multiplicative_guarantee(0.0, k),
            }
            for form, val in forms.items():
                if abs(val - ref) > 1e-9:
                    failures.append(f"{name} k={k}: {form} bound {val!r} != {ref!r}")
    return CriterionResult(7, "submodular collapse", not failures and certified > 0,
                           f"{certified} certified oracles, {len(failures)} failures", failures)


def criterion_bound_dominance() -> CriterionResult:
    bad = []
    for k in range(1, 101):
        for i in range(1, 51):
            cmp = bounds.compare_multiplicative_bounds(k, i / 100)
            if not cmp.dominates:
                bad.append(f"k={k} eps={i / 100}: {cmp.ours} < {cmp.greedy_known}")
    return CriterionResult(8, "bound dominance", not bad, f"{5000 - len(bad)}/5000 grid points", bad)


def criterion_baselines() -> CriterionResult:
    failures, checked = [], 0
    ratio = 1.0 - math.exp(-1.0)
    for name, f in instances.monotone_submodular_suite(10):
        land = Landscape(f)
        for k in range(1, f.n + 1):
            checked += 1
            got = standard_greedy(f, k).value
            if got < ratio * land.opt(k)[0]:
                failures.append(f"greedy {name} k={k}: {got}")
    for name, f in instances.submodular_nonnegative_suite():
        checked += 1
        got = double_greedy(f).value
        opt = Landscape(f).opt()[0]
        if got < opt / 3.0:
            failures.append(f"double greedy {name}: {got} < {opt}/3")
    return CriterionResult(9, "baselines", not failures, f"{checked - len(failures)}/{checked} checks", failures)


def _pairwise_ok(archive: ParetoArchive) -> bool:
    sols = archive.solutions()
    for a, b in itertools.combinations(sols, 2):
        if a.size == b.size or (a.size < b.size) != (a.value < b.value):
            return False
    return True


def criterion_invariants(backend=None, updates: int = 100_000, runs: int = 100) -> CriterionResult:
    failures = []
    rng = np.random.default_rng(5001)
    per_trial = updates // 10
    for trial in range(10):
        n = int(rng.integers(1, 11))
        archive = ParetoArchive(n)
        had_empty = False
        for _ in range(per_trial):
            bits = rng.random(n) < rng.random()
            # few distinct values so ties and equal objective vectors are common
            y = Solution(bits, float(rng.integers(0, 6)))
            archive.update(y)
            had_empty |= archive.slots[0] is not None
            if len(archive) > n + 1 or (had_empty and archive.slots[0] is None):
                failures.append(f"trial {trial}: occupancy or empty-set permanence broken")
                break
        if not _pairwise_ok(archive):
            failures.append(f"trial {trial}: comparable solutions in archive")
    oracles = [f for _, f in instances.cut_instances(12)] + [
        instances.coverage(), instances.regression(), instances.perturbed_coverage("additive")]
    backend = _backend.resolve(backend)
    for r in range(runs):
        f = oracles[r % len(oracles)]
        k = None if r % 2 else 4
        cfg = RunConfig(seed=10_000 + r, max_iterations=1000, k=k, trace_every=50,
                        check_invariants=True)
        a = gsemo(f, cfg, backend=backend)
        b = gsemo(f, cfg, backend=backend)
        if a.fingerprint() != b.fingerprint():
            failures.append(f"run {r}: identical seeds differ")
        if a.oracle_calls != 1 + 2 * a.iterations:
            failures.append(f"run {r}: {a.oracle_calls} calls for {a.iterations} iterations")
        if len(a.archive) > f.n + 1 or not _pairwise_ok(a.archive):
            failures.append(f"run {r}: archive invariant broken")
        if a.first_empty_iteration >= 0 and a.archive.slots[0] is None:
            failures.append(f"run {r}: empty set lost")
    return CriterionResult(10, "structural invariants", not failures,
                           f"{updates} archive updates, {runs} runs x2, {len(failures)} failures", failures)


CRITERIA = {
    1: criterion_unconstrained,
    2: criterion_additive,
    3: criterion_ratio,
    4: criterion_multiplicative,
    5: criterion_local_search,
    6: criterion_improving_element,
    7: criterion_collapse,
    8: criterion_bound_dominance,
    9: criterion_baselines,
    10: criterion_invariants,
}

_TAKES_BACKEND = {1, 2, 3, 4, 10}

SUITES = {
    "core": [10],
    "theorem1": [1],
    "theorem2": [2],
    "theorem3": [3],
    "theorem4": [4],
    "lemmas": [5, 6],
    "collapse": [7],
    "bounds": [8],
    "baselines": [9],
    "all": list(range(1, 11)),
}


def run_criterion(number: int, backend: Optional[str] = None) -> CriterionResult:
    fn = CRITERIA[number]
    return fn(backend) if number in _TAKES_BACKEND else fn()


def run_suite(name: str, backend: Optional[str] = None) -> list:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    out = []
    for number in SUITES[name]:
        res = run_criterion(number, backend)
        log.info(res.line())
        out.append(res)
    return out
