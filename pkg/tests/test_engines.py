import math

import numpy as np
import pytest

from gsemo import instances
from gsemo.core import Solution
from gsemo.engines import RunConfig, complement, gsemo, mutate, one_plus_one_ea, random_stream
from gsemo.objectives import FunctionOracle, ModularFunction
from gsemo.rng import RawStream, bit_generator, index_below, uniforms

import oracles as O


def single():
    return ModularFunction([1.0])


class TestMutation:
    def test_n1_always_flips(self):
        s = random_stream(3)
        x = Solution.empty(1)
        for _ in range(100):
            assert mutate(x, s).bits[0]

    def test_parent_unchanged(self):
        x = Solution.from_bitstring("10101")
        before = x.bits.copy()
        mutate(x, random_stream(1))
        assert np.array_equal(x.bits, before)

    def test_mean_flip_count(self):
        # 10**6 mutations of the all-zeros n=10 solution, done in one vectorised draw
        n, reps = 10, 10 ** 6
        raw = RawStream(bit_generator(12345), block=n * reps).take(n * reps)
        flips = (uniforms(raw) < 1.0 / n).reshape(reps, n).sum(axis=1)
        assert abs(flips.mean() - 1.0) <= 0.01
        # and the operator itself agrees on a smaller sample
        s = random_stream(7)
        x = Solution.empty(n)
        mean = np.mean([mutate(x, s).size for _ in range(20000)])
        assert abs(mean - 1.0) < 0.05

    def test_complement(self):
        z = Solution.empty(5)
        assert complement(z).to_bitstring() == "11111"
        x = Solution.from_bitstring("10110")
        assert complement(complement(x)).same_subset(x)
        assert x.size + complement(x).size == 5

    def test_index_below_range(self):
        for c in (1, 2, 3, 7, 100):
            draws = [index_below(r, c) for r in bit_generator(1).random_raw(2000).tolist()]
            assert min(draws) == 0 and max(draws) == c - 1


class TestGsemo:
    def test_n1(self, backend):
        for seed in range(1, 21):
            r = gsemo(single(), RunConfig(seed, 50), backend=backend)
            assert r.best_value == 1.0
            assert r.archive.slots[0] is not None or r.best.size == 1

    def test_triangle_every_seed(self, backend):
        f = instances.triangle()
        for seed in range(1, 21):
            r = gsemo(f, RunConfig(seed, 810), backend=backend)
            assert r.best_value == 2.0
            assert r.oracle_calls == 1 + 2 * r.iterations == 1621

    def test_coverage_k2_reaches_opt(self, backend):
        f = instances.coverage()
        # frozen from the nested-loop reference: OPT_2 = 55 at {2, 11}
        assert O.opt(O.table(f), f.n, 2)[0] == 55.0
        r = gsemo(f, RunConfig(1, 5000, k=2), backend=backend)
        assert r.best_value == 55.0 and r.best.size <= 2

    def test_small_instances_reach_opt(self, backend):
        f = FunctionOracle(3, lambda b: float(b[0]) * 2 - float(b[1]) + 0.5 * float(b[2]))
        best = O.opt(O.table(f), 3)[0]
        r = gsemo(f, RunConfig(2, 10 ** 5, target=best), backend=backend)
        assert r.best_value == best

    def test_determinism_and_accounting(self, backend):
        f = instances.regression()
        cfg = RunConfig(99, 700, k=3, trace_every=37, check_invariants=True)
        a, b = gsemo(f, cfg, backend=backend), gsemo(f, cfg, backend=backend)
        assert a.fingerprint() == b.fingerprint()
        assert a.oracle_calls == 1 + 2 * a.iterations == 1401
        assert a.best.size <= 3 and a.best_value == f.value(a.best.bits)
        iters = [t.iteration for t in a.trace]
        assert iters[0] == 0 and iters[-1] == 700 and iters == sorted(iters)
        vals = [t.best_feasible_value for t in a.trace]
        assert all(x <= y for x, y in zip(vals, vals[1:]))
        assert a.rng.startswith("PCG64")

    def test_counter_accumulates(self, backend):
        f = instances.triangle()
        gsemo(f, RunConfig(1, 10), backend=backend)
        gsemo(f, RunConfig(2, 5), backend=backend)
        assert f.calls == 21 + 11

    def test_target_stops_early(self, backend):
        f = instances.triangle()
        r = gsemo(f, RunConfig(1, 10 ** 6, target=2.0), backend=backend)
        assert r.best_value == 2.0 and r.iterations < 1000

    def test_infeasible_archive(self, backend):
        # k=1 on n=3 and a budget of one iteration may leave nothing of size <= 1
        f = ModularFunction([1.0, 1.0, 1.0])
        for seed in range(1, 40):
            r = gsemo(f, RunConfig(seed, 1, k=1), backend=backend)
            if r.best is None:
                assert r.best_value == -math.inf and not r.feasible
            else:
                assert r.best.size <= 1

    def test_config_validation(self):
        with pytest.raises(ValueError):
            RunConfig(-1, 10)
        with pytest.raises(ValueError):
            RunConfig(1, 0)
        with pytest.raises(ValueError):
            gsemo(single(), RunConfig(1, 5, k=2))


class TestOnePlusOne:
    def test_n1(self, backend):
        for seed in range(1, 21):
            r = one_plus_one_ea(single(), RunConfig(seed, 50), backend=backend)
            assert r.best_value == 1.0
            assert r.oracle_calls == 1 + r.iterations

    def test_feasible_result(self, backend):
        f = instances.coverage()
        for seed in range(1, 11):
            r = one_plus_one_ea(f, RunConfig(seed, 3000, k=3), backend=backend)
            assert r.best is not None and r.best.size <= 3
            assert r.best_value == f.value(r.best.bits)

    def test_determinism(self, backend):
        f = instances.perturbed_coverage("additive")
        cfg = RunConfig(5, 800, k=4, trace_every=50)
        assert (one_plus_one_ea(f, cfg, backend=backend).fingerprint()
                == one_plus_one_ea(f, cfg, backend=backend).fingerprint())


def test_env_selects_fallback():
    import os
    import subprocess
    import sys

    env = dict(os.environ, GSEMO_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from gsemo import _backend; print(_backend.DEFAULT)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
