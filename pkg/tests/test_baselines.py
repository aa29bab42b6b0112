import math

import numpy as np
import pytest

from gsemo import instances
from gsemo.baselines import LocalSearchConfig, approximate_local_search, double_greedy, standard_greedy
from gsemo.diagnostics import is_approximate_local_optimum
from gsemo.objectives import CoverageFunction, CoverageInstance, CutFunction, ModularFunction, WeightedGraph

import oracles as O


class TestGreedy:
    def test_disjoint_coverage(self):
        s = standard_greedy(instances.disjoint_coverage((5.0, 3.0, 1.0)), 2)
        assert s.indices() == (0, 1) and s.value == 8.0

    def test_k_equals_n(self):
        f = instances.coverage(8, seed=2002)
        assert standard_greedy(f, 8).size == 8

    def test_ties_lowest_index(self):
        s = standard_greedy(ModularFunction([1.0, 2.0, 2.0, 2.0]), 2)
        assert s.indices() == (1, 2)

    def test_relabel_covariance(self):
        inst = instances.random_coverage(7, seed=33)
        perm = [3, 0, 6, 1, 5, 2, 4]
        moved = CoverageInstance(inst.m, [inst.covered_by[p] for p in perm], inst.weights)
        a = standard_greedy(CoverageFunction(inst), 3)
        b = standard_greedy(CoverageFunction(moved), 3)
        assert a.value == b.value
        assert sorted(perm[i] for i in b.indices()) == sorted(a.indices())

    def test_guarantee_vs_reference(self):
        for _, f in instances.monotone_submodular_suite(10):
            ref = O.table(f)
            for k in range(1, f.n + 1):
                assert standard_greedy(f, k).value >= (1 - math.exp(-1)) * O.opt(ref, f.n, k)[0]

    def test_bad_k(self):
        with pytest.raises(ValueError):
            standard_greedy(instances.coverage(), 0)


class TestDoubleGreedy:
    def test_single_edge(self):
        s = double_greedy(CutFunction(WeightedGraph(2, [(0, 1, 1.0)])))
        assert s.value == 1.0

    def test_n1(self):
        assert double_greedy(ModularFunction([2.0])).size == 1
        assert double_greedy(ModularFunction([0.0])).size == 1
        assert double_greedy(ModularFunction([-1.0])).size == 0

    def test_third_of_opt(self):
        for _, f in instances.submodular_nonnegative_suite():
            assert double_greedy(f).value >= O.opt(O.table(f), f.n)[0] / 3


class TestLocalSearch:
    def test_guarantee_and_premise(self):
        for _, f in instances.submodular_nonnegative_suite():
            best = O.opt(O.table(f), f.n)[0]
            for eps in (0.5, 1.0):
                r = approximate_local_search(f, LocalSearchConfig(eps))
                assert not r.truncated
                assert r.value >= (1 / 3 - eps / f.n) * best
                assert is_approximate_local_optimum(f, r.local_optimum, eps / f.n ** 2)
                assert r.value == max(r.local_optimum.value, f.value(~r.local_optimum.bits))

    def test_modular_finds_positive_part(self):
        f = ModularFunction([3.0, 0.5, 2.0, 1.0])
        r = approximate_local_search(f, LocalSearchConfig(0.01))
        assert r.value == 6.5 and r.solution.size == 4

    def test_n1(self):
        r = approximate_local_search(ModularFunction([2.0]), LocalSearchConfig(1.0))
        assert r.value == 2.0

    def test_truncation(self):
        r = approximate_local_search(instances.coverage(), LocalSearchConfig(0.1, max_steps=1))
        assert r.truncated and r.steps == 1

    def test_config(self):
        with pytest.raises(ValueError):
            LocalSearchConfig(0.0)
        with pytest.raises(ValueError):
            LocalSearchConfig(1.0, max_steps=0)
