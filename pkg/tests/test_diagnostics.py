import math

import numpy as np
import pytest

from gsemo import bounds, instances
from gsemo.core import Solution
from gsemo.diagnostics import (
    Landscape, Verdict, brute_force_opt, certify_properties, diagnose, gamma_min,
    minimal_additive_epsilon, submodularity_ratio, tabulate,
)
from gsemo.errors import GuardError
from gsemo.objectives import FunctionOracle, ModularFunction, TabulatedFunction

import oracles as O

# Frozen from the nested-loop reference in oracles.py (lstsq-based R^2).
GAMMA_SMALL_U0_K2 = 0.3588949917465717
GAMMA_MIN_REG10_K3 = 0.22859415396847776
OPT_REG10_K3 = 0.9885726530783192


class TestOpt:
    def test_triangle(self):
        value, arg = brute_force_opt(instances.triangle())
        assert value == 2.0 and arg.indices() == (0,)

    def test_k_zero_and_full(self):
        f = instances.coverage(8, seed=2002)
        value, arg = brute_force_opt(f, 0)
        assert value == 0.0 and arg.size == 0
        assert brute_force_opt(f, 8)[0] == f.value(np.ones(8, bool))

    def test_matches_reference(self):
        for f in (instances.coverage(8, seed=2002), instances.regression(8, seed=3003),
                  instances.facility()):
            ref = O.table(f)
            for k in (None, 1, 2, 3):
                v, arg = brute_force_opt(f, k)
                rv, rarg = O.opt(ref, f.n, k)
                assert v == rv and arg.indices() == rarg

    def test_monotone_in_k(self):
        land = Landscape(instances.regression())
        vals = [land.opt(k)[0] for k in range(0, 11)]
        assert vals == sorted(vals) and land.opt()[0] == vals[-1]

    def test_regression_frozen(self):
        v, arg = brute_force_opt(instances.regression(), 3)
        assert v == pytest.approx(OPT_REG10_K3, abs=1e-12)
        assert arg.indices() == (0, 1, 2)

    def test_guard(self):
        f = FunctionOracle(25, lambda b: 0.0)
        with pytest.raises(GuardError, match="24"):
            brute_force_opt(f)
        with pytest.raises(GuardError, match="28"):
            brute_force_opt(FunctionOracle(29, lambda b: 0.0), guard_override=True)

    def test_tabulate_counts_calls(self):
        f = instances.triangle()
        tabulate(f)
        assert f.calls == 8


class TestRatio:
    def test_regression_small_frozen(self):
        f = instances.regression_small()
        got = submodularity_ratio(f, Solution.from_indices(4, [0]), 2)
        assert got == pytest.approx(GAMMA_SMALL_U0_K2, abs=1e-9)
        assert 0 < got <= 1

    def test_gamma_min_frozen(self):
        assert gamma_min(instances.regression(), 3) == pytest.approx(GAMMA_MIN_REG10_K3, abs=1e-9)

    def test_matches_reference_everywhere_small(self):
        f = instances.regression_small()
        land = Landscape(f)
        ref = O.table(f)
        for u in range(16):
            U = [i for i in range(4) if u >> i & 1]
            for k in (1, 2, 3):
                assert land.ratio(u, k) == pytest.approx(O.gamma(ref, 4, U, k), abs=1e-9)

    def test_k1_is_one(self):
        assert gamma_min(instances.regression(), 1) == 1.0

    def test_submodular_and_modular(self):
        assert gamma_min(instances.coverage(8, seed=2002), 3) == pytest.approx(1.0, abs=1e-9)
        land = Landscape(instances.disjoint_coverage())
        assert all(land.ratio(u, 2) == 1.0 for u in range(8))

    def test_in_unit_interval_for_monotone(self):
        land = Landscape(instances.regression(8, seed=3003))
        for u in range(0, 256, 5):
            assert 0 <= land.ratio(u, 3) <= 1 + 1e-9

    def test_budget_guard(self):
        with pytest.raises(GuardError):
            Landscape(instances.regression()).ratio(0b1111111, 3, budget=100)


class TestEpsilonAndCertify:
    def test_eps_matches_reference(self):
        for f in (instances.perturbed_coverage("additive", 0.1, n=6, seed=8),
                  instances.regression_small(), instances.facility(6, 5, seed=2)):
            assert minimal_additive_epsilon(f) == pytest.approx(O.additive_eps(O.table(f), f.n), abs=1e-12)

    def test_additive_construction_bound(self):
        f = instances.perturbed_coverage("additive", 0.1, n=8, seed=2002)
        assert minimal_additive_epsilon(f) <= 0.1

    def test_zero_for_submodular(self):
        assert minimal_additive_epsilon(instances.coverage(10)) == 0.0
        assert minimal_additive_epsilon(ModularFunction([1.0, -2.0, 0.5])) == 0.0

    def test_cut_flags(self):
        flags = certify_properties(instances.triangle())
        assert flags.monotone == Verdict.FAIL and "monotone" in flags.witnesses
        assert flags.submodular == Verdict.PASS and flags.nonnegative == Verdict.PASS
        w = flags.witnesses["monotone"]
        assert w["f(X+v)"] < w["f(X)"]

    def test_coverage_flags(self):
        flags = certify_properties(instances.coverage(8, seed=2002))
        assert (flags.monotone, flags.submodular, flags.nonnegative) == (Verdict.PASS,) * 3

    def test_regression_flags(self):
        flags = certify_properties(instances.regression())
        assert flags.monotone == Verdict.PASS and flags.nonnegative == Verdict.PASS
        assert flags.submodular == Verdict.FAIL
        w = flags.witnesses["submodular"]
        assert set(w["X"]) <= set(w["Y"]) and w["v"] not in w["Y"] and w["violation"] > 0

    def test_negative_witness(self):
        flags = certify_properties(ModularFunction([1.0, -2.0]))
        assert flags.nonnegative == Verdict.FAIL
        assert flags.witnesses["nonnegative"]["X"] == [1]

    def test_certify_guard(self):
        f = TabulatedFunction(np.zeros(1 << 15))
        with pytest.raises(GuardError):
            certify_properties(f)
        assert certify_properties(f, guard_override=True).monotone == Verdict.PASS

    def test_monotone_implies_normalized(self):
        for f in (instances.coverage(), instances.regression(), instances.facility()):
            land = Landscape(f)
            assert land.certify().monotone == Verdict.PASS and land.table[0] == 0.0


class TestImprovingElement:
    def test_suite_has_no_failures(self):
        for regime, cases in instances.improving_element_suite().items():
            for name, f, k in cases:
                land = Landscape(f)
                if regime == "ratio":
                    assert land.ratio_step_failures(k) == [], name
                elif regime == "additive":
                    assert land.additive_step_failures(k, land.additive_epsilon()) == [], name
                else:
                    assert land.multiplicative_step_failures(k, f.epsilon) == [], name

    def test_detects_a_broken_inequality(self):
        # f = [|X| >= 2]: no single element gains anything from the empty set
        n = 4
        table = [1.0 if bin(m).count("1") >= 2 else 0.0 for m in range(1 << n)]
        land = Landscape(TabulatedFunction(table, monotone=True, nonnegative=True))
        assert 0 in land.additive_step_failures(2, 0.0)
        assert 0 in land.multiplicative_step_failures(2, 0.0)
        assert land.ratio_step_failures(2) == []  # gamma_{0,2} = 0 makes it vacuous there


class TestBounds:
    def test_eps_zero_collapse(self):
        for k in range(1, 30):
            ref = 1 - (1 - 1 / k) ** k
            cmp = bounds.compare_multiplicative_bounds(k, 0.0)
            assert cmp.ours == pytest.approx(ref, abs=1e-15) and cmp.dominates
            assert cmp.greedy_known == pytest.approx(ref, abs=1e-15)
            assert bounds.ratio_guarantee(1.0, k, finite=True) == pytest.approx(ref)
        assert bounds.compare_multiplicative_bounds(1, 0.0).ours == 1.0

    def test_domain(self):
        with pytest.raises(ValueError):
            bounds.compare_multiplicative_bounds(3, 1.0)
        with pytest.raises(ValueError):
            bounds.compare_multiplicative_bounds(0, 0.1)

    def test_series_form_agrees(self):
        for k in (1, 2, 5, 40):
            for eps in (0.0, 0.1, 0.45):
                assert bounds.multiplicative_guarantee(eps, k) == pytest.approx(
                    bounds.multiplicative_guarantee_series(eps, k), rel=1e-12)

    def test_asymptotic_constants(self):
        assert bounds.ratio_guarantee(1.0, 3) == pytest.approx(0.6321205588, abs=1e-10)
        assert bounds.local_optimum_ratio(1.0, 12) == pytest.approx(0.25)


class TestDiagnose:
    def test_coverage_report(self):
        rep = diagnose(instances.coverage(8, seed=2002), 3)
        assert rep.gamma_min == pytest.approx(1.0, abs=1e-9) and rep.eps_additive == 0.0
        assert rep.bounds["submodularity_ratio"]["ratio"] == pytest.approx(1 - math.exp(-1))
        assert rep.to_dict()["flags"]["monotone"] == "pass"

    def test_cut_suppressed(self):
        rep = diagnose(instances.triangle(), 2)
        assert "suppressed" in rep.bounds["constrained"]
        assert rep.gamma_min is None

    def test_multiplicative_uses_construction_eps(self):
        rep = diagnose(instances.perturbed_coverage("multiplicative", 0.05, n=8, seed=2002), 3)
        assert rep.bounds["multiplicative"]["epsilon"] == 0.05
