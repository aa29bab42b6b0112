"""Built-in instances generated from fixed seeds.

Nothing here reads files: every instance is rebuilt bit-for-bit from the
seed baked into its generator, so verification suites are reproducible
without shipped data.
"""
from __future__ import annotations

import numpy as np

from .objectives import (
    CoverageFunction,
    CoverageInstance,
    CutFunction,
    FacilityLocationFunction,
    FacilityLocationInstance,
    ModularFunction,
    PerturbedFunction,
    RegressionInstance,
    RegressionR2,
    WeightedGraph,
)


def triangle() -> CutFunction:
    return CutFunction(WeightedGraph(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]))


def random_graph(n: int, seed: int, p: float = 0.5, unit: bool = True) -> WeightedGraph:
    """G(n, p) with unit weights or weights uniform in [0.1, 1)."""
    rng = np.random.default_rng(seed)
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                w = 1.0 if unit else float(np.round(rng.uniform(0.1, 1.0), 6))
                edges.append((u, v, w))
    return WeightedGraph(n, edges)


# (generator seed, unit weights)
CUT_GRAPHS = [(1001, True), (1002, True), (1003, False), (1004, False), (1005, False)]


def cut_instances(n: int = 12) -> list:
    return [
        (f"cut-n{n}-{'unit' if unit else 'weighted'}-s{seed}",
         CutFunction(random_graph(n, seed, unit=unit)))
        for seed, unit in CUT_GRAPHS
    ]


def random_coverage(n: int, seed: int, shared: int = 20, per_element: int = 4) -> CoverageInstance:
    """Coverage with integer weights in which every element also owns a private item.

    The private items keep every marginal gain at least 1, so small additive
    perturbations cannot break monotonicity.
    """
    rng = np.random.default_rng(seed)
    covered = []
    for i in range(n):
        items = rng.choice(shared, size=per_element, replace=False)
        covered.append(sorted(int(j) for j in items) + [shared + i])
    weights = [float(w) for w in rng.integers(1, 11, size=shared)]
    weights += [float(w) for w in rng.integers(1, 4, size=n)]
    return CoverageInstance(shared + n, covered, weights)


def coverage(n: int = 12, seed: int = 2001) -> CoverageFunction:
    return CoverageFunction(random_coverage(n, seed))


def perturbed_coverage(mode: str, epsilon: float = 0.05, n: int = 12,
                       seed: int = 2001, perturb_seed: int = 7) -> PerturbedFunction:
    return PerturbedFunction(coverage(n, seed), mode, epsilon, seed=perturb_seed)


def disjoint_coverage(weights=(5.0, 3.0, 1.0)) -> CoverageFunction:
    """Element ``i`` alone covers item ``i``; the function is modular."""
    return CoverageFunction(CoverageInstance(len(weights), [[i] for i in range(len(weights))], weights))


def random_regression(rows: int, cols: int, seed: int, factors: int = 3,
                      noise: float = 0.5) -> RegressionInstance:
    """Correlated design (shared latent factors) with a sparse linear target."""
    rng = np.random.default_rng(seed)
    latent = rng.normal(size=(rows, factors))
    design = latent @ rng.normal(size=(factors, cols)) + noise * rng.normal(size=(rows, cols))
    support = min(3, cols)
    target = design[:, :support] @ rng.normal(size=support) + noise * rng.normal(size=rows)
    return RegressionInstance(design, target)


def regression_small() -> RegressionR2:
    """The 10 x 4 instance."""
    return RegressionR2(random_regression(10, 4, seed=3001))


def regression(n: int = 10, seed: int = 3002) -> RegressionR2:
    return RegressionR2(random_regression(40, n, seed=seed))


def random_facility(customers: int, facilities: int, seed: int,
                    with_costs: bool = False) -> FacilityLocationInstance:
    """Integer benefits in 0..9; costs (if any) stay below the smallest column sum."""
    rng = np.random.default_rng(seed)
    benefit = rng.integers(0, 10, size=(customers, facilities)).astype(float)
    costs = np.zeros(facilities)
    if with_costs:
        budget = benefit.sum(axis=0).min()
        costs = np.floor(rng.dirichlet(np.ones(facilities)) * budget)
    return FacilityLocationInstance(benefit, costs)


def facility(customers: int = 8, facilities: int = 5, seed: int = 4001,
             with_costs: bool = False) -> FacilityLocationFunction:
    return FacilityLocationFunction(random_facility(customers, facilities, seed, with_costs))


def modular(weights=(4.0, 0.0, 2.5, 1.0, 3.0)) -> ModularFunction:
    return ModularFunction(weights)


# -- suites ---------------------------------------------------------------------


def submodular_nonnegative_suite() -> list:
    """Every built-in non-negative submodular instance with n <= 12."""
    return [
        ("triangle", triangle()),
        *cut_instances(12),
        *[(f"cut-n8-s{s}", CutFunction(random_graph(8, s, p=0.4, unit=False))) for s in (1101, 1102)],
        ("coverage-n12", coverage(12)),
        ("coverage-n8", coverage(8, seed=2002)),
        ("coverage-disjoint", disjoint_coverage()),
        ("facility-n5", facility()),
        ("facility-n10", facility(12, 10, seed=4002)),
        ("facility-n6-costs", facility(10, 6, seed=4003, with_costs=True)),
        ("facility-n10-costs", facility(15, 10, seed=4004, with_costs=True)),
        ("modular", modular()),
    ]


def monotone_submodular_suite(max_n: int = 10) -> list:
    """Monotone submodular built-ins with n <= max_n (greedy baseline)."""
    return [(name, f) for name, f in submodular_nonnegative_suite()
            if f.monotone and f.n <= max_n]


def improving_element_suite() -> dict:
    """Instances with n <= 8 for each improving-element inequality, with k."""
    k = 3
    return {
        "ratio": [
            ("regression-n8", regression(8, seed=3003), k),
            ("regression-n4", regression_small(), 2),
            ("coverage-n8", coverage(8, seed=2002), k),
        ],
        "additive": [
            (f"coverage-n8-additive-{eps}", perturbed_coverage("additive", eps, n=8, seed=2002), k)
            for eps in (0.05, 0.5)
        ],
        "multiplicative": [
            (f"coverage-n8-multiplicative-{eps}",
             perturbed_coverage("multiplicative", eps, n=8, seed=2002), k)
            for eps in (0.05, 0.3)
        ],
    }


BUILTIN = {
    "triangle": triangle,
    "coverage": coverage,
    "coverage-disjoint": disjoint_coverage,
    "regression": regression,
    "regression-small": regression_small,
    "facility": facility,
    "facility-costs": lambda: facility(10, 6, seed=4003, with_costs=True),
    "modular": modular,
    **{
        f"cut-n12-{'unit' if unit else 'weighted'}-s{seed}":
            (lambda seed=seed, unit=unit: CutFunction(random_graph(12, seed, unit=unit)))
        for seed, unit in CUT_GRAPHS
    },
}


def builtin(name: str):
    """Fresh oracle for a registered built-in instance name."""
    try:
        factory = BUILTIN[name]
    except KeyError:
        raise ValueError(f"unknown built-in instance {name!r}; choose from {sorted(BUILTIN)}") from None
    return factory()
