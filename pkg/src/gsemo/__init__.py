"""GSEMO with complement offspring for subset selection under approximate submodularity."""
from ._backend import COMPILED as HAVE_COMPILED
from .baselines import LocalSearchConfig, approximate_local_search, double_greedy, standard_greedy
from .core import GroundSet, ObjectiveVector, ParetoArchive, Solution, dominates, weakly_dominates
from .diagnostics import (
    Landscape,
    brute_force_opt,
    certify_properties,
    diagnose,
    gamma_min,
    minimal_additive_epsilon,
    submodularity_ratio,
)
from .bounds import compare_multiplicative_bounds
from .engines import RunConfig, RunResult, TraceRecord, complement, gsemo, mutate, one_plus_one_ea
from .errors import GuardError, InstanceParseError, InvariantError
from .objectives import (
    CoverageFunction,
    CoverageInstance,
    CutFunction,
    FacilityLocationFunction,
    FacilityLocationInstance,
    FunctionOracle,
    ModularFunction,
    PerturbedFunction,
    RegressionInstance,
    RegressionR2,
    SetFunction,
    TabulatedFunction,
    WeightedGraph,
)

__version__ = "0.1.0"
