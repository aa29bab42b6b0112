"""Closed-form approximation guarantees.

The ``finite`` forms are the guarantees reached after ``k`` improving steps,
e.g. ``1 - (1 - 1/k)**k``; the asymptotic forms replace ``(1 - 1/k)**k`` by
``1/e``.
"""
import math
from typing import NamedTuple


def _check_k(k):
    if int(k) != k or k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")


def _check_eps(eps):
    if not 0 <= eps < 1:
        raise ValueError(f"epsilon must lie in [0, 1), got {eps}")


def local_optimum_ratio(eps: float, n: int) -> float:
    """Guarantee of the better of an approximate local optimum and its complement."""
    return 1.0 / 3.0 - eps / n


def greedy_ratio(k: int, finite: bool = True) -> float:
    _check_k(k)
    return 1.0 - (1.0 - 1.0 / k) ** k if finite else 1.0 - math.exp(-1.0)


def additive_guarantee(opt: float, k: int, eps: float, finite: bool = False) -> float:
    """Value guaranteed for an ``eps``-approximately submodular (additive) objective."""
    return greedy_ratio(k, finite) * (opt - k * eps)


def ratio_guarantee(gamma: float, k: int, finite: bool = False) -> float:
    """Fraction of OPT guaranteed under submodularity ratio ``gamma``."""
    _check_k(k)
    if finite:
        return 1.0 - (1.0 - gamma / k) ** k
    return 1.0 - math.exp(-gamma)


def multiplicative_guarantee(eps: float, k: int, finite: bool = True) -> float:
    """Fraction of OPT guaranteed for ``(1 +- eps)``-sandwiched objectives."""
    _check_k(k)
    _check_eps(eps)
    shrink = ((1.0 - eps) / (1.0 + eps)) ** k
    decay = (1.0 - 1.0 / k) ** k if finite else math.exp(-1.0)
    return (1.0 - decay * shrink) / (1.0 + 2.0 * k * eps / (1.0 - eps))


def greedy_multiplicative_guarantee(eps: float, k: int) -> float:
    """The previously known standard-greedy guarantee for the same class."""
    _check_k(k)
    _check_eps(eps)
    shrink = ((1.0 - eps) / (1.0 + eps)) ** (2 * k)
    decay = (1.0 - 1.0 / k) ** k
    return (1.0 - decay * shrink) / (1.0 + 4.0 * k * eps / (1.0 - eps) ** 2)


def multiplicative_guarantee_series(eps: float, k: int) -> float:
    """Geometric-series form of :func:`multiplicative_guarantee` (finite k)."""
    _check_k(k)
    _check_eps(eps)
    q = (1.0 - eps) / (1.0 + eps)
    r = (1.0 - 1.0 / k) * q
    return q / k * sum(r ** i for i in range(k))


class BoundComparison(NamedTuple):
    ours: float
    greedy_known: float
    dominates: bool


def compare_multiplicative_bounds(k: int, eps: float) -> BoundComparison:
    ours = multiplicative_guarantee(eps, k)
    known = greedy_multiplicative_guarantee(eps, k)
    return BoundComparison(ours, known, ours >= known)
