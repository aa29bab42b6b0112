"""Exhaustive ground truth for small ground sets.

A :class:`Landscape` tabulates ``f`` over all ``2**n`` subsets once (bit ``i``
of the index is element ``i``) and answers every question from the table:
constrained optimum, submodularity ratio, the least additive slack, property
certification, and the improving-element inequalities behind the GSEMO
guarantees.
"""
from __future__ import annotations

import enum
import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _backend, bounds
from .core import Solution
from .errors import GuardError

log = logging.getLogger(__name__)

MAX_N = 24
MAX_N_OVERRIDE = 28
CERTIFY_MAX_N = 14
RATIO_BUDGET = 10 ** 8
DEN_CUTOFF = 1e-12


def _guard(n, limit, hard, override, what):
    if n <= limit:
        return
    if override and n <= hard:
        log.warning("%s over n=%d exceeds the default limit %d", what, n, limit)
        return
    raise GuardError(f"{what} refused: n={n} exceeds the limit of {hard if override else limit}")


def tabulate(oracle, guard_override: bool = False) -> np.ndarray:
    """``f`` on every subset, indexed by bitmask (counts ``2**n`` oracle calls)."""
    n = oracle.n
    _guard(n, MAX_N, MAX_N_OVERRIDE, guard_override, "exhaustive enumeration")
    if _backend.COMPILED:
        K = _backend.kernels()
        table = K.tabulate(oracle.compiled_kernel(K))
    else:
        table = np.empty(1 << n)
        bits = np.zeros(n, dtype=bool)
        for mask in range(1 << n):
            for i in range(n):
                bits[i] = (mask >> i) & 1
            table[mask] = oracle.value(bits)
    oracle.calls += 1 << n
    return table


def popcounts(n: int) -> np.ndarray:
    pc = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        pc[1 << i: 2 << i] = pc[: 1 << i] + 1
    return pc


def submasks(mask: int):
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def mask_indices(mask: int) -> tuple:
    return tuple(i for i in range(mask.bit_length()) if (mask >> i) & 1)


class Verdict(str, enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    UNKNOWN = "unknown"


@dataclass
class PropertyFlags:
    monotone: Verdict = Verdict.UNKNOWN
    submodular: Verdict = Verdict.UNKNOWN
    nonnegative: Verdict = Verdict.UNKNOWN
    witnesses: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "monotone": self.monotone.value,
            "submodular": self.submodular.value,
            "nonnegative": self.nonnegative.value,
            "witnesses": self.witnesses,
        }


class Landscape:
    """Full value table of an oracle plus the exhaustive queries on it."""

    def __init__(self, oracle, guard_override: bool = False, table=None):
        self.oracle = oracle
        self.n = oracle.n
        self.guard_override = guard_override
        self.table = tabulate(oracle, guard_override) if table is None else np.asarray(table)
        self.sizes = popcounts(self.n)
        self._s_cache = {}

    def solution(self, mask: int) -> Solution:
        return Solution.from_mask(self.n, mask, self.table[mask])

    # -- optimum ------------------------------------------------------------

    def opt(self, k: Optional[int] = None) -> tuple:
        """Maximum of ``f`` over subsets of size <= k, with its argmax.

        Ties go to the smaller subset, then to the lexicographically
        smallest list of element indices.
        """
        if k is None:
            vals = self.table
        else:
            if k < 0:
                raise ValueError("k must be >= 0")
            vals = np.where(self.sizes <= k, self.table, -np.inf)
        best = vals.max()
        ties = np.flatnonzero(vals == best)
        smallest = self.sizes[ties].min()
        ties = ties[self.sizes[ties] == smallest]
        arg = min((int(t) for t in ties), key=mask_indices)
        return float(best), self.solution(arg)

    # -- submodularity ratio ------------------------------------------------

    def _s_sets(self, rest: tuple, k: int):
        key = (rest, k)
        if key not in self._s_cache:
            masks, rows = [], []
            for size in range(1, min(k, len(rest)) + 1):
                for combo in itertools.combinations(range(len(rest)), size):
                    masks.append(sum(1 << rest[c] for c in combo))
                    row = np.zeros(len(rest))
                    row[list(combo)] = 1.0
                    rows.append(row)
            self._s_cache[key] = (
                np.array(masks, dtype=np.int64),
                np.array(rows).reshape(len(masks), len(rest)),
            )
        return self._s_cache[key]

    def ratio(self, u: int, k: int, budget: int = RATIO_BUDGET) -> float:
        """Submodularity ratio of ``f`` w.r.t. the subset ``u`` (a bitmask) and ``k``.

        Minimum over ``L`` inside ``u`` and ``1 <= |S| <= k`` disjoint from
        ``u`` of the summed singleton gains over the joint gain.  Pairs whose
        joint gain is at most 1e-12 are skipped; if all are, the ratio is 1.
        """
        if k < 1:
            raise ValueError("k must be >= 1")
        rest = tuple(i for i in range(self.n) if not (u >> i) & 1)
        smasks, member = self._s_sets(rest, k)
        cost = (1 << int(self.sizes[u])) * len(smasks)
        if cost > budget:
            raise GuardError(f"submodularity ratio needs {cost} evaluations, budget {budget}")
        if not len(smasks):
            return 1.0
        T = self.table
        rest_bits = np.array([1 << i for i in rest], dtype=np.int64)
        best = math.inf
        for L in submasks(u):
            base = T[L]
            gains = T[L | rest_bits] - base
            num = member @ gains
            den = T[L | smasks] - base
            ok = den > DEN_CUTOFF
            if ok.any():
                best = min(best, float((num[ok] / den[ok]).min()))
        return 1.0 if best == math.inf else best

    def gamma_min(self, k: int, budget: int = RATIO_BUDGET) -> float:
        """Smallest ratio over all subsets of size ``k - 1``."""
        if not 1 <= k <= self.n:
            raise ValueError(f"k={k} outside 1..{self.n}")
        us = np.flatnonzero(self.sizes == k - 1)
        per = (1 << (k - 1)) * len(self._s_sets(tuple(range(self.n - k + 1)), k)[0])
        if per * len(us) > budget:
            raise GuardError(f"gamma_min needs {per * len(us)} evaluations, budget {budget}")
        return min(self.ratio(int(u), k, budget) for u in us)

    # -- additive slack and certification -----------------------------------------

    def _certify_guard(self):
        _guard(self.n, CERTIFY_MAX_N, MAX_N, self.guard_override, "property certification")

    def _marginals(self, v: int) -> np.ndarray:
        # gain of adding v to every subset not containing v; +inf elsewhere
        idx = np.arange(1 << self.n, dtype=np.int64)
        bit = 1 << v
        M = np.full(1 << self.n, np.inf)
        without = (idx & bit) == 0
        M[without] = self.table[idx[without] | bit] - self.table[without]
        return M

    def additive_epsilon_witness(self) -> tuple:
        """Largest ``[f(Y+v) - f(Y)] - [f(X+v) - f(X)]`` over ``X <= Y``, ``v`` not in ``Y``.

        Returns ``(amount, X, Y, v)``; computed with a subset-minimum sweep
        per element instead of enumerating all ``3**n`` pairs.
        """
        self._certify_guard()
        n = self.n
        best, arg = -math.inf, None
        for v in range(n):
            M = self._marginals(v)
            lo = M.copy()
            for j in range(n):
                if j == v:
                    continue
                view = lo.reshape(-1, 2, 1 << j)
                np.minimum(view[:, 1, :], view[:, 0, :], out=view[:, 1, :])
            finite = np.isfinite(M)
            gap = np.where(finite, M - np.where(finite, lo, 0.0), -np.inf)
            y = int(np.argmax(gap))
            if gap[y] > best:
                best, arg = float(gap[y]), (y, v)
        y, v = arg
        x = min(submasks(y), key=lambda s: (self.table[s | (1 << v)] - self.table[s], s))
        return best, x, y, v

    def additive_epsilon(self) -> float:
        """Least slack for which diminishing returns hold (0 iff submodular)."""
        return max(0.0, self.additive_epsilon_witness()[0])

    def monotone_violation(self, tol: float = 0.0):
        """``(X, v)`` with ``f(X + v) < f(X) - tol``, smallest ``X`` first; None if monotone."""
        found = None
        for v in range(self.n):
            M = self._marginals(v)
            bad = np.flatnonzero(M < -tol)
            if bad.size:
                key = np.lexsort((bad, self.sizes[bad]))[0]
                cand = (int(self.sizes[bad[key]]), int(bad[key]), v)
                if found is None or cand < found:
                    found = cand
        return None if found is None else (found[1], found[2])

    def certify(self, tol: float = 1e-12) -> PropertyFlags:
        """Exhaustively check monotonicity, submodularity and non-negativity."""
        self._certify_guard()
        flags = PropertyFlags()
        mv = self.monotone_violation(tol)
        flags.monotone = Verdict.PASS if mv is None else Verdict.FAIL
        if mv is not None:
            x, v = mv
            flags.witnesses["monotone"] = {
                "X": list(mask_indices(x)), "v": v,
                "f(X)": float(self.table[x]), "f(X+v)": float(self.table[x | (1 << v)]),
            }
        amount, x, y, v = self.additive_epsilon_witness()
        flags.submodular = Verdict.PASS if amount <= tol else Verdict.FAIL
        if amount > tol:
            flags.witnesses["submodular"] = {
                "X": list(mask_indices(x)), "Y": list(mask_indices(y)), "v": v,
                "violation": amount,
            }
        neg = np.flatnonzero(self.table < 0)
        flags.nonnegative = Verdict.PASS if not neg.size else Verdict.FAIL
        if neg.size:
            w = int(neg[np.lexsort((neg, self.sizes[neg]))[0]])
            flags.witnesses["nonnegative"] = {"X": list(mask_indices(w)), "f(X)": float(self.table[w])}
        return flags

    # -- improving-element inequalities -----------------------------------------

    def _improving_check(self, k, required):
        # every x != V must have some v outside x whose gain meets required(x, f(x))
        full = (1 << self.n) - 1
        T = self.table
        failures = []
        for x in range(full):
            need = required(x, T[x])
            gains = [T[x | (1 << v)] for v in range(self.n) if not (x >> v) & 1]
            if max(gains) < need:
                failures.append(x)
        return failures

    def ratio_step_failures(self, k: int, tol: float = 1e-9) -> list:
        """Subsets with no ``v`` such that ``f(x+v) - f(x) >= gamma_{x,k}/k (OPT_k - f(x))``."""
        opt = self.opt(k)[0]
        slack = tol * max(1.0, abs(opt))
        return self._improving_check(
            k, lambda x, fx: fx + self.ratio(x, k) / k * (opt - fx) - slack)

    def additive_step_failures(self, k: int, eps: float, tol: float = 1e-9) -> list:
        """Subsets with no ``v`` such that ``f(x+v) - f(x) >= (OPT_k - f(x))/k - eps``."""
        opt = self.opt(k)[0]
        slack = tol * max(1.0, abs(opt))
        return self._improving_check(k, lambda x, fx: fx + (opt - fx) / k - eps - slack)

    def multiplicative_step_failures(self, k: int, eps: float, tol: float = 1e-9) -> list:
        """Subsets with no ``v`` such that
        ``f(x+v) - q f(x) >= q (OPT_k - f(x)) / k`` where ``q = (1-eps)/(1+eps)``."""
        opt = self.opt(k)[0]
        q = (1.0 - eps) / (1.0 + eps)
        slack = tol * max(1.0, abs(opt))
        return self._improving_check(k, lambda x, fx: q * fx + q * (opt - fx) / k - slack)


def is_approximate_local_optimum(oracle, x: Solution, alpha: float) -> bool:
    """No single insertion or deletion exceeds ``(1 + alpha) f(x)``."""
    fx = oracle.value(x.bits)
    limit = (1.0 + alpha) * fx
    bits = x.bits.copy()
    for i in range(oracle.n):
        bits[i] = not bits[i]
        better = oracle.value(bits) > limit
        bits[i] = not bits[i]
        if better:
            return False
    return True


# -- module-level conveniences -----------------------------------------------------


def brute_force_opt(oracle, k: Optional[int] = None, guard_override: bool = False) -> tuple:
    return Landscape(oracle, guard_override).opt(k)


def submodularity_ratio(oracle, u: Solution, k: int, budget: int = RATIO_BUDGET) -> float:
    return Landscape(oracle).ratio(u.mask, k, budget)


def gamma_min(oracle, k: int, budget: int = RATIO_BUDGET) -> float:
    return Landscape(oracle).gamma_min(k, budget)


def minimal_additive_epsilon(oracle, guard_override: bool = False) -> float:
    return Landscape(oracle, guard_override).additive_epsilon()


def certify_properties(oracle, tol: float = 1e-12, guard_override: bool = False) -> PropertyFlags:
    return Landscape(oracle, guard_override).certify(tol)


@dataclass
class DiagnosticsReport:
    n: int
    k: Optional[int]
    opt: float
    opt_arg: Solution
    gamma_min: Optional[float]
    eps_additive: Optional[float]
    flags: PropertyFlags
    bounds: dict

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "opt": self.opt,
            "opt_subset": self.opt_arg.to_bitstring(),
            "gamma_min": self.gamma_min,
            "eps_additive": self.eps_additive,
            "flags": self.flags.to_dict(),
            "bounds": self.bounds,
        }


def diagnose(oracle, k: Optional[int] = None, local_eps: float = 1.0,
             guard_override: bool = False) -> DiagnosticsReport:
    """Optimum, gamma_min, additive slack, property flags and the implied guarantees."""
    land = Landscape(oracle, guard_override)
    opt, arg = land.opt(k)
    flags = land.certify()
    eps = land.additive_epsilon()
    gamma = None
    out = {}
    if flags.submodular == Verdict.PASS and flags.nonnegative == Verdict.PASS:
        out["unconstrained_local_search_ratio"] = bounds.local_optimum_ratio(local_eps, land.n)
    if k is None:
        pass
    elif flags.monotone != Verdict.PASS:
        out["constrained"] = "suppressed: the size-constrained guarantees require a monotone f"
    else:
        gamma = land.gamma_min(k)
        out["additive"] = {
            "epsilon": eps,
            "value": bounds.additive_guarantee(opt, k, eps),
            "value_finite_k": bounds.additive_guarantee(opt, k, eps, finite=True),
        }
        out["submodularity_ratio"] = {
            "gamma_min": gamma,
            "ratio": bounds.ratio_guarantee(gamma, k),
            "ratio_finite_k": bounds.ratio_guarantee(gamma, k, finite=True),
        }
        mult_eps = None
        if getattr(oracle, "mode", None) == "multiplicative":
            mult_eps = oracle.epsilon
        elif flags.submodular == Verdict.PASS:
            mult_eps = 0.0
        if mult_eps is not None and mult_eps < 1:
            out["multiplicative"] = {
                "epsilon": mult_eps,
                "ratio": bounds.multiplicative_guarantee(mult_eps, k, finite=False),
                "ratio_finite_k": bounds.multiplicative_guarantee(mult_eps, k),
            }
    return DiagnosticsReport(land.n, k, opt, arg, gamma, eps, flags, out)
