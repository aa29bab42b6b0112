"""Pure-Python GSEMO and (1+1)-EA loops.

Same draws, same order and same archive rule as the compiled kernels in
``_kernels.pyx``; the two must stay in lockstep.
"""
import math

from .core import ParetoArchive, Solution
from .errors import InvariantError
from .rng import RawStream, index_below, random_bits, uniforms


def mutate(x: Solution, stream: RawStream) -> Solution:
    """Flip each bit independently with probability 1/n; the parent is untouched."""
    n = x.n
    flips = uniforms(stream.take(n)) < 1.0 / n
    return Solution(x.bits ^ flips)


def complement(x: Solution) -> Solution:
    return Solution(~x.bits)


def run_gsemo(oracle, bitgen, max_iter, k, trace_every, target, check):
    n = oracle.n
    stream = RawStream(bitgen)
    archive = ParetoArchive(n, check=check)
    x = Solution(random_bits(stream.take(n)))
    val = oracle.value(x.bits)
    calls = 1
    archive.update(x, val)
    best = val if x.size <= k else -math.inf
    first_empty = 0 if archive.slots[0] is not None else -1
    trace = [(0, best, len(archive))]
    it = 0
    while it < max_iter:
        if target is not None and best >= target:
            break
        it += 1
        pop = archive.solutions()
        parent = pop[index_below(stream.next(), len(pop))]
        child = mutate(parent, stream)
        for y in (child, complement(child)):
            val = oracle.value(y.bits)
            calls += 1
            if archive.update(y, val) and y.size <= k and val > best:
                best = val
        if first_empty < 0 and archive.slots[0] is not None:
            first_empty = it
        if check and first_empty >= 0 and archive.slots[0] is None:
            raise InvariantError("empty set left the archive")
        if it % trace_every == 0:
            trace.append((it, best, len(archive)))
    if trace[-1][0] != it:
        trace.append((it, best, len(archive)))
    return archive, it, calls, trace, first_empty


def run_oneplusone(oracle, bitgen, max_iter, k, trace_every, target):
    n = oracle.n
    stream = RawStream(bitgen)
    x = Solution(random_bits(stream.take(n)))
    vx = oracle.value(x.bits)
    calls = 1
    best = vx if x.size <= k else -math.inf
    trace = [(0, best, 1)]
    it = 0
    while it < max_iter:
        if target is not None and best >= target:
            break
        it += 1
        child = mutate(x, stream)
        vc = oracle.value(child.bits)
        calls += 1
        if child.size <= k:
            accept = x.size > k or vc >= vx
        else:
            accept = x.size > k and child.size <= x.size
        if accept:
            x, vx = child, vc
        if x.size <= k and vx > best:
            best = vx
        if it % trace_every == 0:
            trace.append((it, best, 1))
    if trace[-1][0] != it:
        trace.append((it, best, 1))
    return x.with_value(vx), it, calls, trace

