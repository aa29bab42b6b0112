# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: native set-function evaluators and the GSEMO and
(1+1)-EA iteration kernels.

Arithmetic in every evaluator follows the accumulation order of the Python
evaluators in ``objectives.py``; random draws follow ``rng.py``.  Changing
either side alone breaks backend parity.
"""
import numpy as np

from libc.stdint cimport uint8_t, uint64_t, int64_t
from libc.string cimport memcpy
from libc.math cimport INFINITY
from cpython.pycapsule cimport PyCapsule_GetPointer
from numpy.random cimport bitgen_t

from .errors import InvariantError

cdef double TWO_M53 = 1.0 / 9007199254740992.0
cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL


cdef inline uint64_t mix64(uint64_t z) noexcept:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline uint64_t next_raw(bitgen_t* rng) noexcept:
    return rng.next_uint64(rng.state)


cdef class Kernel:
    cdef public Py_ssize_t n

    cdef double eval(self, uint8_t* bits) except? -1.0:
        raise NotImplementedError

    def evaluate(self, bits):
        arr = np.ascontiguousarray(np.asarray(bits, dtype=bool)).view(np.uint8)
        if arr.shape[0] != self.n:
            raise ValueError(f"expected {self.n} bits, got {arr.shape[0]}")
        cdef uint8_t[::1] b = arr
        return self.eval(&b[0])


cdef class PyKernel(Kernel):
    cdef object oracle
    cdef object buf
    cdef uint8_t[::1] view

    def __init__(self, oracle, Py_ssize_t n):
        self.n = n
        self.oracle = oracle
        self.buf = np.zeros(n, dtype=bool)
        self.view = self.buf.view(np.uint8)

    cdef double eval(self, uint8_t* bits) except? -1.0:
        memcpy(&self.view[0], bits, self.n)
        return float(self.oracle.value(self.buf.copy()))


cdef class TableKernel(Kernel):
    cdef double[::1] table

    def __init__(self, Py_ssize_t n, double[::1] table):
        if n > 62:
            raise ValueError("tabulated functions need n <= 62")
        self.n = n
        self.table = table

    cdef double eval(self, uint8_t* bits) except? -1.0:
        cdef uint64_t mask = 0
        cdef Py_ssize_t i
        for i in range(self.n):
            if bits[i]:
                mask |= (<uint64_t>1) << i
        return self.table[mask]


cdef class ModularKernel(Kernel):
    cdef double[::1] w

    def __init__(self, Py_ssize_t n, double[::1] w):
        self.n = n
        self.w = w

    cdef double eval(self, uint8_t* bits) except? -1.0:
        cdef double total = 0.0
        cdef Py_ssize_t i
        for i in range(self.n):
            if bits[i]:
                total += self.w[i]
        return total


cdef class CutKernel(Kernel):
    cdef Py_ssize_t[::1] eu
    cdef Py_ssize_t[::1] ev
    cdef double[::1] ew

    def __init__(self, Py_ssize_t n, Py_ssize_t[::1] eu, Py_ssize_t[::1] ev, double[::1] ew):
        self.n = n
        self.eu = eu
        self.ev = ev
        self.ew = ew

    cdef double eval(self, uint8_t* bits) except? -1.0:
        cdef double total = 0.0
        cdef Py_ssize_t e
        for e in range(self.ew.shape[0]):
            if bits[self.eu[e]] != bits[self.ev[e]]:
                total += self.ew[e]
        return total


cdef class CoverageKernel(Kernel):
    cdef Py_ssize_t m
    cdef Py_ssize_t[::1] indptr
    cdef Py_ssize_t[::1] items
    cdef double[::1] weights
    cdef uint8_t[::1] covered

    def __init__(self, Py_ssize_t n, Py_ssize_t m, Py_ssize_t[::1] indptr,
                 Py_ssize_t[::1] items, double[::1] weights):
        self.n = n
        self.m = m
        self.indptr = indptr
        self.items = items
        self.weights = weights
        self.covered = np.zeros(max(m, 1), dtype=np.uint8)

    cdef double eval(self, uint8_t* bits) except? -1.0:
        cdef Py_ssize_t e, p, i
        cdef double total = 0.0
        for i in range(self.m):
            self.covered[i] = 0
        for e in range(self.n):
            if bits[e]:
                for p in range(self.indptr[e], self.indptr[e + 1]):
                    self.covered[self.items[p]] = 1
        for i in range(self.m):
            if self.covered[i]:
                total += self.weights[i]
        return total


cdef class FacilityKernel(Kernel):
    cdef double[:, ::1] benefit
    cdef double[::1] costs

    def __init__(self, Py_ssize_t n, double[:, ::1] benefit, double[::1] costs):
        self.n = n
        self.benefit = benefit
        self.costs = costs

    cdef double eval(self, uint8_t* bits) except? -1.0:
        cdef Py_ssize_t c, j
        cdef double total = 0.0, best
        for c in range(self.benefit.shape[0]):
            best = 0.0
            for j in range(self.n):
                if bits[j] and self.benefit[c, j] > best:
                    best = self.benefit[c, j]
            total += best
        for j in range(self.n):
            if bits[j]:
                total -= self.costs[j]
        return total


cdef class RegressionKernel(Kernel):
    cdef double[:, ::1] gram
    cdef double[::1] xty
    cdef double yy, tol
    cdef Py_ssize_t[::1] idx
    cdef double[:, ::1] L
    cdef double[::1] d
    cdef double[::1] z

    def __init__(self, Py_ssize_t n, double[:, ::1] gram, double[::1] xty, double yy, double tol):
        self.n = n
        self.gram = gram
        self.xty = xty
        self.yy = yy
        self.tol = tol
        self.idx = np.zeros(n, dtype=np.intp)
        self.L = np.zeros((n, n))
        self.d = np.zeros(n)
        self.z = np.zeros(n)

    cdef double eval(self, uint8_t* bits) except? -1.0:
        cdef Py_ssize_t k = 0, j, a, c, p, ia
        cdef double s, diag, zz, explained = 0.0
        for j in range(self.n):
            if bits[j]:
                self.idx[k] = j
                k += 1
        if k == 0:
            return 0.0
        for a in range(k):
            ia = self.idx[a]
            for c in range(a):
                self.L[a, c] = 0.0
                if self.d[c] == 0.0:
                    continue
                s = self.gram[ia, self.idx[c]]
                for p in range(c):
                    s -= self.L[a, p] * self.L[c, p] * self.d[p]
                self.L[a, c] = s / self.d[c]
            diag = self.gram[ia, ia]
            s = diag
            for p in range(a):
                s -= self.L[a, p] * self.L[a, p] * self.d[p]
            self.d[a] = 0.0
            if diag > 0.0 and s > self.tol * diag:
                self.d[a] = s
            zz = self.xty[ia]
            for p in range(a):
                zz -= self.L[a, p] * self.z[p]
            self.z[a] = zz
            if self.d[a] != 0.0:
                explained += zz * zz / self.d[a]
        return explained / self.yy


cdef class PerturbedKernel(Kernel):
    cdef Kernel base
    cdef bint multiplicative
    cdef double eps, half_eps
    cdef uint64_t seed

    def __init__(self, Py_ssize_t n, Kernel base, bint multiplicative, double eps, uint64_t seed):
        self.n = n
        self.base = base
        self.multiplicative = multiplicative
        self.eps = eps
        self.half_eps = eps * 0.5
        self.seed = seed

    cdef double eval(self, uint8_t* bits) except? -1.0:
        cdef double g = self.base.eval(bits)
        cdef uint64_t h = mix64(self.seed + GOLDEN)
        cdef uint64_t word
        cdef Py_ssize_t start, i, stop, size = 0
        cdef double u = 0.0, r
        start = 0
        while start < self.n:
            stop = min(start + 64, self.n)
            word = 0
            for i in range(start, stop):
                if bits[i]:
                    word |= (<uint64_t>1) << (i - start)
                    size += 1
            h = mix64((h ^ word) + GOLDEN)
            start += 64
        if size > 0:
            u = <double>(h >> 11) * TWO_M53
        if not self.multiplicative:
            return g + self.half_eps * u
        r = (<double>size + u) / (<double>self.n + 1.0)
        return g * (1.0 + self.eps * (2.0 * r - 1.0))


def tabulate(Kernel f):
    """Values of ``f`` on every subset, indexed by bitmask."""
    cdef Py_ssize_t n = f.n, i
    cdef uint64_t mask, total = (<uint64_t>1) << n
    out_np = np.empty(total)
    bits_np = np.zeros(n, dtype=np.uint8)
    cdef double[::1] out = out_np
    cdef uint8_t[::1] bits = bits_np
    for mask in range(total):
        for i in range(n):
            bits[i] = (mask >> i) & 1
        out[mask] = f.eval(&bits[0])
    return out_np


cdef bint archive_update(uint8_t[:, ::1] A, double[::1] V, uint8_t[::1] O, Py_ssize_t n,
                         uint8_t* y, Py_ssize_t ys, double yv) noexcept:
    # only smaller-or-equal sizes can dominate y; only larger-or-equal
    # sizes can be weakly dominated by it
    cdef Py_ssize_t s
    for s in range(ys + 1):
        if O[s] and V[s] >= yv and (s < ys or V[s] > yv):
            return False
    for s in range(ys, n + 1):
        if O[s] and V[s] <= yv:
            O[s] = 0
    memcpy(&A[ys, 0], y, n)
    V[ys] = yv
    O[ys] = 1
    return True


cdef int archive_check(double[::1] V, uint8_t[::1] O, Py_ssize_t n, int64_t first_empty) except -1:
    # incomparable <=> values strictly increase with size across occupied slots
    cdef Py_ssize_t s, prev = -1
    for s in range(n + 1):
        if O[s]:
            if prev >= 0 and not V[s] > V[prev]:
                raise InvariantError(f"slots {prev} and {s} are comparable")
            prev = s
    if first_empty >= 0 and not O[0]:
        raise InvariantError("empty set left the archive")
    return 0


cdef Py_ssize_t occupancy(uint8_t[::1] O, Py_ssize_t n) noexcept:
    cdef Py_ssize_t s, cnt = 0
    for s in range(n + 1):
        cnt += O[s]
    return cnt


def run_gsemo(Kernel f, object bitgen, int64_t max_iter, int64_t k, int64_t trace_every,
              double target, bint has_target, bint check):
    cdef Py_ssize_t n = f.n
    cdef bitgen_t* rng = <bitgen_t*>PyCapsule_GetPointer(bitgen.capsule, "BitGenerator")
    arch_np = np.zeros((n + 1, n), dtype=np.uint8)
    vals_np = np.zeros(n + 1)
    occ_np = np.zeros(n + 1, dtype=np.uint8)
    child_np = np.zeros(n, dtype=np.uint8)
    twin_np = np.zeros(n, dtype=np.uint8)
    order_np = np.zeros(n + 1, dtype=np.intp)
    cdef uint8_t[:, ::1] A = arch_np
    cdef double[::1] V = vals_np
    cdef uint8_t[::1] O = occ_np
    cdef uint8_t[::1] child = child_np
    cdef uint8_t[::1] twin = twin_np
    cdef Py_ssize_t[::1] order = order_np
    cdef double pflip = 1.0 / <double>n
    cdef double best = -INFINITY, val
    cdef Py_ssize_t i, s, cnt, p, size
    cdef uint8_t bit
    cdef int64_t it = 0, calls = 0, first_empty = -1
    trace = []
    with bitgen.lock:
        size = 0
        for i in range(n):
            child[i] = <uint8_t>(next_raw(rng) >> 63)
            size += child[i]
        val = f.eval(&child[0])
        calls = 1
        archive_update(A, V, O, n, &child[0], size, val)
        if size <= k:
            best = val
        if O[0]:
            first_empty = 0
        trace.append((0, best, occupancy(O, n)))
        while it < max_iter:
            if has_target and best >= target:
                break
            it += 1
            cnt = 0
            for s in range(n + 1):
                if O[s]:
                    order[cnt] = s
                    cnt += 1
            p = order[((next_raw(rng) >> 32) * <uint64_t>cnt) >> 32]
            size = 0
            for i in range(n):
                bit = A[p, i]
                if <double>(next_raw(rng) >> 11) * TWO_M53 < pflip:
                    bit ^= 1
                child[i] = bit
                twin[i] = bit ^ 1
                size += bit
            val = f.eval(&child[0])
            calls += 1
            if archive_update(A, V, O, n, &child[0], size, val) and size <= k and val > best:
                best = val
            val = f.eval(&twin[0])
            calls += 1
            if archive_update(A, V, O, n, &twin[0], n - size, val) and n - size <= k and val > best:
                best = val
            if first_empty < 0 and O[0]:
                first_empty = it
            if check:
                archive_check(V, O, n, first_empty)
            if it % trace_every == 0:
                trace.append((it, best, occupancy(O, n)))
    if trace[len(trace) - 1][0] != it:
        trace.append((it, best, occupancy(O, n)))
    return {
        "archive": arch_np.astype(bool),
        "values": vals_np,
        "occupied": occ_np.astype(bool),
        "iterations": it,
        "calls": calls,
        "trace": trace,
        "first_empty": first_empty,
    }


def run_oneplusone(Kernel f, object bitgen, int64_t max_iter, int64_t k, int64_t trace_every,
                   double target, bint has_target):
    cdef Py_ssize_t n = f.n
    cdef bitgen_t* rng = <bitgen_t*>PyCapsule_GetPointer(bitgen.capsule, "BitGenerator")
    x_np = np.zeros(n, dtype=np.uint8)
    child_np = np.zeros(n, dtype=np.uint8)
    cdef uint8_t[::1] x = x_np
    cdef uint8_t[::1] child = child_np
    cdef double pflip = 1.0 / <double>n
    cdef double best = -INFINITY, vx, vc
    cdef Py_ssize_t i, sx = 0, sc
    cdef bint accept
    cdef uint8_t bit
    cdef int64_t it = 0, calls = 0
    trace = []
    with bitgen.lock:
        for i in range(n):
            x[i] = <uint8_t>(next_raw(rng) >> 63)
            sx += x[i]
        vx = f.eval(&x[0])
        calls = 1
        if sx <= k:
            best = vx
        trace.append((0, best, 1))
        while it < max_iter:
            if has_target and best >= target:
                break
            it += 1
            sc = 0
            for i in range(n):
                bit = x[i]
                if <double>(next_raw(rng) >> 11) * TWO_M53 < pflip:
                    bit ^= 1
                child[i] = bit
                sc += bit
            vc = f.eval(&child[0])
            calls += 1
            if sc <= k:
                accept = sx > k or vc >= vx
            else:
                accept = sx > k and sc <= sx
            if accept:
                memcpy(&x[0], &child[0], n)
                vx = vc
                sx = sc
            if sx <= k and vx > best:
                best = vx
            if it % trace_every == 0:
                trace.append((it, best, 1))
    if trace[len(trace) - 1][0] != it:
        trace.append((it, best, 1))
    return {
        "x": x_np.astype(bool),
        "value": vx,
        "best": best,
        "iterations": it,
        "calls": calls,
        "trace": trace,
    }
