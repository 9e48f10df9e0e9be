# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled kernels.  Mirrors ``_purepy`` operation for operation.

Masks are 64-bit, so the permanent kernel takes n <= 26 (int128 headroom for
products of row sums) and the recursion kernel takes up to 64 vertices.
Callers fall back to the pure-Python kernels outside those limits.
"""

from libc.stdint cimport uint64_t, int64_t
from libcpp.vector cimport vector
from libcpp.unordered_map cimport unordered_map
from libcpp.pair cimport pair
from cython.operator cimport dereference as deref

cdef extern from *:
    """
    typedef __int128 permlab_i128;
    static inline int permlab_popcount(unsigned long long x) { return __builtin_popcountll(x); }
    static inline int permlab_ctz(unsigned long long x) { return __builtin_ctzll(x); }
    static inline long long permlab_hi(permlab_i128 x) { return (long long)(x >> 64); }
    static inline unsigned long long permlab_lo(permlab_i128 x) { return (unsigned long long)x; }
    """
    ctypedef long long i128 "permlab_i128"
    int popcount "permlab_popcount"(unsigned long long) nogil
    int ctz "permlab_ctz"(unsigned long long) nogil
    long long i128_hi "permlab_hi"(i128) nogil
    unsigned long long i128_lo "permlab_lo"(i128) nogil

MAX_PERMANENT_N = 26
MAX_VERTICES = 64


cdef i128 _ryser(const uint64_t* rows, int n) noexcept nogil:
    cdef i128 total = 0
    cdef i128 prod
    cdef uint64_t subset = 0
    cdef uint64_t k
    cdef uint64_t top = (<uint64_t>1) << n
    cdef int i, c
    k = 1
    while k < top:
        subset ^= (<uint64_t>1) << ctz(k)
        prod = 1
        for i in range(n):
            c = popcount(rows[i] & subset)
            if c == 0:
                prod = 0
                break
            prod *= c
        if prod != 0:
            if popcount(subset) & 1:
                total -= prod
            else:
                total += prod
        k += 1
    if n & 1:
        total = -total
    return total


def permanent_rows(rows, int n):
    if n == 0:
        return 1
    if n > MAX_PERMANENT_N:
        raise ValueError(f"native permanent supports n <= {MAX_PERMANENT_N}")
    cdef vector[uint64_t] r
    for x in rows:
        if x == 0:
            return 0
        r.push_back(<uint64_t>x)
    cdef i128 res
    with nogil:
        res = _ryser(r.data(), n)
    return (int(i128_hi(res)) << 64) + int(i128_lo(res))


ctypedef pair[double, double] dpair


cdef class _Decay:
    cdef vector[uint64_t] adj
    cdef double lam
    cdef vector[unordered_map[uint64_t, dpair]] memo

    def __init__(self, adj, double lam):
        for x in adj:
            self.adj.push_back(<uint64_t>x)
        self.lam = lam
        self.memo.resize(self.adj.size())

    cdef dpair rec(self, int u, uint64_t gone, int d) noexcept nogil:
        cdef uint64_t nb = self.adj[u] & ~gone
        cdef dpair out
        if nb == 0:
            out.first = 1.0
            out.second = 1.0
            return out
        if d == 0:
            out.first = 1.0
            out.second = 1.0 / (1.0 + self.lam * popcount(nb))
            return out
        cdef unordered_map[uint64_t, dpair].iterator it = self.memo[u].find(gone)
        if it != self.memo[u].end():
            return deref(it).second
        cdef uint64_t inner = gone | ((<uint64_t>1) << u)
        cdef double sa = 0.0
        cdef double sb = 0.0
        cdef dpair sub
        cdef uint64_t low
        while nb:
            low = nb & (~nb + 1)
            sub = self.rec(ctz(low), inner, d - 1)
            sa += sub.first
            sb += sub.second
            nb ^= low
        out.first = 1.0 / (1.0 + self.lam * sa)
        out.second = 1.0 / (1.0 + self.lam * sb)
        self.memo[u][gone] = out
        return out


def unmatched_bracket(adj, removed, int v, double lam, int depth):
    if len(adj) > MAX_VERTICES:
        raise ValueError(f"native recursion supports at most {MAX_VERTICES} vertices")
    cdef _Decay dec = _Decay(adj, lam)
    cdef uint64_t gone = <uint64_t>removed
    cdef dpair res
    with nogil:
        res = dec.rec(v, gone, depth)
    return res.first, res.second


def neighborhood_table(masks, int n):
    cdef vector[uint64_t] m
    for x in masks:
        m.push_back(<uint64_t>x)
    cdef uint64_t size = (<uint64_t>1) << n
    cdef vector[uint64_t] table
    table.resize(size)
    cdef uint64_t s, low
    with nogil:
        s = 1
        while s < size:
            low = s & (~s + 1)
            table[s] = table[s ^ low] | m[ctz(low)]
            s += 1
    return [table[i] for i in range(size)]
