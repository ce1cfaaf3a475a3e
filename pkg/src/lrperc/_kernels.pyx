# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled pair-sampling and labeling kernels.

Bit-compatible with the numpy fallback in ``_kernels_py``: same
counter-based RNG, same pair enumeration, same occupancy rule, same
distance-power tables.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, log, pow
from libc.stdint cimport int64_t, uint64_t

cnp.import_array()

BACKEND_NAME = "cython"

cdef uint64_t _M1 = 0xBF58476D1CE4E5B9ULL
cdef uint64_t _M2 = 0x94D049BB133111EBULL
cdef uint64_t _GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t _INDEX_MULT = 0xD1342543DE82EF95ULL
cdef double _INV_2_53 = 1.0 / 9007199254740992.0

cdef uint64_t TAG_EDGE = 0x45444745ULL

cdef int64_t _RSQ_TABLE_CAP = 1 << 24


cdef inline uint64_t mix64(uint64_t z) nogil:
    z = (z ^ (z >> 30)) * _M1
    z = (z ^ (z >> 27)) * _M2
    return z ^ (z >> 31)


cdef inline uint64_t stream_key_c(uint64_t seed, uint64_t tag) nogil:
    return mix64(mix64(seed ^ _GOLDEN) ^ mix64(tag))


cdef inline double uniform01_c(uint64_t key, uint64_t index) nogil:
    cdef uint64_t h = mix64(key ^ (index * _INDEX_MULT))
    return (<double>(h >> 11) + 0.5) * _INV_2_53


def pair_count(n):
    return n * (n - 1) // 2


cdef _dist_power_table(cnp.ndarray[int64_t, ndim=2] coords, double alpha):
    """Tables matching _kernels_py: by |dx| for d=1, by r^2 for small d>=2."""
    cdef int d = coords.shape[1]
    cdef int64_t span = 0, rsq_max = 0, v, t
    cdef int a
    cdef int64_t n = coords.shape[0]
    cdef int64_t cmin, cmax, i
    cdef cnp.ndarray[double, ndim=1] table
    cdef double halpha = 0.5 * alpha
    rsq_max = 0
    span = 0
    for a in range(d):
        cmin = coords[0, a]
        cmax = coords[0, a]
        for i in range(1, n):
            v = coords[i, a]
            if v < cmin:
                cmin = v
            if v > cmax:
                cmax = v
        t = cmax - cmin
        if t > span:
            span = t
        rsq_max += t * t
    if d == 1:
        table = np.empty(span + 1, dtype=np.float64)
        for i in range(span + 1):
            table[i] = pow(<double>(i * i), halpha)
        return 1, table
    if rsq_max + 1 <= _RSQ_TABLE_CAP:
        table = np.empty(rsq_max + 1, dtype=np.float64)
        for i in range(rsq_max + 1):
            table[i] = pow(<double>i, halpha)
        return 2, table
    return 0, None


def sample_edges(cnp.ndarray[int64_t, ndim=2] coords,
                 cnp.ndarray[double, ndim=1] weights,
                 double lam, double alpha, seed, double rmax=-1.0):
    """Occupied pairs under intensity ``lam``; returns (i, j) index arrays."""
    cdef int64_t n = coords.shape[0]
    cdef int d = coords.shape[1]
    cdef uint64_t key = stream_key_c(<uint64_t>(seed & 0xFFFFFFFFFFFFFFFF), TAG_EDGE)
    cdef double rsq_max = rmax * rmax if rmax >= 0 else -1.0
    cdef list acc_i = [], acc_j = []
    cdef int64_t cap = 65536
    cdef cnp.ndarray[int64_t, ndim=1] bi = np.empty(cap, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] bj = np.empty(cap, dtype=np.int64)
    cdef int64_t m = 0
    cdef int64_t i, j, rsq, dx
    cdef int a, tkind
    cdef uint64_t k = 0
    cdef double u, rate, rpow, wi, halpha = 0.5 * alpha
    cdef cnp.ndarray[double, ndim=1] table
    cdef double[:] tview = None

    if lam <= 0 or n < 2:
        e = np.empty(0, dtype=np.int64)
        return e, e.copy()

    tkind, table = _dist_power_table(coords, alpha)
    if table is not None:
        tview = table

    with nogil:
        for i in range(n - 1):
            wi = weights[i]
            for j in range(i + 1, n):
                if d == 1:
                    dx = coords[i, 0] - coords[j, 0]
                    if dx < 0:
                        dx = -dx
                    rsq = dx * dx
                else:
                    rsq = 0
                    for a in range(d):
                        dx = coords[i, a] - coords[j, a]
                        rsq += dx * dx
                if rsq_max >= 0 and <double>rsq > rsq_max:
                    k += 1
                    continue
                u = uniform01_c(key, k)
                k += 1
                if tkind == 1:
                    rpow = tview[dx]
                elif tkind == 2:
                    rpow = tview[rsq]
                else:
                    rpow = pow(<double>rsq, halpha)
                rate = lam * wi * weights[j] / rpow
                if (1.0 - u) < rate:
                    if u > exp(-rate):
                        if m == cap:
                            with gil:
                                acc_i.append(bi.copy())
                                acc_j.append(bj.copy())
                            m = 0
                        bi[m] = i
                        bj[m] = j
                        m += 1
    acc_i.append(bi[:m].copy())
    acc_j.append(bj[:m].copy())
    return np.concatenate(acc_i), np.concatenate(acc_j)


def sample_phi_edges(cnp.ndarray[int64_t, ndim=2] coords,
                     cnp.ndarray[double, ndim=1] weights,
                     double alpha, seed, double ell_max, double rmax=-1.0):
    """Pairs whose coupled exponential is below ell_max, with its value."""
    cdef int64_t n = coords.shape[0]
    cdef int d = coords.shape[1]
    cdef uint64_t key = stream_key_c(<uint64_t>(seed & 0xFFFFFFFFFFFFFFFF), TAG_EDGE)
    cdef double rsq_max = rmax * rmax if rmax >= 0 else -1.0
    cdef list acc_i = [], acc_j = [], acc_p = []
    cdef int64_t cap = 65536
    cdef cnp.ndarray[int64_t, ndim=1] bi = np.empty(cap, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] bj = np.empty(cap, dtype=np.int64)
    cdef cnp.ndarray[double, ndim=1] bp = np.empty(cap, dtype=np.float64)
    cdef int64_t m = 0
    cdef int64_t i, j, rsq, dx
    cdef int a, tkind
    cdef uint64_t k = 0
    cdef double u, rate, rpow, wi, wprod, halpha = 0.5 * alpha
    cdef cnp.ndarray[double, ndim=1] table
    cdef double[:] tview = None

    if ell_max <= 0 or n < 2:
        e = np.empty(0, dtype=np.int64)
        return e, e.copy(), np.empty(0, dtype=np.float64)

    tkind, table = _dist_power_table(coords, alpha)
    if table is not None:
        tview = table

    with nogil:
        for i in range(n - 1):
            wi = weights[i]
            for j in range(i + 1, n):
                if d == 1:
                    dx = coords[i, 0] - coords[j, 0]
                    if dx < 0:
                        dx = -dx
                    rsq = dx * dx
                else:
                    rsq = 0
                    for a in range(d):
                        dx = coords[i, a] - coords[j, a]
                        rsq += dx * dx
                if rsq_max >= 0 and <double>rsq > rsq_max:
                    k += 1
                    continue
                u = uniform01_c(key, k)
                k += 1
                if tkind == 1:
                    rpow = tview[dx]
                elif tkind == 2:
                    rpow = tview[rsq]
                else:
                    rpow = pow(<double>rsq, halpha)
                wprod = wi * weights[j]
                rate = ell_max * wprod / rpow
                if (1.0 - u) < rate:
                    if u > exp(-rate):
                        if m == cap:
                            with gil:
                                acc_i.append(bi.copy())
                                acc_j.append(bj.copy())
                                acc_p.append(bp.copy())
                            m = 0
                        bi[m] = i
                        bj[m] = j
                        bp[m] = -log(u) * rpow / wprod
                        m += 1
    acc_i.append(bi[:m].copy())
    acc_j.append(bj[:m].copy())
    acc_p.append(bp[:m].copy())
    return np.concatenate(acc_i), np.concatenate(acc_j), np.concatenate(acc_p)


def union_find(n, cnp.ndarray[int64_t, ndim=1] ei, cnp.ndarray[int64_t, ndim=1] ej):
    """Connected-component labels; label = smallest vertex of the component."""
    cdef int64_t nn = n
    cdef cnp.ndarray[int64_t, ndim=1] parent = np.arange(nn, dtype=np.int64)
    cdef int64_t e, a, b, ra, rb, v, nxt
    cdef int64_t ne = ei.shape[0]
    with nogil:
        for e in range(ne):
            a = ei[e]
            b = ej[e]
            ra = a
            while parent[ra] != ra:
                ra = parent[ra]
            v = a
            while parent[v] != ra:
                nxt = parent[v]
                parent[v] = ra
                v = nxt
            rb = b
            while parent[rb] != rb:
                rb = parent[rb]
            v = b
            while parent[v] != rb:
                nxt = parent[v]
                parent[v] = rb
                v = nxt
            if ra != rb:
                if ra < rb:
                    parent[rb] = ra
                else:
                    parent[ra] = rb
    cdef cnp.ndarray[int64_t, ndim=1] labels = np.empty(nn, dtype=np.int64)
    with nogil:
        for v in range(nn):
            ra = v
            while parent[ra] != ra:
                ra = parent[ra]
            a = v
            while parent[a] != ra:
                nxt = parent[a]
                parent[a] = ra
                a = nxt
            labels[v] = ra
    return labels
