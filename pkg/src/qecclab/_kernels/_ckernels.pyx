# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled toric decoding kernel.

Mirrors ``_pykernels.decode_toric_batch`` trial for trial: same defect
order, same DP tie-breaks and the same path conventions.  Trials with more
than DP_LIMIT defects of one type are handed to the Python fallback.
"""

import numpy as np
from libc.stdlib cimport malloc, free

from . import _pykernels

cdef enum:
    MAX_DP = 16

DP_LIMIT = MAX_DP
EXACT_FLAG = 4


cdef extern from *:
    int __builtin_popcount(unsigned int) nogil
    int __builtin_ctz(unsigned int) nogil


cdef inline int _steps(int a, int b, int d, int* direction) nogil:
    cdef int diff = (b - a) % d
    if diff < 0:
        diff += d
    cdef int back = d - diff if diff else 0
    if diff < back or (diff == back and b >= a):
        direction[0] = 1
        return diff
    direction[0] = -1
    return back


cdef inline int _tdelta(int a, int b, int d) nogil:
    cdef int diff = (b - a) % d
    if diff < 0:
        diff += d
    return diff if diff < d - diff else d - diff


cdef void _flip_vertex_path(unsigned char* res, int r, int c, int r2, int c2, int d) nogil:
    cdef int step, count, k
    count = _steps(r, r2, d, &step)
    for k in range(count):
        if step == 1:
            res[d * d + r * d + c] ^= 1
            r = (r + 1) % d
        else:
            r = (r - 1 + d) % d
            res[d * d + r * d + c] ^= 1
    count = _steps(c, c2, d, &step)
    for k in range(count):
        if step == 1:
            res[r * d + c] ^= 1
            c = (c + 1) % d
        else:
            c = (c - 1 + d) % d
            res[r * d + c] ^= 1


cdef void _flip_plaquette_path(unsigned char* res, int r, int c, int r2, int c2, int d) nogil:
    cdef int step, count, k
    count = _steps(r, r2, d, &step)
    for k in range(count):
        if step == 1:
            r = (r + 1) % d
            res[r * d + c] ^= 1
        else:
            res[r * d + c] ^= 1
            r = (r - 1 + d) % d
    count = _steps(c, c2, d, &step)
    for k in range(count):
        if step == 1:
            c = (c + 1) % d
            res[d * d + r * d + c] ^= 1
        else:
            res[d * d + r * d + c] ^= 1
            c = (c - 1 + d) % d


cdef int _match(int m, int* rows, int* cols, int d, int* cost, signed char* choice, int* pair) nogil:
    """Exact DP matching; fills pair[i] for each defect, returns total weight."""
    cdef int full = (1 << m) - 1
    cdef int mask, i, j, rest, best, arg, c
    cost[0] = 0
    for mask in range(1, full + 1):
        if __builtin_popcount(mask) & 1:
            continue
        i = __builtin_ctz(mask)
        rest = mask ^ (1 << i)
        best = 1 << 30
        arg = -1
        j = 0
        while j < m:
            if rest & (1 << j):
                c = _tdelta(rows[i], rows[j], d) + _tdelta(cols[i], cols[j], d) + cost[rest ^ (1 << j)]
                if c < best:
                    best = c
                    arg = j
            j += 1
        cost[mask] = best
        choice[mask] = <signed char>arg
    mask = full
    while mask:
        i = __builtin_ctz(mask)
        j = choice[mask]
        pair[i] = j
        pair[j] = i
        mask ^= (1 << i) | (1 << j)
    return cost[full]


cdef int _decode_one(const unsigned char* codes, int d, unsigned char* rz, unsigned char* rx,
                     int* rows, int* cols, int* pair, int* cost, signed char* choice) nogil:
    """Outcome code, or -1 when a defect count exceeds the DP limit."""
    cdef int n = 2 * d * d, dd = d * d
    cdef int q, r, c, m, k, par, fail_x, fail_z
    cdef unsigned char code
    for q in range(n):
        code = codes[q]
        rz[q] = 1 if (code == 2 or code == 3) else 0
        rx[q] = 1 if (code == 1 or code == 2) else 0

    # vertex defects from Z parts, row-major
    m = 0
    for r in range(d):
        for c in range(d):
            par = rz[r * d + c] ^ rz[r * d + (c - 1 + d) % d] ^ rz[dd + r * d + c] ^ rz[dd + ((r - 1 + d) % d) * d + c]
            if par:
                if m == MAX_DP:
                    return -1
                rows[m] = r
                cols[m] = c
                m += 1
    if m:
        _match(m, rows, cols, d, cost, choice, pair)
        for k in range(m):
            if pair[k] > k:
                _flip_vertex_path(rz, rows[k], cols[k], rows[pair[k]], cols[pair[k]], d)

    # plaquette defects from X parts
    m = 0
    for r in range(d):
        for c in range(d):
            par = rx[r * d + c] ^ rx[((r + 1) % d) * d + c] ^ rx[dd + r * d + c] ^ rx[dd + r * d + (c + 1) % d]
            if par:
                if m == MAX_DP:
                    return -1
                rows[m] = r
                cols[m] = c
                m += 1
    if m:
        _match(m, rows, cols, d, cost, choice, pair)
        for k in range(m):
            if pair[k] > k:
                _flip_plaquette_path(rx, rows[k], cols[k], rows[pair[k]], cols[pair[k]], d)

    # residual Z part against X logicals, X part against Z logicals
    cdef int a = 0, b = 0
    for k in range(d):
        a ^= rz[k * d]          # X1: horizontal edges in column 0
        b ^= rz[dd + k]         # X2: vertical edges in row 0
    fail_z = a | b
    a = 0
    b = 0
    for k in range(d):
        a ^= rx[k]              # Z1: horizontal edges in row 0
        b ^= rx[dd + k * d]     # Z2: vertical edges in column 0
    fail_x = a | b
    a = 0
    for q in range(n):
        a |= rz[q] | rx[q]
    return fail_x + 2 * fail_z + 4 * a


def decode_toric_batch(codes, int d):
    """Outcome codes (plus EXACT_FLAG) for a batch of Pauli code arrays of shape (B, 2*d*d)."""
    arr = np.ascontiguousarray(codes, dtype=np.uint8)
    if arr.ndim != 2:
        raise ValueError("codes must be a 2-D array")
    cdef const unsigned char[:, ::1] av = arr
    cdef Py_ssize_t B = av.shape[0], b
    cdef int n = 2 * d * d
    if arr.shape[1] != n:
        raise ValueError(f"expected {n} qubits per row, got {arr.shape[1]}")
    out = np.zeros(B, dtype=np.int8)
    cdef signed char[:] ov = out
    cdef unsigned char* rz = <unsigned char*>malloc(n)
    cdef unsigned char* rx = <unsigned char*>malloc(n)
    cdef int* rows = <int*>malloc(MAX_DP * sizeof(int))
    cdef int* cols = <int*>malloc(MAX_DP * sizeof(int))
    cdef int* pair = <int*>malloc(MAX_DP * sizeof(int))
    cdef int* cost = <int*>malloc((1 << MAX_DP) * sizeof(int))
    cdef signed char* choice = <signed char*>malloc(1 << MAX_DP)
    cdef int res
    overflow = []
    try:
        with nogil:
            for b in range(B):
                res = _decode_one(&av[b, 0], d, rz, rx, rows, cols, pair, cost, choice)
                ov[b] = <signed char>res
        for b in range(B):
            if ov[b] < 0:
                overflow.append(b)
    finally:
        free(rz); free(rx); free(rows); free(cols); free(pair); free(cost); free(choice)
    for b in overflow:
        z = ((arr[b] == 2) | (arr[b] == 3)).astype(np.uint8)
        x = ((arr[b] == 1) | (arr[b] == 2)).astype(np.uint8)
        out[b] = _pykernels.decode_one(z, x, d)
    return out
