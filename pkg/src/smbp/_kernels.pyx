# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels.  Same signatures and results as ``_kernels_py``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, INFINITY

cnp.import_array()

cdef double FEAS_TOL = 1e-9

RULE_RATIO = 0
RULE_MIN_INCREMENT = 1


cdef void _fill(const double[:] a, const double[:] b, const double[:] p,
                double sigma, double cap, const unsigned char[:, :] conflict,
                unsigned char[:] sel, unsigned char[:] blocked, int rule) noexcept nogil:
    cdef Py_ssize_t m = a.shape[0]
    cdef Py_ssize_t i, j, best
    cdef double A = 0.0, B = 0.0, base, usage, gamma, key, best_key
    for i in range(m):
        blocked[i] = 0
    for i in range(m):
        if sel[i]:
            A += a[i]
            B += b[i]
            for j in range(m):
                if conflict[i, j]:
                    blocked[j] = 1
    while True:
        base = A + sigma * sqrt(B)
        best = -1
        best_key = 0.0
        for i in range(m):
            if sel[i] or blocked[i]:
                continue
            usage = A + a[i] + sigma * sqrt(B + b[i])
            if usage > cap + FEAS_TOL:
                continue
            gamma = usage - base
            if rule == 0:
                if gamma <= 0.0:
                    key = INFINITY if p[i] > 0 else 0.0
                else:
                    key = p[i] / gamma
                if best < 0 or key > best_key:
                    best = i
                    best_key = key
            else:
                if best < 0 or gamma < best_key:
                    best = i
                    best_key = gamma
        if best < 0:
            return
        sel[best] = 1
        A += a[best]
        B += b[best]
        for j in range(m):
            if conflict[best, j]:
                blocked[j] = 1


def greedy_fill(a, b, profits, double sigma, double cap, conflict, init, int rule):
    cdef cnp.ndarray[cnp.uint8_t] sel = np.array(init, dtype=np.uint8, copy=True)
    cdef unsigned char[:] blocked = np.zeros(len(a), dtype=np.uint8)
    _fill(np.ascontiguousarray(a, dtype=np.float64),
          np.ascontiguousarray(b, dtype=np.float64),
          np.ascontiguousarray(profits, dtype=np.float64),
          sigma, cap, np.ascontiguousarray(conflict, dtype=np.uint8),
          sel, blocked, rule)
    return sel


def fixing_greedy(a, b, profits, double sigma, double cap, conflict):
    cdef const double[:] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[:] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef const double[:] pv = np.ascontiguousarray(profits, dtype=np.float64)
    cdef const unsigned char[:, :] cv = np.ascontiguousarray(conflict, dtype=np.uint8)
    cdef Py_ssize_t m = av.shape[0]
    cdef Py_ssize_t i, j
    best_arr = np.zeros(m, dtype=np.uint8)
    cur_arr = np.zeros(m, dtype=np.uint8)
    cdef unsigned char[:] best = best_arr
    cdef unsigned char[:] cur = cur_arr
    cdef unsigned char[:] blocked = np.zeros(m, dtype=np.uint8)
    cdef double val, best_val
    with nogil:
        _fill(av, bv, pv, sigma, cap, cv, best, blocked, 0)
        best_val = 0.0
        for i in range(m):
            if best[i]:
                best_val += pv[i]
        for j in range(m):
            if av[j] + sigma * sqrt(bv[j]) > cap + FEAS_TOL:
                continue
            for i in range(m):
                cur[i] = 0
            cur[j] = 1
            _fill(av, bv, pv, sigma, cap, cv, cur, blocked, 0)
            val = 0.0
            for i in range(m):
                if cur[i]:
                    val += pv[i]
            if val > best_val:
                best_val = val
                for i in range(m):
                    best[i] = cur[i]
    return best_arr, best_val


cdef struct EnumState:
    Py_ssize_t m
    double sigma
    double cap
    double opt_tol
    double best_val
    long n_opt


cdef void _enum(EnumState* st, Py_ssize_t k, double A, double B, double P,
                const double[:] a, const double[:] b, const double[:] p,
                const unsigned char[:, :] conflict, unsigned char[:] cur,
                unsigned char[:] best) noexcept nogil:
    cdef Py_ssize_t j
    cdef double A2, B2
    if k == st.m:
        if P > st.best_val + st.opt_tol:
            st.best_val = P
            st.n_opt = 1
            for j in range(st.m):
                best[j] = cur[j]
        elif P >= st.best_val - st.opt_tol:
            st.n_opt += 1
            if P > st.best_val:
                st.best_val = P
                for j in range(st.m):
                    best[j] = cur[j]
        return
    _enum(st, k + 1, A, B, P, a, b, p, conflict, cur, best)
    for j in range(k):
        if cur[j] and conflict[j, k]:
            return
    A2 = A + a[k]
    B2 = B + b[k]
    if A2 + st.sigma * sqrt(B2) > st.cap + FEAS_TOL:
        return
    cur[k] = 1
    _enum(st, k + 1, A2, B2, P + p[k], a, b, p, conflict, cur, best)
    cur[k] = 0


def knapsack_enum(a, b, profits, double sigma, double cap, conflict, double opt_tol):
    cdef EnumState st
    st.m = len(a)
    st.sigma = sigma
    st.cap = cap
    st.opt_tol = opt_tol
    st.best_val = 0.0
    st.n_opt = 1
    best_arr = np.zeros(st.m, dtype=np.uint8)
    cdef unsigned char[:] cur = np.zeros(st.m, dtype=np.uint8)
    cdef unsigned char[:] best = best_arr
    cdef const double[:] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[:] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef const double[:] pv = np.ascontiguousarray(profits, dtype=np.float64)
    cdef const unsigned char[:, :] cv = np.ascontiguousarray(conflict, dtype=np.uint8)
    with nogil:
        _enum(&st, 0, 0.0, 0.0, 0.0, av, bv, pv, cv, cur, best)
    return st.best_val, best_arr, st.n_opt


def subset_feasible(a, b, double sigma, double cap):
    cdef const double[:] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[:] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t n = av.shape[0]
    cdef Py_ssize_t size = (<Py_ssize_t> 1) << n
    cdef double[:] A = np.zeros(size)
    cdef double[:] B = np.zeros(size)
    out_arr = np.zeros(size, dtype=np.uint8)
    cdef unsigned char[:] out = out_arr
    cdef Py_ssize_t mask, low, prev, i
    with nogil:
        out[0] = 1
        for mask in range(1, size):
            low = mask & (-mask)
            i = 0
            while (low >> i) != 1:
                i += 1
            prev = mask ^ low
            A[mask] = A[prev] + av[i]
            B[mask] = B[prev] + bv[i]
            out[mask] = (A[mask] + sigma * sqrt(B[mask]) <= cap + FEAS_TOL)
    return out_arr


def min_bins_dp(feasible, int n):
    cdef const unsigned char[:] feas = np.ascontiguousarray(feasible, dtype=np.uint8)
    cdef Py_ssize_t full = ((<Py_ssize_t> 1) << n) - 1
    cdef int inf = n + 1
    cdef int[:] dp = np.full(full + 1, inf, dtype=np.intc)
    cdef long long[:] choice = np.zeros(full + 1, dtype=np.int64)
    cdef Py_ssize_t mask, low, rest, sub, s, best_s
    cdef int best, v
    with nogil:
        dp[0] = 0
        for mask in range(1, full + 1):
            low = mask & (-mask)
            rest = mask ^ low
            best = inf
            best_s = 0
            sub = rest
            while True:
                s = sub | low
                if feas[s]:
                    v = dp[mask ^ s] + 1
                    if v < best:
                        best = v
                        best_s = s
                if sub == 0:
                    break
                sub = (sub - 1) & rest
            dp[mask] = best
            choice[mask] = best_s
    parts = []
    mask = full
    while mask:
        s = choice[mask]
        parts.append(int(s))
        mask ^= s
    return int(dp[full]), parts


def greedy_min_util(a, b, double sigma, double cap):
    cdef const double[:] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[:] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t n = av.shape[0]
    assign_arr = np.full(n, -1, dtype=np.int64)
    cdef long long[:] assign = assign_arr
    cdef double[:] binA = np.zeros(n + 1)
    cdef double[:] binB = np.zeros(n + 1)
    cdef Py_ssize_t nbins = 0, unpacked = n, i, p, best_i, best_p
    cdef double base, usage, g, best_g
    cdef bint ok
    while unpacked:
        best_i = -1
        best_p = -1
        best_g = INFINITY
        for p in range(nbins):
            base = binA[p] + sigma * sqrt(binB[p])
            for i in range(n):
                if assign[i] >= 0:
                    continue
                usage = binA[p] + av[i] + sigma * sqrt(binB[p] + bv[i])
                if usage > cap + FEAS_TOL:
                    continue
                g = usage - base
                if g < best_g:
                    best_g = g
                    best_i = i
                    best_p = p
        if best_i < 0:
            ok = False
            for i in range(n):
                if assign[i] < 0 and av[i] + sigma * sqrt(bv[i]) <= cap + FEAS_TOL:
                    ok = True
                    break
            if not ok:
                raise ValueError("an unpacked item does not fit into an empty bin")
            binA[nbins] = 0.0
            binB[nbins] = 0.0
            nbins += 1
            continue
        assign[best_i] = best_p
        binA[best_p] += av[best_i]
        binB[best_p] += bv[best_i]
        unpacked -= 1
    return assign_arr
