"""Pure-Python implementations of the hot kernels.

Mirrors ``_kernels.pyx`` function for function; :mod:`smbp.kernels` picks
whichever is importable.  All item sets are ``uint8`` indicator arrays and
all conflict relations dense ``uint8`` matrices.
"""
import math

import numpy as np

FEAS_TOL = 1e-9

RULE_RATIO = 0
RULE_MIN_INCREMENT = 1


def greedy_fill(a, b, profits, sigma, cap, conflict, init, rule):
    """Grow ``init`` greedily until no further item fits.

    ``rule`` selects the item maximizing profit/increment (RULE_RATIO) or
    minimizing the increment (RULE_MIN_INCREMENT).  Ties go to the lowest
    index.
    """
    m = len(a)
    sel = np.array(init, dtype=np.uint8, copy=True)
    blocked = [False] * m
    A = 0.0
    B = 0.0
    for i in range(m):
        if sel[i]:
            A += a[i]
            B += b[i]
    for i in range(m):
        if sel[i]:
            for j in range(m):
                if conflict[i, j]:
                    blocked[j] = True
    while True:
        base = A + sigma * math.sqrt(B)
        best = -1
        best_key = 0.0
        for i in range(m):
            if sel[i] or blocked[i]:
                continue
            usage = A + a[i] + sigma * math.sqrt(B + b[i])
            if usage > cap + FEAS_TOL:
                continue
            gamma = usage - base
            if rule == RULE_RATIO:
                if gamma <= 0.0:
                    key = math.inf if profits[i] > 0 else 0.0
                else:
                    key = profits[i] / gamma
                if best < 0 or key > best_key:
                    best, best_key = i, key
            else:
                if best < 0 or gamma < best_key:
                    best, best_key = i, gamma
        if best < 0:
            return sel
        sel[best] = 1
        A += a[best]
        B += b[best]
        for j in range(m):
            if conflict[best, j]:
                blocked[j] = True


def fixing_greedy(a, b, profits, sigma, cap, conflict):
    """Best result over the plain ratio greedy and one run per forced item."""
    m = len(a)
    best = greedy_fill(a, b, profits, sigma, cap, conflict,
                       np.zeros(m, dtype=np.uint8), RULE_RATIO)
    best_val = float(np.dot(profits, best))
    init = np.zeros(m, dtype=np.uint8)
    for j in range(m):
        if a[j] + sigma * math.sqrt(b[j]) > cap + FEAS_TOL:
            continue
        init[j] = 1
        sel = greedy_fill(a, b, profits, sigma, cap, conflict, init, RULE_RATIO)
        init[j] = 0
        val = float(np.dot(profits, sel))
        if val > best_val:
            best, best_val = sel, val
    return best, best_val


def knapsack_enum(a, b, profits, sigma, cap, conflict, opt_tol):
    """Exhaustive depth-first enumeration of conflict-free feasible subsets.

    Infeasibility is monotone under inclusion, so infeasible branches are cut
    without losing exhaustiveness.  Returns (best value, best set, number of
    sets within ``opt_tol`` of the best).
    """
    m = len(a)
    cur = [0] * m
    best_val = 0.0
    best_sel = [0] * m
    n_opt = 1
    chosen = []

    def rec(k, A, B, P):
        nonlocal best_val, best_sel, n_opt
        if k == m:
            if P > best_val + opt_tol:
                best_val = P
                best_sel = list(cur)
                n_opt = 1
            elif P >= best_val - opt_tol:
                n_opt += 1
                if P > best_val:
                    best_val = P
                    best_sel = list(cur)
            return
        rec(k + 1, A, B, P)
        for j in chosen:
            if conflict[j, k]:
                return
        A2 = A + a[k]
        B2 = B + b[k]
        if A2 + sigma * math.sqrt(B2) > cap + FEAS_TOL:
            return
        cur[k] = 1
        chosen.append(k)
        rec(k + 1, A2, B2, P + profits[k])
        chosen.pop()
        cur[k] = 0
    rec(0, 0.0, 0.0, 0.0)
    return best_val, np.array(best_sel, dtype=np.uint8), n_opt


def subset_feasible(a, b, sigma, cap):
    """Feasibility flag for every subset mask of the n items."""
    n = len(a)
    size = 1 << n
    A = np.zeros(size)
    B = np.zeros(size)
    for mask in range(1, size):
        low = mask & (-mask)
        i = low.bit_length() - 1
        prev = mask ^ low
        A[mask] = A[prev] + a[i]
        B[mask] = B[prev] + b[i]
    usage = A + sigma * np.sqrt(B)
    return (usage <= cap + FEAS_TOL).astype(np.uint8)


def min_bins_dp(feasible, n):
    """Minimum number of feasible subsets partitioning all n items.

    Returns (bin count, list of masks).  Every submask enumerated contains the
    lowest unpacked item, which removes permutation symmetry.
    """
    full = (1 << n) - 1
    inf = n + 1
    dp = [inf] * (full + 1)
    choice = [0] * (full + 1)
    dp[0] = 0
    for mask in range(1, full + 1):
        low = mask & (-mask)
        rest = mask ^ low
        best = inf
        best_s = 0
        sub = rest
        while True:
            s = sub | low
            if feasible[s]:
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
        parts.append(s)
        mask ^= s
    return dp[full], parts


def greedy_min_util(a, b, sigma, cap):
    """Min-utilization greedy: repeatedly place the (item, bin) pair with the
    smallest incremental usage, opening a bin only when nothing fits.

    Returns the bin index of every item.
    """
    n = len(a)
    assign = np.full(n, -1, dtype=np.int64)
    binA = []
    binB = []
    unpacked = n
    while unpacked:
        best_i = -1
        best_p = -1
        best_g = math.inf
        for p in range(len(binA)):
            Ap = binA[p]
            Bp = binB[p]
            base = Ap + sigma * math.sqrt(Bp)
            for i in range(n):
                if assign[i] >= 0:
                    continue
                usage = Ap + a[i] + sigma * math.sqrt(Bp + b[i])
                if usage > cap + FEAS_TOL:
                    continue
                g = usage - base
                if g < best_g:
                    best_g, best_i, best_p = g, i, p
        if best_i < 0:
            binA.append(0.0)
            binB.append(0.0)
            # a fresh bin must accept some item, else it is singleton-infeasible
            ok = False
            for i in range(n):
                if assign[i] < 0 and a[i] + sigma * math.sqrt(b[i]) <= cap + FEAS_TOL:
                    ok = True
                    break
            if not ok:
                raise ValueError("an unpacked item does not fit into an empty bin")
            continue
        assign[best_i] = best_p
        binA[best_p] += a[best_i]
        binB[best_p] += b[best_i]
        unpacked -= 1
    return assign
