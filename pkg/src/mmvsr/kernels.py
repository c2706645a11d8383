"""Hot decoder kernels, in two interchangeable builds.

Each kernel exists as ``*_loops`` (scalar loops, numba @njit when available)
and ``*_numpy`` (vectorized over the subset axis). Both builds perform the
same floating-point operations in the same order per element, so their
outputs agree bitwise; tests assert this. The public names dispatch to the
loop build under numba and to the numpy build otherwise (see backend.py).

All kernels work on precomputed Gram products:
    gram  = A' A            (m, m)
    cross = A' Y            (m, l)
    ynorm2 = ||Y||_F^2
    subsets: (N, k) int64, each row a sorted support candidate,
             enumerated lexicographically.
"""

import numpy as np

from .backend import USING_NUMBA, njit

RANK_RTOL = 1e-10  # relative pivot tolerance for the rank check


# ---------------------------------------------------------------------------
# exhaustive least-squares scan (free coefficient matrix)


def ml_scan_numpy(gram, cross, ynorm2, subsets):
    """Residual ||Y - A_S G*||_F^2 for every subset, G* the least-squares fit.

    Solves the k-by-k normal equations via an unrolled Cholesky on the
    gathered Gram blocks; residual = ynorm2 - ||L^{-1} A_S' Y||_F^2. Subsets
    whose pivot falls below RANK_RTOL relative to the diagonal are marked
    skipped and get residual +inf.
    """
    N, k = subsets.shape
    l = cross.shape[1]
    M = gram[subsets[:, :, None], subsets[:, None, :]]
    b = cross[subsets]
    L = np.zeros((N, k, k))
    skipped = np.zeros(N, dtype=np.bool_)
    for i in range(k):
        d = M[:, i, i].copy()
        for t in range(i):
            d = d - L[:, i, t] * L[:, i, t]
        bad = ~(d > RANK_RTOL * M[:, i, i])
        skipped |= bad
        d[bad] = 1.0
        L[:, i, i] = np.sqrt(d)
        for j in range(i + 1, k):
            off = M[:, j, i].copy()
            for t in range(i):
                off = off - L[:, j, t] * L[:, i, t]
            L[:, j, i] = off / L[:, i, i]
    res = np.full(N, float(ynorm2))
    U = np.zeros((N, k))
    for c in range(l):
        for i in range(k):
            u = b[:, i, c].copy()
            for t in range(i):
                u = u - L[:, i, t] * U[:, t]
            U[:, i] = u / L[:, i, i]
            res = res - U[:, i] * U[:, i]
    res[skipped] = np.inf
    return res, skipped


@njit
def ml_scan_loops(gram, cross, ynorm2, subsets):
    N, k = subsets.shape
    l = cross.shape[1]
    res = np.empty(N)
    skipped = np.zeros(N, dtype=np.bool_)
    L = np.zeros((k, k))
    U = np.zeros(k)
    for s in range(N):
        bad = False
        for i in range(k):
            si = subsets[s, i]
            d = gram[si, si]
            for t in range(i):
                d = d - L[i, t] * L[i, t]
            if not (d > RANK_RTOL * gram[si, si]):
                bad = True
                break
            L[i, i] = np.sqrt(d)
            for j in range(i + 1, k):
                off = gram[subsets[s, j], si]
                for t in range(i):
                    off = off - L[j, t] * L[i, t]
                L[j, i] = off / L[i, i]
        if bad:
            res[s] = np.inf
            skipped[s] = True
            continue
        r = ynorm2
        for c in range(l):
            for i in range(k):
                u = cross[subsets[s, i], c]
                for t in range(i):
                    u = u - L[i, t] * U[t]
                U[i] = u / L[i, i]
                r = r - U[i] * U[i]
        res[s] = r
    return res, skipped


# ---------------------------------------------------------------------------
# exact likelihood scan for known signal values


def matched_scan_numpy(gram, cross, ynorm2, subsets, w_perms, row_dots):
    """min over row assignments of ||Y - A_S W_perm||_F^2, per subset.

    ``w_perms`` is (P, k, l): every row assignment of the value matrix.
    ``row_dots[p] = w_perms[p] @ w_perms[p].T`` is precomputed by the caller
    so both builds consume identical inputs.
    """
    N, k = subsets.shape
    l = cross.shape[1]
    P = w_perms.shape[0]
    best = np.full(N, np.inf)
    for p in range(P):
        wp = w_perms[p]
        rd = row_dots[p]
        cd = np.zeros(N)
        for j in range(k):
            col = cross[subsets[:, j]]
            for c in range(l):
                cd = cd + col[:, c] * wp[j, c]
        quad = np.zeros(N)
        for j in range(k):
            for j2 in range(k):
                quad = quad + gram[subsets[:, j], subsets[:, j2]] * rd[j, j2]
        res = (ynorm2 - 2.0 * cd) + quad
        best = np.minimum(best, res)
    return best


@njit
def matched_scan_loops(gram, cross, ynorm2, subsets, w_perms, row_dots):
    N, k = subsets.shape
    l = cross.shape[1]
    P = w_perms.shape[0]
    best = np.full(N, np.inf)
    for p in range(P):
        for s in range(N):
            cd = 0.0
            for j in range(k):
                sj = subsets[s, j]
                for c in range(l):
                    cd = cd + cross[sj, c] * w_perms[p, j, c]
            quad = 0.0
            for j in range(k):
                sj = subsets[s, j]
                for j2 in range(k):
                    quad = quad + gram[sj, subsets[s, j2]] * row_dots[p, j, j2]
            res = (ynorm2 - 2.0 * cd) + quad
            if res < best[s]:
                best[s] = res
    return best


# ---------------------------------------------------------------------------
# net-quantized threshold scan

# For a support S and per-column nets Q_i, the squared misfit splits over
# columns, so min over net combinations = ynorm2 + sum_i min_{q in Q_i}
# (q' M q - 2 q . b_i). The scan therefore never materializes the product
# of nets; the budget check elsewhere still counts it.


def net_scan_numpy(gram, cross, ynorm2, subsets, points, offsets):
    """Best net-quantized squared misfit per subset.

    ``points`` stacks all per-column net points (sum_i Q_i rows, k columns);
    column i owns rows offsets[i]:offsets[i+1].
    """
    N, k = subsets.shape
    l = cross.shape[1]
    total = np.full(N, float(ynorm2))
    M = gram[subsets[:, :, None], subsets[:, None, :]]
    for i in range(l):
        b = cross[subsets, i]
        minphi = np.full(N, np.inf)
        for q in range(offsets[i], offsets[i + 1]):
            quad = np.zeros(N)
            for a in range(k):
                for a2 in range(k):
                    pp = points[q, a] * points[q, a2]
                    quad = quad + M[:, a, a2] * pp
            lin = np.zeros(N)
            for a in range(k):
                lin = lin + b[:, a] * points[q, a]
            phi = quad - 2.0 * lin
            minphi = np.minimum(minphi, phi)
        total = total + minphi
    return total


@njit
def net_scan_loops(gram, cross, ynorm2, subsets, points, offsets):
    N, k = subsets.shape
    l = cross.shape[1]
    total = np.full(N, float(ynorm2))
    for i in range(l):
        for s in range(N):
            minphi = np.inf
            for q in range(offsets[i], offsets[i + 1]):
                quad = 0.0
                for a in range(k):
                    sa = subsets[s, a]
                    for a2 in range(k):
                        pp = points[q, a] * points[q, a2]
                        quad = quad + gram[sa, subsets[s, a2]] * pp
                lin = 0.0
                for a in range(k):
                    lin = lin + cross[subsets[s, a], i] * points[q, a]
                phi = quad - 2.0 * lin
                if phi < minphi:
                    minphi = phi
            total[s] = total[s] + minphi
    return total


if USING_NUMBA:
    ml_scan = ml_scan_loops
    matched_scan = matched_scan_loops
    net_scan = net_scan_loops
else:
    ml_scan = ml_scan_numpy
    matched_scan = matched_scan_numpy
    net_scan = net_scan_numpy
