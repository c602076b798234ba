# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled SGNS training kernel.

Semantics mirror :mod:`lscd._sgns_pure` operation for operation; see that
module for the contract. Keep the two in lockstep when changing either.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

ctypedef unsigned long long u64

cdef double MAX_EXP = 6.0  # must match lscd._sgns_pure.MAX_EXP


cdef inline u64 _splitmix64(u64 *state) noexcept nogil:
    cdef u64 z
    state[0] = state[0] + <u64>0x9E3779B97F4A7C15
    z = state[0]
    z = (z ^ (z >> 30)) * <u64>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <u64>0x94D049BB133111EB
    return z ^ (z >> 31)


cdef inline Py_ssize_t _draw(const unsigned int[::1] cum, Py_ssize_t n, u64 r) noexcept nogil:
    # first index with cum[i] > r, like bisect_right
    cdef Py_ssize_t lo = 0, hi = n, mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if cum[mid] <= r:
            lo = mid + 1
        else:
            hi = mid
    return lo


cdef inline double _sigmoid(double x, const double[::1] table, double resolution) noexcept nogil:
    if x >= MAX_EXP:
        return 1.0
    if x <= -MAX_EXP:
        return 0.0
    return table[<Py_ssize_t>((x + MAX_EXP) * resolution)]


cdef inline double _log_sigmoid(double x, const double[::1] table, double resolution) noexcept nogil:
    if x >= MAX_EXP:
        return 0.0
    if x <= -MAX_EXP:
        return table[0]
    return table[<Py_ssize_t>((x + MAX_EXP) * resolution)]


def train_epoch(double[:, ::1] w, double[:, ::1] c,
                const int[::1] tokens, const long long[::1] offsets,
                const long long[::1] order,
                const unsigned int[::1] cum_table,
                const double[::1] sig_table, const double[::1] log_sig_table,
                int window, int negative,
                double alpha0, double alpha_floor,
                double total_planned, long long tokens_done,
                u64 rng_state, bint compute_objective):
    """One pass over the corpus; mutates ``w`` and ``c`` in place.

    Returns ``(objective_sum, pair_count, tokens_done, rng_state)``.
    """
    cdef:
        Py_ssize_t d = w.shape[1]
        Py_ssize_t vocab_size = cum_table.shape[0]
        Py_ssize_t n_sent = order.shape[0]
        double resolution = sig_table.shape[0] / (2.0 * MAX_EXP)
        u64 domain = <u64>cum_table[vocab_size - 1]
        u64 state = rng_state
        double objective = 0.0
        long long pairs = 0
        double alpha, f, gi
        Py_ssize_t s, si, start, end, n, t, j, i, jj, lo, hi
        Py_ssize_t center, ctx, cand
        cnp.ndarray[cnp.int64_t, ndim=1] idxs_arr = np.empty(negative + 1, dtype=np.int64)
        cnp.ndarray[cnp.float64_t, ndim=1] g_arr = np.empty(negative + 1, dtype=np.float64)
        cnp.ndarray[cnp.float64_t, ndim=1] work_arr = np.empty(d, dtype=np.float64)
        long long[::1] idxs = idxs_arr
        double[::1] g = g_arr
        double[::1] work = work_arr

    with nogil:
        for s in range(n_sent):
            si = <Py_ssize_t>order[s]
            start = <Py_ssize_t>offsets[si]
            end = <Py_ssize_t>offsets[si + 1]
            n = end - start
            alpha = alpha0 * (1.0 - (<double>tokens_done) / total_planned)
            if alpha < alpha_floor:
                alpha = alpha_floor
            for t in range(n):
                center = tokens[start + t]
                if center < 0:
                    continue
                lo = t - window
                if lo < 0:
                    lo = 0
                hi = t + window + 1
                if hi > n:
                    hi = n
                for j in range(lo, hi):
                    if j == t:
                        continue
                    ctx = tokens[start + j]
                    if ctx < 0:
                        continue
                    idxs[0] = ctx
                    for i in range(1, negative + 1):
                        while True:
                            cand = _draw(cum_table, vocab_size, _splitmix64(&state) % domain)
                            if cand != ctx:
                                break
                        idxs[i] = cand
                    # gradients from pre-update rows
                    for i in range(negative + 1):
                        f = 0.0
                        for jj in range(d):
                            f += w[center, jj] * c[idxs[i], jj]
                        gi = 1.0 if i == 0 else 0.0
                        g[i] = (gi - _sigmoid(f, sig_table, resolution)) * alpha
                        if compute_objective:
                            objective += _log_sigmoid(f if i == 0 else -f,
                                                      log_sig_table, resolution)
                    for jj in range(d):
                        work[jj] = 0.0
                    for i in range(negative + 1):
                        gi = g[i]
                        for jj in range(d):
                            work[jj] += gi * c[idxs[i], jj]
                    for i in range(negative + 1):
                        gi = g[i]
                        for jj in range(d):
                            c[idxs[i], jj] += gi * w[center, jj]
                    for jj in range(d):
                        w[center, jj] += work[jj]
                    pairs += 1
            tokens_done += n
    return objective, pairs, tokens_done, state
