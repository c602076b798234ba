"""Pure numpy SGNS training kernel.

Fallback used when the compiled extension (``lscd._sgns_inner``) is not
built. Both kernels implement the same algorithm step for step: the same
splitmix64 RNG, the same unigram-table binary search, the same shared
sigmoid lookup tables and the same update order, so results agree between
backends to within last-ulp dot-product rounding.
"""

from __future__ import annotations

from bisect import bisect_right

import numpy as np

MAX_EXP = 6.0  # must match lscd._sgns_inner
_MASK64 = (1 << 64) - 1


def _splitmix64(state: int) -> tuple[int, int]:
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, z ^ (z >> 31)


def _log_sigmoid(x: float, table, resolution: float) -> float:
    if x >= MAX_EXP:
        return 0.0
    if x <= -MAX_EXP:
        return float(table[0])
    return float(table[int((x + MAX_EXP) * resolution)])


def train_epoch(
    w,
    c,
    tokens,
    offsets,
    order,
    cum_table,
    sig_table,
    log_sig_table,
    window,
    negative,
    alpha0,
    alpha_floor,
    total_planned,
    tokens_done,
    rng_state,
    compute_objective,
):
    """One pass over the corpus; mutates ``w`` and ``c`` in place.

    Returns ``(objective_sum, pair_count, tokens_done, rng_state)`` so
    consecutive epochs chain the learning-rate schedule and RNG stream.
    """
    resolution = len(sig_table) / (2.0 * MAX_EXP)
    domain = int(cum_table[-1])
    cum = cum_table.tolist()
    labels = np.zeros(negative + 1)
    labels[0] = 1.0
    idxs = np.empty(negative + 1, dtype=np.int64)
    objective = 0.0
    pairs = 0
    state = int(rng_state) & _MASK64

    for si in order.tolist():
        start = int(offsets[si])
        end = int(offsets[si + 1])
        sent = tokens[start:end].tolist()
        n = end - start
        alpha = alpha0 * (1.0 - tokens_done / total_planned)
        if alpha < alpha_floor:
            alpha = alpha_floor
        for t in range(n):
            center = sent[t]
            if center < 0:
                continue
            lo = t - window
            if lo < 0:
                lo = 0
            hi = t + window + 1
            if hi > n:
                hi = n
            u = w[center]
            for j in range(lo, hi):
                if j == t:
                    continue
                ctx = sent[j]
                if ctx < 0:
                    continue
                idxs[0] = ctx
                for i in range(1, negative + 1):
                    while True:
                        state, z = _splitmix64(state)
                        cand = bisect_right(cum, z % domain)
                        if cand != ctx:
                            break
                    idxs[i] = cand
                rows = c[idxs]  # (k+1, d) snapshot before any update
                f = rows @ u
                sig = np.empty_like(f)
                high = f >= MAX_EXP
                low = f <= -MAX_EXP
                mid = ~(high | low)
                sig[high] = 1.0
                sig[low] = 0.0
                sig[mid] = sig_table[((f[mid] + MAX_EXP) * resolution).astype(np.int64)]
                g = (labels - sig) * alpha
                if compute_objective:
                    objective += _log_sigmoid(f[0], log_sig_table, resolution)
                    for i in range(1, negative + 1):
                        objective += _log_sigmoid(-f[i], log_sig_table, resolution)
                if negative == 1:
                    # ctx != negative is guaranteed, plain scatter is safe
                    c[idxs[0]] += g[0] * u
                    c[idxs[1]] += g[1] * u
                else:
                    np.add.at(c, idxs, g[:, None] * u)
                u += (g[:, None] * rows).sum(axis=0)
                pairs += 1
        tokens_done += n
    return objective, pairs, tokens_done, state
