"""Numba kernels for the training inner loops.

All kernels draw randomness from an explicit 64-bit LCG state threaded through
the call, so runs are bit-reproducible for a given seed regardless of global
RNG state. Parameters are float32 for the SGNS family (reference-implementation
convention) and float64 for glove.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_MULT = np.uint64(6364136223846793005)
_ADD = np.uint64(1442695040888963407)
_SH53 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0  # 2**-53
_FAST = {"reassoc", "contract", "nsz", "arcp"}


def mix_seed(seed: int) -> np.uint64:
    """Spread a small integer seed over 64 bits (splitmix64 finalizer)."""
    with np.errstate(over="ignore"):
        z = np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + np.uint64(0x9E3779B97F4A7C15)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))


@njit(cache=True, nogil=True, fastmath=_FAST)
def subword_sgns_epoch(
    tokens,
    offsets,
    sent_lo,
    sent_hi,
    W,
    C,
    sub_idx,
    sub_off,
    neg_table,
    keep_prob,
    use_subsample,
    window,
    negatives,
    dynamic_window,
    alpha_start,
    alpha_min,
    total_planned,
    words_done,
    state,
):
    """One pass over sentences [sent_lo, sent_hi) of the SGNS objective.

    The input-side vector of a word is the sum of its subword rows
    (sub_idx[sub_off[w]:sub_off[w+1]]); plain SGNS passes the identity map.
    Returns (state, words_done, loss, pair_count).
    """
    dim = W.shape[1]
    max_len = 1
    for s in range(sent_lo, sent_hi):
        length = offsets[s + 1] - offsets[s]
        if length > max_len:
            max_len = length
    sen = np.empty(max_len, dtype=np.int32)
    l1 = np.empty(dim, dtype=np.float32)
    neu = np.empty(dim, dtype=np.float32)
    tsize = np.uint64(neg_table.shape[0])
    loss = 0.0
    npairs = 0
    alpha = alpha_start * (1.0 - words_done / total_planned)
    if alpha < alpha_min:
        alpha = alpha_min

    for s in range(sent_lo, sent_hi):
        lo = offsets[s]
        hi = offsets[s + 1]
        m = 0
        for t in range(lo, hi):
            w = tokens[t]
            if use_subsample:
                state = state * _MULT + _ADD
                if (state >> _SH53) * _INV53 > keep_prob[w]:
                    continue
            sen[m] = w
            m += 1
        for pos in range(m):
            center = sen[pos]
            if dynamic_window:
                state = state * _MULT + _ADD
                b = 1 + int((state >> np.uint64(33)) % np.uint64(window))
            else:
                b = window
            j_lo = pos - b
            if j_lo < 0:
                j_lo = 0
            j_hi = pos + b + 1
            if j_hi > m:
                j_hi = m
            for jpos in range(j_lo, j_hi):
                if jpos == pos:
                    continue
                inw = sen[jpos]
                r0 = sub_off[inw]
                r1 = sub_off[inw + 1]
                single = r1 - r0 == 1
                if single:
                    row0 = sub_idx[r0]
                else:
                    row0 = sub_idx[r0]
                    for k in range(dim):
                        l1[k] = np.float32(0.0)
                    for r in range(r0, r1):
                        row = sub_idx[r]
                        for k in range(dim):
                            l1[k] += W[row, k]
                for k in range(dim):
                    neu[k] = np.float32(0.0)
                for d in range(negatives + 1):
                    if d == 0:
                        target = center
                        label = 1.0
                    else:
                        state = state * _MULT + _ADD
                        target = neg_table[int((state >> np.uint64(16)) % tsize)]
                        if target == center:
                            continue
                        label = 0.0
                    f = np.float32(0.0)
                    if single:
                        for k in range(dim):
                            f += W[row0, k] * C[target, k]
                    else:
                        for k in range(dim):
                            f += l1[k] * C[target, k]
                    fv = float(f)
                    if fv > 30.0:
                        sgm = 1.0
                    elif fv < -30.0:
                        sgm = 0.0
                    else:
                        sgm = 1.0 / (1.0 + np.exp(-fv))
                    if label > 0.5:
                        if fv < -30.0:
                            loss += -fv
                        elif fv <= 30.0:
                            loss += np.log(1.0 + np.exp(-fv))
                    else:
                        if fv > 30.0:
                            loss += fv
                        elif fv >= -30.0:
                            loss += np.log(1.0 + np.exp(fv))
                    g = np.float32((label - sgm) * alpha)
                    if single:
                        for k in range(dim):
                            neu[k] += g * C[target, k]
                        for k in range(dim):
                            C[target, k] += g * W[row0, k]
                    else:
                        for k in range(dim):
                            neu[k] += g * C[target, k]
                        for k in range(dim):
                            C[target, k] += g * l1[k]
                    npairs += 1
                if single:
                    for k in range(dim):
                        W[row0, k] += neu[k]
                else:
                    for r in range(r0, r1):
                        row = sub_idx[r]
                        for k in range(dim):
                            W[row, k] += neu[k]
        words_done += hi - lo
        alpha = alpha_start * (1.0 - words_done / total_planned)
        if alpha < alpha_min:
            alpha = alpha_min
    return state, words_done, loss, npairs


@njit(cache=True)
def draw_negatives(neg_table, n, state, out):
    """Draw n negative samples exactly as the training kernel does."""
    tsize = np.uint64(neg_table.shape[0])
    for i in range(n):
        state = state * _MULT + _ADD
        out[i] = neg_table[int((state >> np.uint64(16)) % tsize)]
    return state


@njit(cache=True, nogil=True, fastmath=_FAST)
def glove_pass(order, ii, jj, logx, fx, W, C, bw, bc, gW, gC, gbw, gbc, lr):
    """One AdaGrad sweep over the shuffled nonzero entries.

    Each canonical entry (i, j) is visited in both directions (skipping the
    mirror when i == j). Returns the running weighted cost accumulated at the
    moving parameters.
    """
    dim = W.shape[1]
    total = 0.0
    for t in range(order.shape[0]):
        e = order[t]
        for rep in range(2):
            if rep == 0:
                i = ii[e]
                j = jj[e]
            else:
                i = jj[e]
                j = ii[e]
                if i == j:
                    break
            diff = bw[i] + bc[j] - logx[e]
            for k in range(dim):
                diff += W[i, k] * C[j, k]
            fd = fx[e] * diff
            total += fd * diff
            for k in range(dim):
                gw = fd * C[j, k]
                gc = fd * W[i, k]
                W[i, k] -= lr * gw / np.sqrt(gW[i, k])
                gW[i, k] += gw * gw
                C[j, k] -= lr * gc / np.sqrt(gC[j, k])
                gC[j, k] += gc * gc
            bw[i] -= lr * fd / np.sqrt(gbw[i])
            gbw[i] += fd * fd
            bc[j] -= lr * fd / np.sqrt(gbc[j])
            gbc[j] += fd * fd
    return total


@njit(cache=True, nogil=True, fastmath=_FAST)
def glove_objective(ii, jj, logx, fx, W, C, bw, bc):
    """Exact weighted objective sum(f(X) * (w.c + b_i + b_j - log X)^2)."""
    dim = W.shape[1]
    total = 0.0
    for e in range(ii.shape[0]):
        for rep in range(2):
            if rep == 0:
                i = ii[e]
                j = jj[e]
            else:
                i = jj[e]
                j = ii[e]
                if i == j:
                    break
            diff = bw[i] + bc[j] - logx[e]
            for k in range(dim):
                diff += W[i, k] * C[j, k]
            total += fx[e] * diff * diff
    return total


@njit(cache=True)
def cooc_emit(tokens, offsets, sent_lo, sent_hi, window, vocab_size, keys, vals):
    """Emit canonical (min*V + max) keys with 1/d weights for every
    within-window unordered token pair. Returns the number emitted."""
    n = 0
    for s in range(sent_lo, sent_hi):
        lo = offsets[s]
        hi = offsets[s + 1]
        for t in range(lo, hi):
            wt = tokens[t]
            jmax = t + window + 1
            if jmax > hi:
                jmax = hi
            for j in range(t + 1, jmax):
                wj = tokens[j]
                if wt <= wj:
                    a, b = wt, wj
                else:
                    a, b = wj, wt
                keys[n] = np.int64(a) * np.int64(vocab_size) + np.int64(b)
                vals[n] = 1.0 / (j - t)
                n += 1
    return n
