"""Pure-numpy reference implementations of the hot numeric kernels.

Loops run over the time axis only; everything inside a step is vectorized.
The numba backend mirrors these signatures with fully unrolled loops.
All arrays are float64 (int64 for index arrays).
"""

import numpy as np

NAME = "numpy"


def _logsumexp_rows(m):
    """Row-wise log-sum-exp of a 2-D array."""
    mx = m.max(axis=1)
    return mx + np.log(np.exp(m - mx[:, None]).sum(axis=1))


def crf_forward_backward(phi, trans):
    """Forward-backward on a linear chain in log space.

    phi: (T, K) emission scores; trans: (K+1, K) transition scores, row K is
    the begin-of-sentence row.

    Returns (log_partition, unary_marginals (T, K), expected_transitions
    (K+1, K)) where row K of the expected transitions holds the position-0
    unary marginals (the BOS->tag counts).
    """
    T, K = phi.shape
    alpha = np.empty((T, K))
    alpha[0] = trans[K] + phi[0]
    for t in range(1, T):
        # alpha[t, k] = logsumexp_j(alpha[t-1, j] + trans[j, k]) + phi[t, k]
        m = alpha[t - 1][:, None] + trans[:K]
        alpha[t] = _logsumexp_rows(m.T) + phi[t]
    log_z = _logsumexp_rows(alpha[T - 1][None, :])[0]

    beta = np.zeros((T, K))
    for t in range(T - 2, -1, -1):
        m = trans[:K] + (phi[t + 1] + beta[t + 1])[None, :]
        beta[t] = _logsumexp_rows(m)

    marg = np.exp(alpha + beta - log_z)

    pair = np.zeros((K + 1, K))
    pair[K] = marg[0]
    for t in range(1, T):
        m = alpha[t - 1][:, None] + trans[:K] + (phi[t] + beta[t])[None, :]
        pair[:K] += np.exp(m - log_z)
    return log_z, marg, pair


def crf_viterbi(phi, trans):
    """Max-score path through the chain; ties resolved to the lowest index."""
    T, K = phi.shape
    delta = trans[K] + phi[0]
    back = np.zeros((T, K), dtype=np.int64)
    for t in range(1, T):
        m = delta[:, None] + trans[:K]
        back[t] = m.argmax(axis=0)
        delta = m.max(axis=0) + phi[t]
    path = np.empty(T, dtype=np.int64)
    path[T - 1] = int(delta.argmax())
    for t in range(T - 1, 0, -1):
        path[t - 1] = back[t, path[t]]
    return path


def conv1d_w3(x, filt, bias):
    """Width-3 same-padded 1-D convolution, pre-activation.

    x: (L, D); filt: (3, D, F); bias: (F,). Returns (L, F).
    """
    L, D = x.shape
    F = filt.shape[2]
    xp = np.zeros((L + 2, D))
    xp[1:L + 1] = x
    out = np.empty((L, F))
    for t in range(L):
        win = xp[t:t + 3]  # (3, D)
        out[t] = np.tensordot(win, filt, axes=([0, 1], [0, 1])) + bias
    return out


def conv1d_w3_backward(x, filt, dpre):
    """Gradients of conv1d_w3 w.r.t. input, filters and bias."""
    L, D = x.shape
    F = filt.shape[2]
    xp = np.zeros((L + 2, D))
    xp[1:L + 1] = x
    dxp = np.zeros((L + 2, D))
    dfilt = np.zeros((3, D, F))
    dbias = dpre.sum(axis=0)
    for t in range(L):
        win = xp[t:t + 3]
        dfilt += win[:, :, None] * dpre[t][None, None, :]
        dxp[t:t + 3] += np.tensordot(filt, dpre[t], axes=([2], [0]))
    return dxp[1:L + 1], dfilt, dbias


def _sigmoid(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def lstm_forward(x, wx, wh, b):
    """LSTM over a sequence. Gate slab order: input, forget, candidate, output.

    x: (L, D); wx: (D, 4H); wh: (H, 4H); b: (4H,).
    Returns (h (L, H), c (L, H), gates (L, 4H)) with post-activation gates
    cached for the backward pass. h_0 = c_0 = 0.
    """
    L = x.shape[0]
    H = wh.shape[0]
    h = np.zeros((L, H))
    c = np.zeros((L, H))
    gates = np.zeros((L, 4 * H))
    h_prev = np.zeros(H)
    c_prev = np.zeros(H)
    for t in range(L):
        a = x[t] @ wx + h_prev @ wh + b
        i = _sigmoid(a[:H])
        f = _sigmoid(a[H:2 * H])
        g = np.tanh(a[2 * H:3 * H])
        o = _sigmoid(a[3 * H:])
        c_t = f * c_prev + i * g
        h_t = o * np.tanh(c_t)
        gates[t, :H] = i
        gates[t, H:2 * H] = f
        gates[t, 2 * H:3 * H] = g
        gates[t, 3 * H:] = o
        c[t] = c_t
        h[t] = h_t
        h_prev, c_prev = h_t, c_t
    return h, c, gates


def lstm_backward(x, wx, wh, h, c, gates, dh):
    """BPTT through lstm_forward. dh: (L, H) upstream gradient on h.

    Returns (dx, dwx, dwh, db).
    """
    L, D = x.shape
    H = wh.shape[0]
    dx = np.zeros((L, D))
    dwx = np.zeros_like(wx)
    dwh = np.zeros_like(wh)
    db = np.zeros(4 * H)
    dh_next = np.zeros(H)
    dc_next = np.zeros(H)
    for t in range(L - 1, -1, -1):
        i = gates[t, :H]
        f = gates[t, H:2 * H]
        g = gates[t, 2 * H:3 * H]
        o = gates[t, 3 * H:]
        c_prev = c[t - 1] if t > 0 else np.zeros(H)
        tc = np.tanh(c[t])
        dht = dh[t] + dh_next
        do = dht * tc
        dct = dht * o * (1.0 - tc * tc) + dc_next
        di = dct * g
        df = dct * c_prev
        dg = dct * i
        dc_next = dct * f
        da = np.concatenate([
            di * i * (1.0 - i),
            df * f * (1.0 - f),
            dg * (1.0 - g * g),
            do * o * (1.0 - o),
        ])
        dx[t] = da @ wx.T
        dwx += np.outer(x[t], da)
        if t > 0:
            dwh += np.outer(h[t - 1], da)
            dh_next = da @ wh.T
        else:
            dh_next = np.zeros(H)
        db += da
    return dx, dwx, dwh, db


def sgns_update(w_in, w_out, centers, contexts, negs, lr):
    """One pass of skip-gram negative-sampling SGD over pre-built pairs.

    Updates w_in / w_out in place; returns the mean per-pair loss before
    the updates of that pair were applied.
    """
    n = centers.shape[0]
    total = 0.0
    for p in range(n):
        cidx = centers[p]
        v = w_in[cidx]
        dv = np.zeros_like(v)
        # positive context
        u = w_out[contexts[p]]
        s = _sigmoid(np.array([v @ u]))[0]
        total -= np.log(max(s, 1e-12))
        grad = s - 1.0
        dv += grad * u
        w_out[contexts[p]] = u - lr * grad * v
        # negatives
        for j in range(negs.shape[1]):
            un = w_out[negs[p, j]]
            sn = _sigmoid(np.array([v @ un]))[0]
            total -= np.log(max(1.0 - sn, 1e-12))
            dv += sn * un
            w_out[negs[p, j]] = un - lr * sn * v
        w_in[cidx] = v - lr * dv
    return total / max(n, 1)
