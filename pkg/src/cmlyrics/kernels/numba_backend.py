"""Numba-compiled kernels. Same surface as numpy_backend, explicit loops.

Compiled lazily on first call; cache=True keeps recompiles across processes
cheap. Numerics agree with the numpy backend to rounding order.
"""

import numpy as np
from numba import njit

NAME = "numba"


@njit(cache=True)
def _logsumexp_vec(v):
    mx = v[0]
    for i in range(1, v.shape[0]):
        if v[i] > mx:
            mx = v[i]
    s = 0.0
    for i in range(v.shape[0]):
        s += np.exp(v[i] - mx)
    return mx + np.log(s)


@njit(cache=True)
def crf_forward_backward(phi, trans):
    T, K = phi.shape
    alpha = np.empty((T, K))
    for k in range(K):
        alpha[0, k] = trans[K, k] + phi[0, k]
    work = np.empty(K)
    for t in range(1, T):
        for k in range(K):
            for j in range(K):
                work[j] = alpha[t - 1, j] + trans[j, k]
            alpha[t, k] = _logsumexp_vec(work) + phi[t, k]
    log_z = _logsumexp_vec(alpha[T - 1])

    beta = np.zeros((T, K))
    for t in range(T - 2, -1, -1):
        for j in range(K):
            for k in range(K):
                work[k] = trans[j, k] + phi[t + 1, k] + beta[t + 1, k]
            beta[t, j] = _logsumexp_vec(work)

    marg = np.empty((T, K))
    for t in range(T):
        for k in range(K):
            marg[t, k] = np.exp(alpha[t, k] + beta[t, k] - log_z)

    pair = np.zeros((K + 1, K))
    for k in range(K):
        pair[K, k] = marg[0, k]
    for t in range(1, T):
        for j in range(K):
            for k in range(K):
                pair[j, k] += np.exp(alpha[t - 1, j] + trans[j, k]
                                     + phi[t, k] + beta[t, k] - log_z)
    return log_z, marg, pair


@njit(cache=True)
def crf_viterbi(phi, trans):
    T, K = phi.shape
    delta = np.empty(K)
    for k in range(K):
        delta[k] = trans[K, k] + phi[0, k]
    back = np.zeros((T, K), dtype=np.int64)
    new = np.empty(K)
    for t in range(1, T):
        for k in range(K):
            best = delta[0] + trans[0, k]
            arg = 0
            for j in range(1, K):
                s = delta[j] + trans[j, k]
                if s > best:
                    best = s
                    arg = j
            back[t, k] = arg
            new[k] = best + phi[t, k]
        for k in range(K):
            delta[k] = new[k]
    path = np.empty(T, dtype=np.int64)
    best = delta[0]
    arg = 0
    for k in range(1, K):
        if delta[k] > best:
            best = delta[k]
            arg = k
    path[T - 1] = arg
    for t in range(T - 1, 0, -1):
        path[t - 1] = back[t, path[t]]
    return path


@njit(cache=True)
def conv1d_w3(x, filt, bias):
    L, D = x.shape
    F = filt.shape[2]
    out = np.empty((L, F))
    for t in range(L):
        for f in range(F):
            acc = bias[f]
            for k in range(3):
                src = t + k - 1
                if 0 <= src < L:
                    for d in range(D):
                        acc += x[src, d] * filt[k, d, f]
            out[t, f] = acc
    return out


@njit(cache=True)
def conv1d_w3_backward(x, filt, dpre):
    L, D = x.shape
    F = filt.shape[2]
    dx = np.zeros((L, D))
    dfilt = np.zeros((3, D, F))
    dbias = np.zeros(F)
    for t in range(L):
        for f in range(F):
            g = dpre[t, f]
            dbias[f] += g
            for k in range(3):
                src = t + k - 1
                if 0 <= src < L:
                    for d in range(D):
                        dfilt[k, d, f] += x[src, d] * g
                        dx[src, d] += filt[k, d, f] * g
    return dx, dfilt, dbias


@njit(cache=True)
def _sig(z):
    if z >= 0.0:
        return 1.0 / (1.0 + np.exp(-z))
    ez = np.exp(z)
    return ez / (1.0 + ez)


@njit(cache=True)
def lstm_forward(x, wx, wh, b):
    L, D = x.shape
    H = wh.shape[0]
    h = np.zeros((L, H))
    c = np.zeros((L, H))
    gates = np.zeros((L, 4 * H))
    a = np.empty(4 * H)
    for t in range(L):
        for m in range(4 * H):
            acc = b[m]
            for d in range(D):
                acc += x[t, d] * wx[d, m]
            if t > 0:
                for j in range(H):
                    acc += h[t - 1, j] * wh[j, m]
            a[m] = acc
        for j in range(H):
            i = _sig(a[j])
            f = _sig(a[H + j])
            g = np.tanh(a[2 * H + j])
            o = _sig(a[3 * H + j])
            cp = c[t - 1, j] if t > 0 else 0.0
            ct = f * cp + i * g
            gates[t, j] = i
            gates[t, H + j] = f
            gates[t, 2 * H + j] = g
            gates[t, 3 * H + j] = o
            c[t, j] = ct
            h[t, j] = o * np.tanh(ct)
    return h, c, gates


@njit(cache=True)
def lstm_backward(x, wx, wh, h, c, gates, dh):
    L, D = x.shape
    H = wh.shape[0]
    dx = np.zeros((L, D))
    dwx = np.zeros_like(wx)
    dwh = np.zeros_like(wh)
    db = np.zeros(4 * H)
    dh_next = np.zeros(H)
    dc_next = np.zeros(H)
    da = np.empty(4 * H)
    for t in range(L - 1, -1, -1):
        for j in range(H):
            i = gates[t, j]
            f = gates[t, H + j]
            g = gates[t, 2 * H + j]
            o = gates[t, 3 * H + j]
            cp = c[t - 1, j] if t > 0 else 0.0
            tc = np.tanh(c[t, j])
            dht = dh[t, j] + dh_next[j]
            do = dht * tc
            dct = dht * o * (1.0 - tc * tc) + dc_next[j]
            da[j] = dct * g * i * (1.0 - i)
            da[H + j] = dct * cp * f * (1.0 - f)
            da[2 * H + j] = dct * i * (1.0 - g * g)
            da[3 * H + j] = do * o * (1.0 - o)
            dc_next[j] = dct * f
        for m in range(4 * H):
            g = da[m]
            db[m] += g
            for d in range(D):
                dx[t, d] += g * wx[d, m]
                dwx[d, m] += x[t, d] * g
        if t > 0:
            for j in range(H):
                acc = 0.0
                for m in range(4 * H):
                    dwh[j, m] += h[t - 1, j] * da[m]
                    acc += da[m] * wh[j, m]
                dh_next[j] = acc
    return dx, dwx, dwh, db


@njit(cache=True)
def sgns_update(w_in, w_out, centers, contexts, negs, lr):
    n = centers.shape[0]
    d = w_in.shape[1]
    total = 0.0
    dv = np.empty(d)
    for p in range(n):
        cidx = centers[p]
        for q in range(d):
            dv[q] = 0.0
        # positive context
        oidx = contexts[p]
        dot = 0.0
        for q in range(d):
            dot += w_in[cidx, q] * w_out[oidx, q]
        s = _sig(dot)
        total -= np.log(max(s, 1e-12))
        grad = s - 1.0
        for q in range(d):
            dv[q] += grad * w_out[oidx, q]
            w_out[oidx, q] -= lr * grad * w_in[cidx, q]
        for j in range(negs.shape[1]):
            nidx = negs[p, j]
            dot = 0.0
            for q in range(d):
                dot += w_in[cidx, q] * w_out[nidx, q]
            sn = _sig(dot)
            total -= np.log(max(1.0 - sn, 1e-12))
            for q in range(d):
                dv[q] += sn * w_out[nidx, q]
                w_out[nidx, q] -= lr * sn * w_in[cidx, q]
        for q in range(d):
            w_in[cidx, q] -= lr * dv[q]
    return total / max(n, 1)
