"""Timing comparison of the numba and pure-numpy kernel backends.

Run with `python3 benchmarks/bench_kernels.py`. Both backends are imported
directly (bypassing the CMLYRICS_BACKEND selection) so a single process can
time them side by side. Numba timings exclude the first call, which pays the
JIT compilation cost.
"""

import argparse
import time

import numpy as np

from cmlyrics.kernels import numpy_backend

try:
    from cmlyrics.kernels import numba_backend
except ImportError:
    numba_backend = None


def make_cases(seed):
    rng = np.random.default_rng(seed)
    T, Kt = 40, 3
    phi = rng.normal(0, 1, (T, Kt))
    trans = rng.normal(0, 1, (Kt + 1, Kt))

    L, D, F = 120, 100, 64
    x = rng.normal(0, 1, (L, D))
    filt = rng.normal(0, 0.1, (3, D, F))
    bias = rng.normal(0, 0.1, F)
    dpre = rng.normal(0, 1, (L, F))

    H = 64
    xl = rng.normal(0, 1, (L, F))
    wx = rng.normal(0, 0.1, (F, 4 * H))
    wh = rng.normal(0, 0.1, (H, 4 * H))
    b = rng.normal(0, 0.1, 4 * H)
    dh = rng.normal(0, 1, (L, H))

    V, d, n_pairs, n_neg = 2000, 100, 5000, 5
    w_in = rng.normal(0, 0.01, (V, d))
    w_out = np.zeros((V, d))
    centers = rng.integers(1, V, n_pairs)
    contexts = rng.integers(1, V, n_pairs)
    negs = rng.integers(1, V, (n_pairs, n_neg))

    def lstm_bwd(be):
        h_, c_, g_ = be.lstm_forward(xl, wx, wh, b)
        return be.lstm_backward(xl, wx, wh, h_, c_, g_, dh)

    return [
        ("crf_forward_backward", lambda be: be.crf_forward_backward(phi, trans)),
        ("crf_viterbi", lambda be: be.crf_viterbi(phi, trans)),
        ("conv1d_w3", lambda be: be.conv1d_w3(x, filt, bias)),
        ("conv1d_w3_backward", lambda be: be.conv1d_w3_backward(x, filt, dpre)),
        ("lstm_forward", lambda be: be.lstm_forward(xl, wx, wh, b)),
        ("lstm_forward+backward", lstm_bwd),
        ("sgns_update (5k pairs)",
         lambda be: be.sgns_update(w_in.copy(), w_out.copy(), centers,
                                   contexts, negs, 0.025)),
    ]


def bench(fn, be, repeats):
    fn(be)  # warm-up (numba JIT / caches)
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(be)
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    backends = [("numpy", numpy_backend)]
    if numba_backend is not None:
        backends.append(("numba", numba_backend))
    else:
        print("numba unavailable; timing the numpy backend only")

    cases = make_cases(args.seed)
    header = f"{'kernel':<24}" + "".join(f"{n:>12}" for n, _ in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for name, fn in cases:
        row = f"{name:<24}"
        results = [bench(fn, be, args.repeats) for _, be in backends]
        for r in results:
            row += f"{1e3 * r:>10.2f}ms"
        if len(results) == 2:
            row += f"{results[0] / results[1]:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
