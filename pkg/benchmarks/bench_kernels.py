"""Compare the compiled and pure-Python kernel backends.

    python3 benchmarks/bench_kernels.py [--length 10000] [--repeat 5]

Reports the best-of-N wall time per workload and backend, checks that both
backends return bitwise-identical forecasts, and times the time-variant
retraining baseline for scale.
"""
import argparse
import time

import numpy as np

from nsfts import kernels
from nsfts.drift import DriftSpec, generate
from nsfts.fts import train
from nsfts.metamodels import RetrainPolicy, run_time_variant
from nsfts.model import train_nsfts


def best_of(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def workloads(y, cut, k):
    def stream():
        return train_nsfts(y[:cut], k).run_online(y[cut:]).forecasts

    def pattern_pass():
        return train(y, k).rulebase.csr()[1]

    return {"nsfts train + stream": stream, "static train": pattern_pass}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--length", type=int, default=10_000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--k", type=int, default=35)
    args = ap.parse_args()

    y = generate(DriftSpec("incremental-mean", args.length, seed=1, noise_ar=0.9)).values
    cut = len(y) // 10
    backends = sorted(kernels.BACKENDS)
    results = {}
    for name in backends:
        kernels.use_backend(name)
        for label, fn in workloads(y, cut, args.k).items():
            results[label, name] = best_of(fn, args.repeat)
    kernels.use_backend("compiled" if "compiled" in backends else "python")

    print(f"{args.length} points, k={args.k}, best of {args.repeat}")
    print(f"{'workload':<24}" + "".join(f"{b:>12}" for b in backends) + "     speedup")
    for label in workloads(y, cut, args.k):
        times = [results[label, b][0] for b in backends]
        line = f"{label:<24}" + "".join(f"{t:>11.4f}s" for t in times)
        if len(backends) == 2:
            same = np.array_equal(results[label, backends[0]][1], results[label, backends[1]][1])
            line += f"  {times[1] / times[0]:>8.1f}x  {'identical' if same else 'MISMATCH'}"
        print(line)

    t_tv, _ = best_of(lambda: run_time_variant(y, RetrainPolicy(100, 10), args.k), 1)
    print(f"{'time-variant W=100 R=10':<24}{t_tv:>11.4f}s  (active backend: {kernels.backend_name()})")


if __name__ == "__main__":
    main()
