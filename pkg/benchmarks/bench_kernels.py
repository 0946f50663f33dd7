"""Compiled versus numpy kernels on profile-sized workloads.

Usage: ``python benchmarks/bench_kernels.py [--repeat R] [--offsets M]``.
Prints the best-of-R wall time per backend and the largest disagreement
between backends.
"""

import argparse
import time

import numpy as np

from pdante import kernels
from pdante import sequences as sq


def best_time(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - start)
    return min(times), out


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--offsets", type=int, default=20001)
    args = parser.parse_args(argv)

    w = 2 * np.pi * np.linspace(-5000, 5000, args.offsets)
    cases = [
        ("dante N=30", sq.dante(30, np.pi / 60, 720e-9, 2e-3)),
        ("random N=30", sq.pdante_random(30, np.pi / 60, 720e-9, 46.4e-3, seed=1)),
        ("random N=300", sq.pdante_random(300, np.pi / 600, 720e-9, 0.5, seed=1)),
    ]
    print(f"backends available: {sorted(kernels.BACKENDS)}; {args.offsets} offsets; best of {args.repeat}")
    print(f"{'case':<14}{'kernel':<16}" + "".join(f"{b:>12}" for b in sorted(kernels.BACKENDS)) + f"{'max diff':>12}")
    for label, spec in cases:
        jobs = {
            "sequence_ck": lambda b: kernels.sequence_ck(w, spec.omega_rf, spec.t_p, spec.phases, spec.delays,
                                                         backend=b),
            "toggling_sums": lambda b: kernels.toggling_sums(w, spec.times, spec.phases, spec.t_p, 2, backend=b),
        }
        for name, job in jobs.items():
            row, outs = [], []
            for b in sorted(kernels.BACKENDS):
                t, out = best_time(lambda: job(b), args.repeat)
                row.append(t)
                outs.append(out)
            diff = max(float(np.abs(x - y).max()) for x, y in zip(outs[0], outs[-1]))
            print(f"{label:<14}{name:<16}" + "".join(f"{t * 1e3:>10.2f}ms" for t in row) + f"{diff:>12.2g}")


if __name__ == "__main__":
    main()
