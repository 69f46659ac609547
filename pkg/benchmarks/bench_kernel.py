"""Compare the compiled and pure-Python integration kernels.

    python benchmarks/bench_kernel.py [--repeat N]
"""

import argparse
import time
from fractions import Fraction

import numpy as np

from rpkit.core_model import Constant, PowerLaw, RpeParams, State
from rpkit.integrate import IntegratorConfig, available_backends, integrate_rpe

WORKLOADS = {
    "full, t in [0, 50]": (RpeParams(re_inv=Fraction(1, 10), we=Fraction(1, 2), th=1, p_n=1, k=1,
                                     forcing=Constant(1)), State(0.0, 1.5, 0.0), 50.0),
    "power-law forcing, t in [0, 50]": (RpeParams(re_inv=Fraction(1, 10), th=1, p_n=1, k=Fraction(2, 3),
                                                  forcing=PowerLaw(1, 1, 1, -1)), State(0.0, 1.2, 0.3), 50.0),
    "Rayleigh collapse to 1e-6": (RpeParams(th=1, forcing=Constant(1)), State(0.0, 1.0, 0.0), 2.0),
}


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = available_backends()
    cfg = IntegratorConfig()
    print(f"backends: {', '.join(backends)}")
    print(f"{'workload':34} {'steps':>7} " + " ".join(f"{b + ' [s]':>12}" for b in backends) + "   speedup  identical")
    for name, (p, s0, t_end) in WORKLOADS.items():
        timings, runs = {}, {}
        for b in backends:
            timings[b], runs[b] = best_of(lambda: integrate_rpe(p, s0, t_end, cfg, backend=b), args.repeat)
        steps = runs[backends[0]].n_accept
        cols = " ".join(f"{timings[b]:12.4f}" for b in backends)
        if len(backends) == 2:
            speed = timings["python"] / timings["cython"]
            same = np.array_equal(runs["python"].rs, runs["cython"].rs)
            print(f"{name:34} {steps:7d} {cols} {speed:9.1f}x  {same}")
        else:
            print(f"{name:34} {steps:7d} {cols}")


if __name__ == "__main__":
    main()
