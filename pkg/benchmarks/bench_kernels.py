"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import time

import numpy as np

from lifrecon import _backend, generate_random_bandlimited
from lifrecon import _kernels_py as python_kernels
from lifrecon.discrepancy import merge_events
from lifrecon.samplers import SamplerConfig, lif_sample


def best_of(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases(kern):
    f = generate_random_bandlimited(1.0, 16, (-1, 1), (-14, 14), seed=0)
    repr_ = f.kernel_repr()
    eta_a = lif_sample(f, SamplerConfig(0.01, 0.1, (-20, 20)))
    g = generate_random_bandlimited(1.0, 16, (-1, 1), (-14, 14), seed=1)
    eta_b = lif_sample(g, SamplerConfig(0.01, 0.1, (-20, 20)))
    u, va, ha, vb, hb = merge_events(eta_a, eta_b)
    d = np.random.default_rng(0).normal(size=20000)
    ts = np.linspace(-20, 20, 20000)
    return {
        "lif_sample (40 time units)": lambda: kern.lif_sample_atoms(
            *repr_, -20.0, 20.0, 0.01, 0.1, 1 / 32, 1e-10, 1e-6),
        f"brute-force d_E (N={u.size})": lambda: kern.event_discrepancy_bruteforce(
            u, va, ha, vb, hb, 0.1, False),
        f"streaming d_E (N={u.size})": lambda: kern.event_discrepancy_streaming(
            u, va - vb, 0.1),
        "grid d_F (N=20000)": lambda: kern.grid_discrepancy(d, 0.002, 0.1),
        "eval 16 atoms x 20000 t": lambda: kern.eval_atoms(*repr_, ts),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    compiled = _backend.compiled_kernels
    if compiled is None:
        print("compiled extension not available; timing the Python fallback only")
    py_cases = cases(python_kernels)
    c_cases = cases(compiled) if compiled is not None else {}
    print(f"{'kernel':32s} {'python [s]':>12s} {'compiled [s]':>13s} {'speedup':>9s}")
    for name, fn in py_cases.items():
        tp = best_of(fn, args.repeat)
        if name in c_cases:
            tc = best_of(c_cases[name], args.repeat)
            print(f"{name:32s} {tp:12.4f} {tc:13.5f} {tp / tc:8.1f}x")
        else:
            print(f"{name:32s} {tp:12.4f} {'-':>13s} {'-':>9s}")


if __name__ == "__main__":
    main()
