"""Compare the compiled and pure-Python integration kernels.

Times unconditional dynamics of all-to-all coupled modes on both backends,
checks that they produce the same moments and prints the fitted scaling
exponent of each.

    python benchmarks/compare_backends.py --modes 5,10,20,40 --reps 3 --steps 10000
"""
import argparse

import numpy as np

from symgauss import available_backends, tensor_product, coherent, unconditional_dynamics
from symgauss.bench import coupled_spec, run_bench


def max_difference(n_modes=10, steps=2000):
    spec = coupled_spec(n_modes, omega=1.0, rng=0)
    initial = tensor_product([coherent(1.0)] * n_modes)
    times = np.linspace(0.0, 10.0, 11)
    a = unconditional_dynamics(spec, initial, times, max_step=10.0 / steps, backend="compiled")
    b = unconditional_dynamics(spec, initial, times, max_step=10.0 / steps, backend="python")
    return float(max(np.max(np.abs(a.V - b.V)), np.max(np.abs(a.R - b.R))))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--modes", default="5,10,20,40")
    parser.add_argument("--reps", type=int, default=3)
    parser.add_argument("--steps", type=int, default=10_000)
    args = parser.parse_args()
    modes = [int(m) for m in args.modes.split(",")]

    backends = available_backends()
    if "compiled" not in backends:
        print("compiled kernels not built; only the python backend is available")
    else:
        print(f"max |compiled - python| over moments: {max_difference():.3e}")

    reports = {b: run_bench(modes, args.reps, args.steps, backend=b) for b in backends}
    print(f"{'N':>4} " + " ".join(f"{b + ' [s]':>14}" for b in backends) + ("   speed-up" if len(backends) == 2 else ""))
    for i, n in enumerate(modes):
        row = " ".join(f"{reports[b].seconds[i]:14.4f}" for b in backends)
        if len(backends) == 2:
            row += f"   {reports['python'].seconds[i] / reports['compiled'].seconds[i]:8.1f}x"
        print(f"{n:>4} {row}")
    for b, rep in reports.items():
        lo, hi = rep.exponent_ci
        print(f"{b}: exponent {rep.exponent:.3f} (95% CI {lo:.3f}..{hi:.3f})")


if __name__ == "__main__":
    main()
