"""Compare the numba and numpy propagation kernels.

Run ``python3 benchmarks/bench_kernels.py``.  With ``ARMCHAIR_DISABLE_NUMBA=1``
only the numpy path is timed.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from armchair import _kernels
from armchair._accel import HAS_NUMBA
from armchair.potential import Potential


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--energies", type=int, default=3000)
    ap.add_argument("--steps", type=int, default=1024)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    lams = np.linspace(-5.0, 900.0, args.energies)
    q = Potential.fourier([1.0, 0.3], [0.2])
    q1, q2, h = q._gauss_samples(args.steps)
    pw = Potential.piecewise([0.25, 0.6], [1.0, -2.0, 0.5])
    lengths, values, jumps = pw._exact_plan()

    cases = {
        "smooth": lambda use: _kernels.propagate_smooth(lams, q1, q2, h, use_numba=use),
        "piecewise": lambda use: _kernels.propagate_piecewise(lams, lengths, values, jumps, use_numba=use),
    }
    print(f"energies={args.energies} steps={args.steps} numba_available={HAS_NUMBA}")
    for name, run in cases.items():
        t_np = best_of(lambda: run(False), args.repeat)
        line = f"{name:10s} numpy {t_np * 1e3:9.2f} ms"
        if HAS_NUMBA:
            run(True)  # compile
            t_nb = best_of(lambda: run(True), args.repeat)
            diff = float(np.max(np.abs(run(True) - run(False))))
            line += f"   numba {t_nb * 1e3:9.2f} ms   speedup {t_np / t_nb:6.2f}x   max|diff| {diff:.1e}"
        print(line)


if __name__ == "__main__":
    main()
