"""Compare the compiled and numpy phase-noise kernels.

    python benchmarks/bench_phase_kernel.py --paths 20000 --steps 1000 --repeat 3

Both backends are fed the same seed; the script also reports the largest
difference between their accumulated sums.
"""
import argparse
import time

import numpy as np

from csl_neutrino import kernels


def run_once(backend, n_paths, n_steps, dt, seed):
    kern = kernels.get_backend(backend)
    out = np.zeros((4, n_steps + 1))
    bg = np.random.PCG64(seed)
    t0 = time.perf_counter()
    kern.accumulate_phase_paths(bg, n_paths, n_steps, dt, 0.0, np.sqrt(0.2), out)
    return time.perf_counter() - t0, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--paths", type=int, default=20000)
    ap.add_argument("--steps", type=int, default=1000)
    ap.add_argument("--dt", type=float, default=0.01)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=12345)
    args = ap.parse_args(argv)

    backends = kernels.available_backends()
    print(f"paths={args.paths} steps={args.steps} backends={backends}")
    results = {}
    for name in backends:
        times = []
        for _ in range(args.repeat):
            elapsed, out = run_once(name, args.paths, args.steps, args.dt, args.seed)
            times.append(elapsed)
        results[name] = (min(times), out)
        rate = args.paths * args.steps / min(times) / 1e6
        print(f"{name:>7}: best {min(times):.3f} s  ({rate:.1f} M steps/s)")
    if "cython" in results and "python" in results:
        speedup = results["python"][0] / results["cython"][0]
        diff = np.max(np.abs(results["cython"][1] - results["python"][1])) / args.paths
        print(f"speedup cython/python: {speedup:.2f}x, max |difference| per path: {diff:.2e}")


if __name__ == "__main__":
    main()
