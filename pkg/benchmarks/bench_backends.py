"""Time the hot kernels under both backends.

Each backend runs in its own interpreter because ``EITSIM_BACKEND`` is read
at import time::

    python benchmarks/bench_backends.py --repeat 5
    python benchmarks/bench_backends.py --json timings.json
"""

import argparse
import json
import os
import subprocess
import sys
import time

BACKENDS = ("numba", "numpy")


def _best_of(func, repeat):
    func()  # warm-up (includes JIT compilation)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        func()
        best = min(best, time.perf_counter() - t0)
    return best


def measure(repeat):
    import numpy as np

    from eitsim import BACKEND, bell, kernels, memorychannel, polariton

    rng = np.random.default_rng(1)
    js = 5.0 * np.arange(1, 10_001) / 10_000
    rho = memorychannel.random_density_matrix(3, rng).matrix
    f = np.array([0.9, 0.7 + 0.1j, 0.5j])
    params = polariton.MemoryParams(gamma21=0.1, gamma31=1.0, delta=0.05, delta_p=0.3, coupling_strength_sq=1e4)
    schedule = polariton.CouplingSchedule.storage_retrieval(1e3, 1.0, 4.0, 5.0, ramp=0.5, shape="smooth")

    cases = {
        "ch_excess_scan (1e4 J)": lambda: kernels.ch_excess_scan(0.9, 0.9, js),
        "channel_map (3 qubits) x200": lambda: [kernels.channel_map(rho, f) for _ in range(200)],
        "minimize_ch": lambda: bell.minimize_ch(0.9, 0.9),
        "attenuation_factor (smooth ramps)": lambda: polariton.attenuation_factor(params, schedule),
        "dsp_evolve_numeric (k=0.5)": lambda: polariton.dsp_evolve_numeric(params, schedule, 0.5, 1.0),
    }
    return BACKEND, {name: _best_of(fn, repeat) for name, fn in cases.items()}


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--json", help="also write timings to this file")
    p.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = p.parse_args(argv)

    if args.child:
        backend, timings = measure(args.repeat)
        print(json.dumps({"backend": backend, "timings": timings}))
        return 0

    results = {}
    for backend in BACKENDS:
        env = dict(os.environ, EITSIM_BACKEND=backend)
        proc = subprocess.run(
            [sys.executable, __file__, "--child", "--repeat", str(args.repeat)],
            env=env, capture_output=True, text=True, check=True,
        )
        out = json.loads(proc.stdout.strip().splitlines()[-1])
        results[out["backend"]] = out["timings"]

    names = list(next(iter(results.values())))
    print(f"{'kernel':<36}{'numba [s]':>12}{'numpy [s]':>12}{'speedup':>10}")
    for name in names:
        tn, tp = results["numba"][name], results["numpy"][name]
        print(f"{name:<36}{tn:>12.2e}{tp:>12.2e}{tp / tn:>9.1f}x")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(results, fh, indent=2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
