#!/usr/bin/env python3
"""Benchmark the compiled kernel against the pure-Python fallback.

Times the three layers that dominate a control search: the bare matrix
exponential, a full K-slice schedule propagation, and the end-to-end QFI
objective. Run from the repository root:

    python3 benchmarks/bench_backends.py [--repeats N]
"""
import argparse
import time

import numpy as np

from lindmet._kern import _pykern
from lindmet.channels import build_scenario
from lindmet.liouville import unvectorize, vectorize
from lindmet.metrology import default_delta, qfi_eigen
from lindmet.propagation import ControlSchedule, SlicedDynamics
from lindmet.schemes import ghz_state, plus_state

try:
    from lindmet._kern import _cykern
except ImportError:
    _cykern = None


def timeit(fn, repeats):
    fn()  # warm up
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - t0) / repeats


def bench_expm(kernel, m, repeats):
    rng = np.random.default_rng(m)
    A = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    return timeit(lambda: kernel.expm(A), repeats)


def bench_propagate(kernel, scenario, K, repeats):
    model = build_scenario(scenario, 2 * np.pi)
    dyn = SlicedDynamics(model)
    rng = np.random.default_rng(0)
    amps = rng.uniform(-40, 40, (K, model.n_controls))
    v0 = vectorize(plus_state(1) if model.dim == 2 else ghz_state(2))
    L0 = dyn.constant_generator()
    return timeit(lambda: kernel.propagate_schedule(
        L0, dyn.control_supers, amps, 0.3 / K, v0), repeats)


def bench_objective(kernel, scenario, K, repeats):
    model = build_scenario(scenario, 2 * np.pi)
    dyn = SlicedDynamics(model)
    rng = np.random.default_rng(1)
    amps = rng.uniform(-40, 40, (K, model.n_controls))
    rho0 = plus_state(1) if model.dim == 2 else ghz_state(2)
    v0 = vectorize(rho0)
    L0 = dyn.constant_generator()
    delta = default_delta(2 * np.pi)
    dP = delta * dyn.drift_super

    def objective():
        rho = unvectorize(kernel.propagate_schedule(L0, dyn.control_supers, amps, 0.3 / K, v0))
        rp = unvectorize(kernel.propagate_schedule(L0 + dP, dyn.control_supers, amps, 0.3 / K, v0))
        rm = unvectorize(kernel.propagate_schedule(L0 - dP, dyn.control_supers, amps, 0.3 / K, v0))
        return qfi_eigen(rho, (rp - rm) / (2 * delta)).value

    return timeit(objective, repeats)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=300)
    args = parser.parse_args()

    kernels = [("python", _pykern)]
    if _cykern is not None:
        kernels.insert(0, ("compiled", _cykern))
    else:
        print("compiled kernel not built; timing the fallback only\n")

    rows = []
    for label, params in (
        ("expm 4x4", ("expm", 4)),
        ("expm 16x16", ("expm", 16)),
        ("propagate 1q K=20", ("prop", "parallel-dephasing-1q", 20)),
        ("propagate 2q K=20", ("prop", "parallel-dephasing-2q", 20)),
        ("qfi objective 1q K=20", ("obj", "parallel-dephasing-1q", 20)),
        ("qfi objective 2q K=20", ("obj", "parallel-dephasing-2q", 20)),
    ):
        times = {}
        for name, kern in kernels:
            reps = args.repeats if name == "compiled" else max(args.repeats // 5, 20)
            if params[0] == "expm":
                times[name] = bench_expm(kern, params[1], reps * 5)
            elif params[0] == "prop":
                times[name] = bench_propagate(kern, params[1], params[2], reps)
            else:
                times[name] = bench_objective(kern, params[1], params[2], reps)
        rows.append((label, times))

    width = max(len(r[0]) for r in rows)
    header = f"{'case':<{width}}  " + "".join(f"{n:>14}" for n, _ in kernels)
    if len(kernels) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for label, times in rows:
        line = f"{label:<{width}}  "
        for name, _ in kernels:
            line += f"{times[name] * 1e6:>12.1f}us"
        if len(kernels) == 2:
            line += f"{times['python'] / times['compiled']:>9.1f}x"
        print(line)


if __name__ == "__main__":
    main()
