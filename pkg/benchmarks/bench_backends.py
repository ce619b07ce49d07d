"""Compare the compiled and pure-Python simulation backends.

Runs the constant-drag scenario (the workload the fitting objective
executes thousands of times) on both backends, checks they agree exactly,
and reports wall time and speedup.

Usage: python3 benchmarks/bench_backends.py [--t-end SECONDS] [--repeat N]
"""

import argparse
import time

import numpy as np

from vibropair import BACKEND, constant_drag, simulate


def _time_backend(scenario, backend, repeat):
    best = float("inf")
    traj = None
    for _ in range(repeat):
        start = time.perf_counter()
        traj = simulate(scenario, backend=backend)
        best = min(best, time.perf_counter() - start)
    return best, traj


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--t-end", type=float, default=2.0)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    scenario = constant_drag(t_end=args.t_end)
    print(f"default backend: {BACKEND}")
    print(f"scenario: constant-drag, t_end={args.t_end} s, "
          f"{int(round(args.t_end / 2e-5))} base steps")

    t_py, traj_py = _time_backend(scenario, "python", args.repeat)
    print(f"python backend:  {t_py:8.3f} s  ({len(traj_py.events)} events)")

    if BACKEND != "cython":
        print("compiled backend not available; nothing to compare")
        return

    t_cy, traj_cy = _time_backend(scenario, "cython", args.repeat)
    print(f"cython backend:  {t_cy:8.3f} s  ({len(traj_cy.events)} events)")

    same = (np.array_equal(traj_py.x2, traj_cy.x2)
            and np.array_equal(traj_py.v2, traj_cy.v2)
            and [e.t_event for e in traj_py.events]
            == [e.t_event for e in traj_cy.events])
    print(f"backends bit-identical: {same}")
    print(f"speedup: {t_py / t_cy:.1f}x")


if __name__ == "__main__":
    main()
