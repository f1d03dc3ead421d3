#!/usr/bin/env python3
"""Timing table for the corrected quadrature: compiled core vs numpy fallback.

Times one full-grid velocity evaluation (eval_F at the identity) and one
RK4 flow step per grid for every available backend, printing the speedup
of the compiled core over the fallback.  Results are medians over
--repeat runs; before timing, the backends are checked to agree to 1e-12
on each grid.

    python3 benchmarks/bench_quadrature.py
    python3 benchmarks/bench_quadrature.py --divisions 32 64 128 --repeat 5
    python3 benchmarks/bench_quadrature.py --threads 2 --json bench.json
"""

import argparse
import json
import time

import numpy as np

from sqgeo.backend import backend_name, get_backend
from sqgeo.flow import FlowMap, eval_F, evolve, preset_theta0

L = 4.0


def available_backends():
    mods = [get_backend("numpy")]
    preferred = get_backend("auto")
    if backend_name(preferred) == "compiled":
        mods.insert(0, preferred)
    return mods


def median_time(fn, repeat):
    laps = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        laps.append(time.perf_counter() - t0)
    return float(np.median(laps))


def bench(divisions, repeat, threads):
    rows = []
    for div in divisions:
        theta = preset_theta0("gaussian", h=L / div)
        idm = FlowMap.identity(L, L / div)
        outputs = {}
        for mod in available_backends():
            name = backend_name(mod)
            outputs[name] = eval_F(idm, theta, backend=mod, threads=threads)
            rows.append({
                "grid": f"L/{div}",
                "nodes": theta.n,
                "backend": name,
                "eval_F_s": median_time(
                    lambda: eval_F(idm, theta, backend=mod, threads=threads),
                    repeat),
                "rk4_step_s": median_time(
                    lambda: evolve(theta, t_end=0.25, dt=0.25, backend=mod,
                                   threads=threads), repeat),
            })
        if len(outputs) == 2:
            gap = max(float(np.max(np.abs(a - b))) for a, b in
                      zip(outputs["compiled"], outputs["numpy"]))
            if not gap < 1e-12:
                raise SystemExit(f"backend disagreement {gap:.3e} on L/{div}")
    return rows


def print_table(rows):
    header = f"{'grid':<7}{'nodes':>6}  {'backend':<9}" \
             f"{'eval_F [s]':>11}{'RK4 step [s]':>14}{'speedup':>9}"
    print(header)
    print("-" * len(header))
    base = {}
    for row in rows:
        if row["backend"] == "numpy":
            base[row["grid"]] = row["eval_F_s"]
    for row in rows:
        speed = ""
        if row["backend"] == "compiled" and row["grid"] in base:
            speed = f"{base[row['grid']] / row['eval_F_s']:.1f}x"
        print(f"{row['grid']:<7}{row['nodes']:>6}  {row['backend']:<9}"
              f"{row['eval_F_s']:>11.4f}{row['rk4_step_s']:>14.4f}"
              f"{speed:>9}")


def main():
    ap = argparse.ArgumentParser(
        description=__doc__.splitlines()[0],
        formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    ap.add_argument("--divisions", type=int, nargs="+", default=[32, 64],
                    help="grid divisions of the half-box L = 4")
    ap.add_argument("--repeat", type=int, default=3,
                    help="runs per timing (median reported)")
    ap.add_argument("--threads", type=int, default=1,
                    help="quadrature threads (compiled backend only)")
    ap.add_argument("--json", default=None, metavar="PATH",
                    help="also dump the rows as JSON")
    args = ap.parse_args()

    rows = bench(args.divisions, args.repeat, args.threads)
    print_table(rows)
    if args.json:
        with open(args.json, "w", encoding="ascii") as fh:
            json.dump({"threads": args.threads, "repeat": args.repeat,
                       "rows": rows}, fh, indent=2, sort_keys=True)
            fh.write("\n")


if __name__ == "__main__":
    main()
