#!/usr/bin/env python3
"""Run the Monte Carlo grids in scripts/experiments and write one CSV each.

    python scripts/run_simulation_study.py                 # every grid, config reps
    python scripts/run_simulation_study.py smoke --reps 5  # one grid, fewer reps
    CPKERNEL_THREADS=4 python scripts/run_simulation_study.py mse_by_design

Output goes to results/<name>.csv (columns model, scenario, sigma, n, s0,
reps, mse, bias, failures). Worker count never changes the numbers.
"""
import argparse
import json
import sys
import time
from pathlib import Path

from markedcp.cli import SIMULATE_COLUMNS, run_simulation, write_rows

HERE = Path(__file__).resolve().parent
EXPERIMENTS = HERE / "experiments"


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("names", nargs="*", help="experiment names (default: all)")
    p.add_argument("--reps", type=int, help="override replications per cell")
    p.add_argument("--seed", type=int, help="override the base seed")
    p.add_argument("--workers", type=int, help="worker processes (default: CPKERNEL_THREADS or 1)")
    p.add_argument("--out-dir", type=Path, default=Path("results"))
    args = p.parse_args(argv)

    available = {f.stem: f for f in sorted(EXPERIMENTS.glob("*.json"))}
    names = args.names or list(available)
    unknown = [n for n in names if n not in available]
    if unknown:
        p.error(f"unknown experiment(s) {unknown}; available: {sorted(available)}")

    args.out_dir.mkdir(parents=True, exist_ok=True)
    for name in names:
        spec = json.loads(available[name].read_text())
        t0 = time.perf_counter()
        rows = run_simulation(spec, seed=args.seed, reps=args.reps, workers=args.workers)
        out = args.out_dir / f"{name}.csv"
        with out.open("w", newline="") as fh:
            write_rows(rows, SIMULATE_COLUMNS, fh)
        print(f"{name}: {len(rows)} rows -> {out} ({time.perf_counter() - t0:.1f}s)", file=sys.stderr)


if __name__ == "__main__":
    main()
