"""Command line interface: ``estimate``, ``simulate`` and ``bandwidth``.

Exit codes: 0 success, 1 usage / input error, 2 estimation error.
"""
from __future__ import annotations

import argparse
import csv
import itertools
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ConfigError, EstimationError
from .estimators import EstimatorConfig, estimate_change, ks_statistic, lag_embed
from .kernels import KernelSpec
from .simulate import DEFAULT_S0_GRID, DgpConfig, SigmaSpec, monte_carlo
from .smoothing import Sample, select_bandwidth

log = logging.getLogger("markedcp")

SIMULATE_COLUMNS = ("model", "scenario", "sigma", "n", "s0", "reps", "mse", "bias", "failures")
PROFILE_COLUMNS = ("k", "s", "ks", "cvm", "ks_scaled", "unmarked")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunConfig:
    command: str
    input_path: Optional[Path] = None
    output_path: Optional[Path] = None
    estimator: EstimatorConfig = field(default_factory=EstimatorConfig)
    autoregressive: bool = False
    experiment: Optional[dict] = None
    seed: Optional[int] = None
    reps: Optional[int] = None
    profile_out: Optional[Path] = None
    annotate_critical: Optional[float] = None


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


# --- ingestion -------------------------------------------------------------

def _covariate_columns(header: list[str]) -> list[str]:
    if "x" in header:
        return ["x"]
    cols = []
    j = 1
    while f"x{j}" in header:
        cols.append(f"x{j}")
        j += 1
    return cols


def _parse_cell(text: str, row: int, col: str) -> float:
    if text is None or text.strip() == "":
        raise ConfigError(f"missing value at row {row}, column '{col}'")
    try:
        v = float(text)
    except ValueError:
        raise ConfigError(f"non-numeric value {text!r} at row {row}, column '{col}'") from None
    if not math.isfinite(v):
        raise ConfigError(f"non-finite value {text!r} at row {row}, column '{col}'")
    return v


def ingest_csv(path, autoregressive: bool = False) -> Sample:
    """Read a sample from CSV.

    Columns are matched by name: optional ``label``, covariates ``x`` or
    ``x1..xd``, response ``y``. With ``autoregressive=True`` only ``y`` is
    used and lagged into ``(y[t-1], y[t])`` pairs. Row numbers in messages
    count data rows from 1.
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"input file not found: {path}")
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        header = [h.strip() for h in (reader.fieldnames or [])]
        reader.fieldnames = header
        if "y" not in header:
            raise ConfigError(f"{path}: missing required column 'y'")
        xcols = [] if autoregressive else _covariate_columns(header)
        if not autoregressive and not xcols:
            raise ConfigError(f"{path}: missing covariate column 'x' (or x1, x2, ...)")
        has_label = "label" in header
        xs, ys, labels = [], [], []
        for i, rec in enumerate(reader, start=1):
            if None in rec:
                raise ConfigError(f"row {i} has more fields than the header")
            ys.append(_parse_cell(rec.get("y"), i, "y"))
            xs.append([_parse_cell(rec.get(c), i, c) for c in xcols])
            if has_label:
                labels.append(rec["label"].strip())
    if autoregressive:
        return lag_embed(np.array(ys), labels if has_label else None)
    if len(ys) < 2:
        raise ConfigError(f"{path}: need at least 2 data rows, found {len(ys)}")
    return Sample(np.array(xs), np.array(ys), labels if has_label else None)


def write_sample_csv(sample: Sample, path) -> None:
    """Write a sample in the layout read by :func:`ingest_csv`."""
    xcols = ["x"] if sample.d == 1 else [f"x{j + 1}" for j in range(sample.d)]
    header = (["label"] if sample.time_labels is not None else []) + xcols + ["y"]
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for i in range(sample.n):
            row = [sample.time_labels[i]] if sample.time_labels is not None else []
            row += [repr(float(v)) for v in sample.x[i]]
            row.append(repr(float(sample.y[i])))
            w.writerow(row)


# --- emitters --------------------------------------------------------------

def write_profile_csv(estimate, path, critical: Optional[float] = None) -> None:
    prof = estimate.profile
    n = prof.n
    scale = math.sqrt(n)
    header = list(PROFILE_COLUMNS) + (["critical"] if critical is not None else [])
    unmarked = prof.unmarked if prof.unmarked is not None else np.full(n + 1, np.nan)
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for k in range(n + 1):
            row = [k, k / n, float(prof.ks[k]), float(prof.cvm[k]), scale * float(prof.ks[k]), float(unmarked[k])]
            if critical is not None:
                row.append(float(critical))
            w.writerow([_fmt(v) for v in row])


def _as_list(v):
    return list(v) if isinstance(v, (list, tuple)) else [v]


def estimator_from_dict(d: dict) -> EstimatorConfig:
    bw = d.get("bandwidth", "cv")
    trim = d.get("trim", "auto")
    return EstimatorConfig(
        variant=d.get("variant", "ks"),
        kernel=KernelSpec.from_name(d.get("kernel", "epa4")),
        bandwidth=bw if bw == "cv" else float(bw),
        trim=trim if trim in ("none", "auto") else float(trim),
    )


def expand_experiment(spec: dict, seed: Optional[int] = None, reps: Optional[int] = None):
    """Yield ``(DgpConfig template, EstimatorConfig, reps, s0 grid)`` tuples."""
    blocks = spec.get("experiments", [spec])
    for block in blocks:
        merged = {k: v for k, v in spec.items() if k != "experiments"}
        merged.update(block)
        est = estimator_from_dict(merged.get("estimator", {}))
        r = int(reps if reps is not None else merged.get("reps", 100))
        base_seed = int(seed if seed is not None else merged.get("seed", 0))
        grid = [float(v) for v in _as_list(merged.get("s0", list(DEFAULT_S0_GRID)))]
        for model, scenario, sigma, n in itertools.product(
            _as_list(merged.get("model", "iid")),
            _as_list(merged.get("scenario", "c1")),
            _as_list(merged.get("sigma", "const1")),
            _as_list(merged.get("n", 100)),
        ):
            dgp = DgpConfig(model=model, scenario=scenario, sigma=SigmaSpec.parse(sigma), n=int(n),
                            s0=grid[0], seed=base_seed, burn_in=int(merged.get("burn_in", 200)))
            yield dgp, est, r, grid


def run_simulation(spec: dict, seed=None, reps=None, workers=None) -> list[dict]:
    rows = []
    for dgp, est, r, grid in expand_experiment(spec, seed, reps):
        for res in monte_carlo(dgp, est, r, grid, workers=workers):
            rows.append({
                "model": dgp.model,
                "scenario": dgp.scenario,
                "sigma": dgp.sigma.label(),
                "n": dgp.n,
                "s0": res.dgp.s0,
                "reps": r,
                "mse": res.mse,
                "bias": res.bias,
                "failures": res.failures,
            })
    return rows


def write_rows(rows, columns, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(row[c]) for c in columns])


def _open_out(path: Optional[Path]):
    if path is None:
        return sys.stdout, False
    return Path(path).open("w", newline=""), True


# --- commands --------------------------------------------------------------

def _cmd_estimate(cfg: RunConfig) -> int:
    sample = ingest_csv(cfg.input_path, cfg.autoregressive)
    est = estimate_change(sample, cfg.estimator)
    record = est.to_dict()
    record["ks_statistic"] = ks_statistic(est.profile)
    if cfg.annotate_critical is not None:
        record["critical_value"] = cfg.annotate_critical
    fh, close = _open_out(cfg.output_path)
    try:
        json.dump(record, fh, indent=2)
        fh.write("\n")
    finally:
        if close:
            fh.close()
    if cfg.profile_out is not None:
        write_profile_csv(est, cfg.profile_out, cfg.annotate_critical)
    return 0


def _cmd_simulate(cfg: RunConfig) -> int:
    if cfg.experiment is None:
        raise ConfigError("simulate needs --input with a JSON experiment config")
    rows = run_simulation(cfg.experiment, cfg.seed, cfg.reps)
    fh, close = _open_out(cfg.output_path)
    try:
        write_rows(rows, SIMULATE_COLUMNS, fh)
    finally:
        if close:
            fh.close()
    return 0


def _cmd_bandwidth(cfg: RunConfig) -> int:
    sample = ingest_csv(cfg.input_path, cfg.autoregressive)
    est = cfg.estimator
    kernel = KernelSpec(est.kernel.family, est.kernel.support_c, sample.d)
    sel = select_bandwidth(sample, kernel, est.resolve_trim(sample), est.cv_grid)
    print(json.dumps({"h": sel.h}))
    if cfg.output_path is not None:
        rows = [{"h": h, "score": s} for h, s in sel.cv_scores]
        with Path(cfg.output_path).open("w", newline="") as fh:
            write_rows(rows, ("h", "score"), fh)
    return 0


COMMANDS = {"estimate": _cmd_estimate, "simulate": _cmd_simulate, "bandwidth": _cmd_bandwidth}


def run(config: RunConfig) -> int:
    """Execute one command and map failures to exit codes."""
    try:
        return COMMANDS[config.command](config)
    except EstimationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, UsageError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="markedcp", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def estimator_flags(sp):
        sp.add_argument("--variant", choices=("ks", "cvm"), default="ks")
        sp.add_argument("--kernel", default="epa4", help="epa2, epa4 or uniform")
        sp.add_argument("--bandwidth", default="cv", help="'cv' or a positive bandwidth")
        sp.add_argument("--trim", default="auto", help="'none', 'auto' or a box half-width")
        sp.add_argument("--autoregressive", action="store_true",
                        help="treat the y column as a series and regress on its lag")

    est = sub.add_parser("estimate", help="estimate the change point of a data set")
    est.add_argument("--input", required=True, type=Path)
    est.add_argument("--output", type=Path)
    est.add_argument("--profile-out", type=Path)
    est.add_argument("--critical-value", type=float)
    estimator_flags(est)

    sim = sub.add_parser("simulate", help="run a Monte Carlo experiment")
    sim.add_argument("--input", required=True, type=Path, help="JSON experiment config")
    sim.add_argument("--output", type=Path)
    sim.add_argument("--seed", type=int)
    sim.add_argument("--reps", type=int)

    bw = sub.add_parser("bandwidth", help="cross-validated bandwidth for a data set")
    bw.add_argument("--input", required=True, type=Path)
    bw.add_argument("--output", type=Path, help="CSV of (h, score)")
    estimator_flags(bw)
    return p


def config_from_args(args) -> RunConfig:
    cfg = RunConfig(command=args.command, input_path=args.input, output_path=args.output)
    if args.command in ("estimate", "bandwidth"):
        cfg.estimator = estimator_from_dict(vars(args))
        cfg.autoregressive = args.autoregressive
    if args.command == "estimate":
        cfg.profile_out = args.profile_out
        cfg.annotate_critical = args.critical_value
    if args.command == "simulate":
        if not args.input.is_file():
            raise ConfigError(f"config file not found: {args.input}")
        cfg.experiment = json.loads(args.input.read_text())
        cfg.seed = args.seed
        cfg.reps = args.reps
    return cfg


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        cfg = config_from_args(args)
    except (UsageError, ConfigError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
