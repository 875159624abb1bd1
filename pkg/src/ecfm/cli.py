"""Batch command-line interface.

Subcommands:
  run       execute the configured experiment end to end and write a report
  gen-data  synthesize and persist the measurement data only
  scan      evaluate the dynamic loss surface on a parameter grid
  verify    run the fast invariant suite

Exit codes: 0 success, 2 configuration error, 3 solver failure,
4 infeasible program, 1 failed verification.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .errors import ConfigError, InfeasibleError, SolverError
from .experiments.config import load_config
from .experiments.report import run_directory
from .io import read_csv


def _load_or_generate_data(config, out_dir):
    from .experiments import beam, burgers, kpp

    if config.experiment.startswith("Burgers"):
        if config.data_file:
            _, body = read_csv(config.data_file)
            return body[:, 1:].T  # drop the time column
        return burgers.generate_burgers_data(config, out_dir=out_dir)
    if config.experiment.startswith("Kpp"):
        if config.data_file:
            _, body = read_csv(config.data_file)
            return body[:, 2]
        return kpp.generate_kpp_data(config, out_dir=out_dir)
    if config.data_file:
        from .pce import MeasurementReplicates

        _, body = read_csv(config.data_file)
        c = int(body[:, 0].max())
        d = int(body[:, 2].max())
        values = np.zeros((c, d))
        points = np.zeros(c)
        for row in body:
            i, j = int(row[0]) - 1, int(row[2]) - 1
            points[i] = row[1]
            values[i, j] = row[3]
        return MeasurementReplicates(points=points, values=values)
    return beam.generate_beam_data(config, out_dir=out_dir)


def _cmd_run(args) -> int:
    from .experiments import beam, burgers, kpp

    config = load_config(args.config)
    out_dir = run_directory(config.output_dir, config.experiment)
    data = _load_or_generate_data(config, out_dir)
    runners = {
        "BurgersInv": burgers.run_burgers_inverse,
        "BurgersEcfm": burgers.run_burgers_ecfm,
        "KppInv": kpp.run_kpp_inverse,
        "KppEcfm": kpp.run_kpp_ecfm,
        "BeamEcfm": beam.run_beam_ecfm,
    }
    report = runners[config.experiment](config, data, out_dir=out_dir)
    print(f"report written to {out_dir}/report.json")
    print(f"recovered parameters: {report.recovered_params}")
    for key, value in sorted(report.error_metrics.items()):
        print(f"  {key}: {value}")
    return 0


def _cmd_gen_data(args) -> int:
    config = load_config(args.config)
    out_dir = run_directory(config.output_dir, f"{config.experiment}-data")
    _load_or_generate_data(config, out_dir)
    print(f"data written to {out_dir}/data.csv")
    return 0


def _cmd_scan(args) -> int:
    from .experiments import burgers
    from .experiments.surface import parse_grid, scan_loss_surface

    config = load_config(args.config)
    if not config.experiment.startswith("Burgers"):
        raise ConfigError("loss-surface scans are defined for the dynamic experiments")
    axes = parse_grid(args.grid)
    out_dir = run_directory(config.output_dir, f"{config.experiment}-scan")
    data = _load_or_generate_data(config, None)
    if config.experiment == "BurgersEcfm":
        objective = burgers.ecfm_objective_fn(config, data)
    else:
        objective = burgers.standard_objective_fn(config, data)
    e1, e2, values = scan_loss_surface(objective, axes, out_path=f"{out_dir}/surface.csv",
                                       workers=args.workers)
    i, j = np.unravel_index(np.argmin(values), values.shape)
    print(f"surface written to {out_dir}/surface.csv")
    print(f"grid minimum at eps1={e1[i]}, eps2={e2[j]} (objective {values[i, j]})")
    return 0


def _cmd_verify(args) -> int:
    from .verify import run_verification

    return 0 if run_verification() else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ecfm", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the configured experiment")
    p_run.add_argument("config", help="path to the JSON config")
    p_run.set_defaults(fn=_cmd_run)

    p_gen = sub.add_parser("gen-data", help="synthesize measurement data")
    p_gen.add_argument("config")
    p_gen.set_defaults(fn=_cmd_gen_data)

    p_scan = sub.add_parser("scan", help="scan the loss surface on a grid")
    p_scan.add_argument("config")
    p_scan.add_argument("--grid", required=True,
                        help="lo:hi:n,lo:hi:n for the two model parameters")
    p_scan.add_argument("--workers", type=int, default=None)
    p_scan.set_defaults(fn=_cmd_scan)

    p_verify = sub.add_parser("verify", help="run the invariant suite")
    p_verify.set_defaults(fn=_cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 4
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
