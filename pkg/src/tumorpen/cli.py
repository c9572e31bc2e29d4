"""Command-line entry point.

Subcommands::

    tumorpen run <config>
    tumorpen sweep <config> --param {epsilon,omega,delta} --values v1,v2,...
    tumorpen converge <case> [--resolutions n1,n2,...]
    tumorpen validate <config>

Exit codes: 0 success, 2 usage, 3 configuration, 4 numerical, 5 I/O.
``TUMORPEN_OUTPUT_DIR`` overrides the output directory of the config.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from .config import load_config
from .errors import ConfigError, NumericalError
from .experiments import CONVERGENCE_CASES, LIMIT_PARAMS, SweepSpec, convergence_study, parameter_sweep, run_simulation
from .io import write_convergence_table, write_diagnostics, write_field_snapshot, write_sweep_table

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_NUMERICAL = 4
EXIT_IO = 5

OUTPUT_ENV = "TUMORPEN_OUTPUT_DIR"

log = logging.getLogger("tumorpen")


class _UsageError(Exception):
    pass


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _output_dir(config_dir: str, override) -> Path:
    if override:
        return Path(override)
    env = os.environ.get(OUTPUT_ENV)
    return Path(env) if env else Path(config_dir)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tumorpen", description="Penalized tumor-growth simulator")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one simulation and write diagnostics and a final snapshot")
    p.add_argument("config")
    p.add_argument("--output-dir", default=None)

    p = sub.add_parser("sweep", help="run a limit-passage sweep and write the sweep table")
    p.add_argument("config")
    p.add_argument("--param", required=True, choices=LIMIT_PARAMS)
    p.add_argument("--values", required=True, type=_float_list)
    p.add_argument("--output-dir", default=None)

    p = sub.add_parser("converge", help="run a verification convergence study")
    p.add_argument("case", choices=CONVERGENCE_CASES)
    p.add_argument("--resolutions", type=_int_list, default=None)
    p.add_argument("--output-dir", default=None)

    p = sub.add_parser("validate", help="parse and validate a configuration file")
    p.add_argument("config")
    return parser


def _load(path: str):
    if not Path(path).is_file():
        raise FileNotFoundError(f"config file not found: {path}")
    return load_config(path)


def cmd_run(args) -> int:
    config = _load(args.config)
    out = _output_dir(config.output.directory, args.output_dir)
    result = run_simulation(config)
    diag_path = write_diagnostics(result.records, out / "diagnostics.csv")
    ext = "csv" if config.output.snapshot_format == "grid-csv" else "vtk"
    snap_path = write_field_snapshot(result.final_state, out / f"final.{ext}", config.output.snapshot_format)
    last = result.records[-1]
    print(f"t={last.t:.6g} steps={len(result.records) - 1} energy={last.energy_total:.6g} "
          f"slip_integral={last.slip_integral:.6g}")
    print(f"wrote {diag_path} and {snap_path}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    config = _load(args.config)
    try:
        spec = SweepSpec(args.param, tuple(args.values), config)
    except ValueError as exc:
        raise _UsageError(str(exc))
    out = _output_dir(config.output.directory, args.output_dir)
    result = parameter_sweep(spec)
    path = write_sweep_table(result, out / f"sweep_{args.param}.csv")
    for row in result.rows:
        print(f"{args.param}={row['value']:.6g} slip_integral={row['slip_integral']:.6g} "
              f"leakage_P={row['leakage_P']:.6g} energy_final={row['energy_final']:.6g}")
    print(f"fitted slope (slip_integral vs {args.param}): {result.slopes['slip_integral']:.4f}")
    print(f"wrote {path}")
    return EXIT_OK


def cmd_converge(args) -> int:
    try:
        result = convergence_study(args.case, args.resolutions)
    except ValueError as exc:
        raise _UsageError(str(exc))
    for n, err in zip(result.resolutions, result.errors):
        print(f"N={n} error={err:.6e}")
    print("observed orders: " + ", ".join(f"{o:.3f}" for o in result.orders))
    if args.output_dir or os.environ.get(OUTPUT_ENV):
        path = write_convergence_table(result, _output_dir(".", args.output_dir) / f"converge_{args.case}.csv")
        print(f"wrote {path}")
    return EXIT_OK


def cmd_validate(args) -> int:
    config = _load(args.config)
    print(f"{args.config}: ok (N={config.grid.N}, d={config.grid.d}, motion={config.motion})")
    return EXIT_OK


COMMANDS = {"run": cmd_run, "sweep": cmd_sweep, "converge": cmd_converge, "validate": cmd_validate}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    where = getattr(args, "config", args.command)
    try:
        return COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"error: {where}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"error: {where}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
