"""Command-line driver with deterministic, seeded, file-based outputs.

Every experiment gets a subcommand whose flags mirror its parameter
schema.  A JSON config file may override flags, and the environment
variable LIOUVILLE_LAB_OUT overrides the output directory.  Identical
resolved configuration and seed produce byte-identical data files;
floats are written with 17 significant digits so values round-trip
exactly.  Exit status: 0 success, 1 configuration error, 2 numerical
failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .errors import InputError, NumericalError
from .experiments import EXPERIMENTS, Table

ENV_OUT_DIR = "LIOUVILLE_LAB_OUT"
CONFIG_KEYS = {"experiment", "parameters", "seed", "out_dir", "format"}


class _Parser(argparse.ArgumentParser):
    """Argument parser whose usage errors map to exit code 1."""

    def error(self, message):
        raise InputError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="liouville-lab",
        description="Numerical laboratory for measure-preserving dynamics.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="experiment", metavar="EXPERIMENT")
    for exp in EXPERIMENTS.values():
        p = sub.add_parser(exp.name, help=exp.description, description=exp.description)
        for param in exp.params:
            flag = "--" + param.name.replace("_", "-")
            kwargs = {
                "dest": param.name,
                "type": param.kind,
                "default": param.default,
                "help": f"{param.help} (default: {param.default})",
            }
            if param.choices:
                kwargs["choices"] = list(param.choices)
            p.add_argument(flag, **kwargs)
        p.add_argument("--seed", type=int, default=42, help="PRNG seed (default: 42)")
        p.add_argument("--out-dir", dest="out_dir", default="out", help="output directory")
        p.add_argument(
            "--format",
            dest="format",
            choices=["csv", "json"],
            default="csv",
            help="data file format (default: csv)",
        )
        p.add_argument("--config", default=None, help="JSON file overriding the flags")
    return parser


def _load_config(path: str, exp_name: str, params) -> dict:
    """Parse a config file and reject keys outside the experiment schema."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read config file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"config file is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise InputError("config file must hold a JSON object")
    unknown = set(raw) - CONFIG_KEYS
    if unknown:
        raise InputError(f"unknown config keys: {sorted(unknown)}")
    if "experiment" in raw and raw["experiment"] != exp_name:
        raise InputError(
            f"config is for experiment {raw['experiment']!r}, command line chose {exp_name!r}"
        )
    schema = {p.name: p for p in params}
    overrides = raw.get("parameters", {})
    if not isinstance(overrides, dict):
        raise InputError("config 'parameters' must be an object")
    unknown = set(overrides) - set(schema)
    if unknown:
        raise InputError(f"unknown parameter keys: {sorted(unknown)}")
    for name, value in overrides.items():
        param = schema[name]
        if value is None and param.default is None:
            continue
        if param.kind is float and isinstance(value, (int, float)) and not isinstance(value, bool):
            overrides[name] = float(value)
        elif param.kind is int and isinstance(value, int) and not isinstance(value, bool):
            overrides[name] = int(value)
        elif param.kind is str and isinstance(value, str):
            pass
        else:
            raise InputError(f"parameter {name!r} must be of type {param.kind.__name__}")
        if param.choices and overrides[name] not in param.choices:
            raise InputError(f"parameter {name!r} must be one of {param.choices}")
    return raw


def _format_value(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        raise InputError("boolean columns are not part of any schema")
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _write_csv(path: Path, table: Table) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(table.columns) + "\n")
        for row in table.rows:
            fh.write(",".join(_format_value(x) for x in row) + "\n")


def _json_value(x):
    if isinstance(x, (int, np.integer)):
        return int(x)
    return float(x)


def _write_json(path: Path, table: Table) -> None:
    records = [
        {col: _json_value(x) for col, x in zip(table.columns, row)} for row in table.rows
    ]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(records, fh, indent=1)
        fh.write("\n")


def run(experiment: str, cfg: dict, seed: int, out_dir: str, fmt: str) -> int:
    """Execute one experiment and write its tables plus a manifest."""
    exp = EXPERIMENTS[experiment]
    rng = np.random.default_rng(np.random.SeedSequence((seed, exp.index)))
    started = time.perf_counter()
    result = exp.runner(cfg, rng)
    elapsed = time.perf_counter() - started

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    suffix = ".csv" if fmt == "csv" else ".json"
    written = []
    for stem, table in result.tables.items():
        path = out / (stem + suffix)
        if fmt == "csv":
            _write_csv(path, table)
        else:
            _write_json(path, table)
        written.append(path.name)
        print(f"wrote {path}")

    manifest = {
        "experiment": experiment,
        "parameters": cfg,
        "seed": seed,
        "out_dir": str(out),
        "format": fmt,
        "version": __version__,
        "wall_clock_seconds": elapsed,
        "files": written,
        "summary": result.summary,
    }
    with open(out / "manifest.json", "w", encoding="utf-8", newline="") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    print(f"wrote {out / 'manifest.json'}")
    for key, value in result.summary.items():
        print(f"{key} = {value}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.experiment is None:
            raise InputError("an experiment subcommand is required")
        exp = EXPERIMENTS[args.experiment]
        cfg = {p.name: getattr(args, p.name) for p in exp.params}
        seed, out_dir, fmt = args.seed, args.out_dir, args.format
        if args.config:
            raw = _load_config(args.config, args.experiment, exp.params)
            cfg.update(raw.get("parameters", {}))
            seed = raw.get("seed", seed)
            out_dir = raw.get("out_dir", out_dir)
            fmt = raw.get("format", fmt)
        if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0 or seed >= 2**64:
            raise InputError("seed must be an unsigned 64-bit integer")
        if fmt not in ("csv", "json"):
            raise InputError("format must be csv or json")
        out_dir = os.environ.get(ENV_OUT_DIR, out_dir)
        return run(args.experiment, cfg, seed, out_dir, fmt)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
