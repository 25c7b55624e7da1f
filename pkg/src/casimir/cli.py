"""Command-line front end::

    casimir <command> --config <path> [--out <path>] [--format csv|json]
            [--prescription both|drude|plasma] [--rel-tol <x>]

``--config`` also accepts the name of a bundled preset (fig2, fig3, fig4).
Exit codes: 0 success, 1 geometry check failed (validate), 2 configuration
or input error, 3 numerical failure, 4 I/O error.
"""

import argparse
from dataclasses import replace
from datetime import datetime, timezone
from importlib import resources
import os
import sys

import numpy as np

from . import __version__
from .config import COMMANDS, FORMATS, PRESCRIPTIONS, load_config, parse_config, serialize_config
from .errors import ConfigError, InvalidInput, NumericalError
from .materials import kappa
from .output import DataTable
from .pfa import FAIL, delta_force, sweep, validate_geometry

EXIT_OK, EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_IO = 0, 1, 2, 3, 4

#: forces are written in units of 1e-15 N
FORCE_SCALE = 1e15
FORCE_UNIT = "1e-15 N"

PRESETS = ("fig2", "fig3", "fig4")


def preset_text(name):
    return resources.files("casimir.presets").joinpath(f"{name}.toml").read_text(encoding="utf-8")


def _load(source, command):
    if source is None:
        return parse_config("", command)
    if not os.path.exists(source) and source in PRESETS:
        return parse_config(preset_text(source), command)
    return load_config(source, command)


def _scale_forces(table):
    rows = table.as_array()
    units = list(table.units)
    for i, u in enumerate(units):
        if u == "N":
            rows[:, i] *= FORCE_SCALE
            units[i] = FORCE_UNIT
    return DataTable(table.columns, units, rows.tolist(), table.metadata)


def kappa_curve(cfg):
    tc = cfg.critical_temperature
    columns, units = ["T/Tc", "T"], ["1", "K"]
    curves = []
    for rrr in cfg.rrr_values:
        model = cfg.materials["strip"].build(rrr)
        curves.append([kappa(model, T) for T in cfg.grid])
        columns.append(f"kappa_rrr{rrr:g}")
        units.append("1")
    rows = [[T / tc, T, *(c[i] for c in curves)] for i, T in enumerate(cfg.grid)]
    return DataTable(columns, units, rows)


def single_point(cfg):
    presc = ["drude", "plasma"] if cfg.prescription == "both" else [cfg.prescription]
    setup = cfg.setup()
    columns, units, row = ["a", "T", "w"], ["m", "K", "m"], [cfg.a, cfg.temperature, cfg.w]
    l_max, warnings = 0, []
    for p in presc:
        d = delta_force(setup, p, cfg.rel_tol, overlayer=cfg.overlayer)
        columns += [f"dF_{p}", f"dF_{p}_te0", f"dF_{p}_rest", f"dF_{p}_err"]
        units += ["N"] * 4
        row += [d.delta_f, d.te0_part, d.rest_part, d.error_estimate]
        l_max = max(l_max, d.l_max)
        warnings = [w.check for w in d.warnings]
    return DataTable(columns, units, [row], {"max_l": l_max, "warnings": warnings})


def run(cfg):
    """Execute ``cfg`` and return its :class:`DataTable` (forces in 1e-15 N)."""
    if cfg.command == "kappa-curve":
        table = kappa_curve(cfg)
    elif cfg.command == "single-point":
        table = _scale_forces(single_point(cfg))
    elif cfg.command == "validate":
        checks = validate_geometry(cfg.setup())
        table = DataTable(
            ["value", "threshold", "margin", "passed"],
            ["1", "1", "1", "1"],
            [[c.value, c.threshold, c.margin, float(c.status != FAIL)] for c in checks],
            {"checks": [c.check for c in checks], "status": [c.status for c in checks]},
        )
    else:
        grid = cfg.grid
        t = sweep(cfg.setup(), cfg.prescription, cfg.axis, grid, cfg.rel_tol,
                  workers=cfg.workers, overlayer=cfg.overlayer)
        table = _scale_forces(t)
    meta = {
        "command": cfg.command,
        "engine_version": __version__,
        "config": serialize_config(cfg),
        "numpy_version": np.__version__,
    }
    meta.update(table.metadata)
    meta["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    table.metadata = meta
    return table


def build_parser():
    p = argparse.ArgumentParser(prog="casimir", description="Casimir forces between Nb and Au layered plates.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="config file or preset name (fig2, fig3, fig4)")
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=FORMATS)
    p.add_argument("--prescription", choices=PRESCRIPTIONS)
    p.add_argument("--rel-tol", type=float, dest="rel_tol")
    p.add_argument("--workers", type=int)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = _load(args.config, args.command)
        over = {k: getattr(args, k) for k in ("out", "format", "prescription", "rel_tol", "workers")}
        over = {k: v for k, v in over.items() if v is not None}
        if "rel_tol" in over and not 0 < over["rel_tol"] <= 1e-3:
            raise ConfigError(f"--rel-tol must be in (0, 1e-3], got {over['rel_tol']}")
        cfg = replace(cfg, **over)
    except OSError as exc:
        print(f"casimir: cannot read config {exc.filename}: {exc.strerror}", file=sys.stderr)
        return EXIT_IO
    except ConfigError as exc:
        print(f"casimir: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        table = run(cfg)
    except InvalidInput as exc:
        print(f"casimir: invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"casimir: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    text = table.to_json() if cfg.format == "json" else table.to_csv()
    if cfg.out:
        try:
            with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"casimir: cannot write {cfg.out}: {exc.strerror}", file=sys.stderr)
            return EXIT_IO
    else:
        sys.stdout.write(text)

    if cfg.command == "validate":
        status = table.metadata["status"]
        for name, st in zip(table.metadata["checks"], status):
            print(f"{name}: {st}", file=sys.stderr)
        return EXIT_CHECK_FAILED if FAIL in status else EXIT_OK
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
