"""Run configuration: TOML text with explicit units on every dimensional value.

Sections::

    [run]                       command, prescription, rel_tol, grid, ...
    [geometry]                  R, a, w, s, temperature, rrr
    [materials.<role>]          role in sphere / overlayer / strip / far_plate

A material table either names a ``file`` holding the same keys or sets them
inline.  Temperatures may be given as a fraction of the strip's critical
temperature, e.g. ``"0.9 Tc"``.  Everything is resolved to SI on parsing;
:func:`serialize_config` writes SI back so that parsing its output gives an
equal config.
"""

from dataclasses import dataclass, field, fields, replace
import os
import re

import numpy as np
import tomli
import tomli_w

from .errors import ConfigError, ParseError, UnknownKey
from .materials import (
    DEFAULT_RRR,
    GOLD_GAMMA_ROOM_EV,
    GOLD_PLASMA_EV,
    NIOBIUM_GAMMA_ROOM_EV,
    NIOBIUM_PLASMA_EV,
    NIOBIUM_TC,
    BcsSuperconductor,
    Drude,
    DrudeLorentz,
    Oscillator,
    PerfectConductor,
    Plasma,
    dirty_limit_weight,
    load_oscillators,
    mattis_bardeen_weight,
    saturated_relaxation,
)
from .constants import EV_FREQ
from .pfa import SetupGeometry
from .units import format_quantity, parse_quantity, split_quantity

COMMANDS = (
    "kappa-curve",
    "force-vs-separation",
    "force-vs-temperature",
    "force-vs-thickness",
    "single-point",
    "validate",
)
SWEEP_AXIS = {
    "force-vs-separation": "separation",
    "force-vs-temperature": "temperature",
    "force-vs-thickness": "thickness",
}
PRESCRIPTIONS = ("both", "drude", "plasma")
FORMATS = ("csv", "json")
ROLES = ("sphere", "overlayer", "strip", "far_plate")
MODELS = ("drude-lorentz", "drude", "plasma", "bcs", "perfect")
WEIGHTS = {"mattis-bardeen": mattis_bardeen_weight, "dirty-limit": dirty_limit_weight}

RUN_KEYS = {"command", "prescription", "rel_tol", "grid", "rrr_values", "workers", "overlayer", "out", "format"}
GEOMETRY_KEYS = {"R": "length", "a": "length", "w": "length", "s": "length", "temperature": "temperature", "rrr": None}
MATERIAL_KEYS = {
    "model": None,
    "file": None,
    "plasma_frequency": "frequency",
    "damping": "frequency",
    "damping_room": "frequency",
    "rrr": None,
    "critical_temperature": "temperature",
    "gap_zero": "energy",
    "oscillators": None,
    "weight": None,
}
GRID_KEYS = {"start", "stop", "num", "spacing"}

# axis -> quantity kind of its grid values
GRID_KIND = {
    "separation": "length",
    "temperature": "temperature",
    "thickness": "length",
    "kappa": "temperature",
}
DEFAULT_GRIDS = {
    "separation": ("150 nm", "600 nm", 10, "linear"),
    "temperature": ("0.1 Tc", "0.99 Tc", 20, "linear"),
    "thickness": ("40 nm", "200 nm", 9, "linear"),
    "kappa": ("0.05 Tc", "0.999 Tc", 40, "linear"),
}


@dataclass(frozen=True)
class MaterialSpec:
    """Resolved material parameters in SI; ``damping`` wins over
    ``damping_room / rrr`` when both could apply."""

    model: str
    plasma_frequency: float = None
    damping: float = None
    damping_room: float = None
    rrr: float = None
    critical_temperature: float = None
    gap_zero: float = None
    oscillators: object = "gold"  # "gold" (bundled table) or tuple of Oscillator
    weight: str = "mattis-bardeen"

    def resolved_damping(self, rrr):
        if self.damping is not None:
            return self.damping
        if self.damping_room is None:
            return 0.0
        return saturated_relaxation(self.damping_room, self.rrr if self.rrr is not None else rrr)

    def build(self, rrr=DEFAULT_RRR):
        m = self.model
        if m == "perfect":
            return PerfectConductor()
        if m == "plasma":
            return Plasma(self.plasma_frequency)
        g = self.resolved_damping(rrr)
        if m == "drude":
            return Drude(self.plasma_frequency, g)
        if m == "drude-lorentz":
            osc = load_oscillators() if self.oscillators == "gold" else tuple(self.oscillators or ())
            return DrudeLorentz(self.plasma_frequency, g, osc)
        return BcsSuperconductor(
            self.plasma_frequency, g, self.critical_temperature, self.gap_zero, weight=WEIGHTS[self.weight]
        )


def default_materials():
    gold = MaterialSpec("drude-lorentz", GOLD_PLASMA_EV * EV_FREQ, damping_room=GOLD_GAMMA_ROOM_EV * EV_FREQ)
    nb = MaterialSpec(
        "bcs",
        NIOBIUM_PLASMA_EV * EV_FREQ,
        damping_room=NIOBIUM_GAMMA_ROOM_EV * EV_FREQ,
        critical_temperature=NIOBIUM_TC,
        oscillators=None,
    )
    return {"sphere": nb, "overlayer": gold, "strip": nb, "far_plate": gold}


@dataclass(frozen=True)
class RunConfig:
    command: str
    R: float = 150e-6
    a: float = 300e-9
    w: float = 80e-9
    s: float = 100e-6
    temperature: float = None  # K; defaults to 0.8 Tc of the strip
    rrr: float = DEFAULT_RRR
    materials: dict = field(default_factory=default_materials)
    prescription: str = "both"
    rel_tol: float = 1e-6
    grid: tuple = None  # SI values along the command's axis
    rrr_values: tuple = (2.0, 5.0, 20.0)
    workers: int = 1
    overlayer: str = "immaterial"
    out: str = None
    format: str = "csv"

    @property
    def axis(self):
        if self.command == "kappa-curve":
            return "kappa"
        return SWEEP_AXIS.get(self.command)

    @property
    def critical_temperature(self):
        tc = self.materials["strip"].critical_temperature
        return tc if tc is not None else NIOBIUM_TC

    def build_materials(self, rrr=None):
        rrr = self.rrr if rrr is None else rrr
        return {role: spec.build(rrr) for role, spec in self.materials.items()}

    def setup(self, rrr=None):
        m = self.build_materials(rrr)
        return SetupGeometry(
            self.R, self.a, self.w, self.s, self.temperature,
            m["sphere"], m["overlayer"], m["strip"], m["far_plate"],
            self.rrr if rrr is None else rrr,
        )


# --------------------------------------------------------------------------
# parsing


def _line_of(text, key):
    """1-based line where ``key = ...`` first appears, if any."""
    pat = re.compile(rf"^\s*{re.escape(key)}\s*=", re.M)
    m = pat.search(text or "")
    if not m:
        return None, None
    line = text.count("\n", 0, m.start()) + 1
    col = m.start() - (text.rfind("\n", 0, m.start()) + 1) + 1
    return line, col


def _check_keys(table, allowed, where, text):
    for key in table:
        if key not in allowed:
            line, col = _line_of(text, key)
            loc = f" (line {line}, column {col})" if line else ""
            raise UnknownKey(f"unknown key {key!r} in {where}{loc}; allowed: {sorted(allowed)}")


def _number(value, key, positive=True):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key} must be a number, got {value!r}")
    if positive and not value > 0:
        raise ConfigError(f"{key} must be > 0, got {value!r}")
    return float(value)


def _dimensionless(value, key):
    """Dimensionless numbers may be bare or carry the unit ``1``."""
    if isinstance(value, str):
        v, unit = split_quantity(value)
        if unit not in (None, "1"):
            raise ConfigError(f"{key} is dimensionless, got unit {unit!r}")
        value = v
    return _number(value, key)


def _temperature(value, key, tc):
    v = parse_quantity(value, "temperature", key, allow_reduced=True)
    if isinstance(v, tuple):
        return v[0] * tc
    return v


def _parse_material(table, role, text, base_dir):
    if not isinstance(table, dict):
        raise ConfigError(f"materials.{role} must be a table")
    _check_keys(table, MATERIAL_KEYS, f"[materials.{role}]", text)
    table = dict(table)
    if "file" in table:
        path = table.pop("file")
        if base_dir and not os.path.isabs(path):
            path = os.path.join(base_dir, path)
        try:
            with open(path, encoding="utf-8") as fh:
                ftext = fh.read()
        except OSError as exc:
            raise ConfigError(f"materials.{role}: cannot read {path}: {exc.strerror}") from exc
        try:
            fdata = tomli.loads(ftext)
        except tomli.TOMLDecodeError as exc:
            raise _parse_error(exc, f"{path}: ") from exc
        _check_keys(fdata, set(MATERIAL_KEYS) - {"file"}, path, ftext)
        table = {**fdata, **table}
    model = table.get("model")
    if model not in MODELS:
        raise ConfigError(f"materials.{role}.model must be one of {list(MODELS)}, got {model!r}")
    kw = {"model": model}
    for key, kind in MATERIAL_KEYS.items():
        if key in ("model", "file", "oscillators", "weight", "rrr") or key not in table:
            continue
        kw[key] = parse_quantity(table[key], kind, f"materials.{role}.{key}")
    if "rrr" in table:
        kw["rrr"] = _dimensionless(table["rrr"], f"materials.{role}.rrr")
    if "weight" in table:
        if table["weight"] not in WEIGHTS:
            raise ConfigError(f"materials.{role}.weight must be one of {sorted(WEIGHTS)}")
        kw["weight"] = table["weight"]
    osc = table.get("oscillators", "gold" if model == "drude-lorentz" else None)
    if isinstance(osc, list):
        items = []
        for i, o in enumerate(osc):
            where = f"materials.{role}.oscillators[{i}]"
            _check_keys(o, {"strength", "frequency", "damping"}, where, text)
            items.append(Oscillator(
                parse_quantity(o["strength"], "frequency2", where + ".strength"),
                parse_quantity(o["frequency"], "frequency", where + ".frequency"),
                parse_quantity(o.get("damping", "0 rad/s"), "frequency", where + ".damping"),
            ))
        osc = tuple(items)
    elif osc not in ("gold", None):
        raise ConfigError(f"materials.{role}.oscillators must be \"gold\" or a list of tables")
    kw["oscillators"] = osc
    if model != "perfect" and "plasma_frequency" not in kw:
        raise ConfigError(f"materials.{role} needs plasma_frequency")
    if model == "bcs" and "critical_temperature" not in kw:
        raise ConfigError(f"materials.{role} needs critical_temperature")
    return MaterialSpec(**kw)


def _parse_grid(value, axis, tc):
    kind = GRID_KIND[axis]

    def conv(v, key):
        if kind == "temperature":
            return _temperature(v, key, tc)
        return parse_quantity(v, kind, key)

    if isinstance(value, list):
        return tuple(conv(v, f"run.grid[{i}]") for i, v in enumerate(value))
    if isinstance(value, dict):
        _check_keys(value, GRID_KEYS, "run.grid", None)
        for k in ("start", "stop", "num"):
            if k not in value:
                raise ConfigError(f"run.grid needs {k!r}")
        return _grid_points(conv(value["start"], "run.grid.start"), conv(value["stop"], "run.grid.stop"),
                            value["num"], value.get("spacing", "linear"))
    raise ConfigError("run.grid must be a list of quantities or a {start, stop, num} table")


def _grid_points(start, stop, num, spacing):
    if isinstance(num, bool) or not isinstance(num, int) or num < 0:
        raise ConfigError(f"run.grid.num must be a non-negative integer, got {num!r}")
    if spacing == "linear":
        pts = np.linspace(start, stop, num)
    elif spacing == "log":
        pts = np.geomspace(start, stop, num)
    else:
        raise ConfigError(f"run.grid.spacing must be 'linear' or 'log', got {spacing!r}")
    return tuple(float(x) for x in pts)


def _parse_error(exc, prefix=""):
    msg = str(exc)
    m = re.search(r"\(at line (\d+), column (\d+)\)", msg)
    if m:
        return ParseError(prefix + msg[: m.start()].strip(), int(m.group(1)), int(m.group(2)))
    return ParseError(prefix + msg)


def parse_config(text, command=None, base_dir=None):
    """Parse TOML ``text`` into a :class:`RunConfig`.

    ``command`` (from the command line) overrides ``run.command``; one of the
    two must be present.
    """
    try:
        data = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise _parse_error(exc) from exc
    _check_keys(data, {"run", "geometry", "materials"}, "top level", text)
    run = data.get("run", {})
    geo = data.get("geometry", {})
    mats = data.get("materials", {})
    _check_keys(run, RUN_KEYS, "[run]", text)
    _check_keys(geo, GEOMETRY_KEYS, "[geometry]", text)
    _check_keys(mats, ROLES, "[materials]", text)

    cmd = command or run.get("command")
    if not cmd:
        pos = text.find("[run]")
        line, col = (text.count("\n", 0, pos) + 1, 1) if pos >= 0 else (None, None)
        raise ParseError("no command given (set run.command or pass one on the command line)", line, col)
    if cmd not in COMMANDS:
        raise ConfigError(f"unknown command {cmd!r}; expected one of {list(COMMANDS)}")

    materials = default_materials()
    for role, table in mats.items():
        materials[role] = _parse_material(table, role, text, base_dir)
    cfg = RunConfig(command=cmd, materials=materials)
    tc = cfg.critical_temperature

    kw = {}
    for key in ("R", "a", "w", "s"):
        if key in geo:
            kw[key] = parse_quantity(geo[key], "length", f"geometry.{key}")
    kw["temperature"] = _temperature(geo["temperature"], "geometry.temperature", tc) if "temperature" in geo else 0.8 * tc
    if "rrr" in geo:
        kw["rrr"] = _dimensionless(geo["rrr"], "geometry.rrr")

    if "prescription" in run:
        if run["prescription"] not in PRESCRIPTIONS:
            raise ConfigError(f"run.prescription must be one of {list(PRESCRIPTIONS)}")
        kw["prescription"] = run["prescription"]
    if "rel_tol" in run:
        kw["rel_tol"] = _number(run["rel_tol"], "run.rel_tol")
    if "workers" in run:
        if isinstance(run["workers"], bool) or not isinstance(run["workers"], int) or run["workers"] < 1:
            raise ConfigError("run.workers must be a positive integer")
        kw["workers"] = run["workers"]
    if "overlayer" in run:
        if run["overlayer"] not in ("immaterial", "propagate"):
            raise ConfigError("run.overlayer must be 'immaterial' or 'propagate'")
        kw["overlayer"] = run["overlayer"]
    if "rrr_values" in run:
        kw["rrr_values"] = tuple(_dimensionless(v, "run.rrr_values") for v in run["rrr_values"])
    if "out" in run:
        kw["out"] = str(run["out"])
    if "format" in run:
        if run["format"] not in FORMATS:
            raise ConfigError(f"run.format must be one of {list(FORMATS)}")
        kw["format"] = run["format"]
    cfg = replace(cfg, **kw)

    axis = cfg.axis
    # a grid is ignored by commands without an axis, so e.g. a sweep preset
    # can be validated as is
    if axis is not None and "grid" in run:
        grid = _parse_grid(run["grid"], axis, tc)
    elif axis is not None:
        start, stop, num, spacing = DEFAULT_GRIDS[axis]
        grid = _grid_points(_temp_or(start, axis, tc), _temp_or(stop, axis, tc), num, spacing)
    else:
        grid = None
    return replace(cfg, grid=grid)


def _temp_or(value, axis, tc):
    kind = GRID_KIND[axis]
    return _temperature(value, "grid", tc) if kind == "temperature" else parse_quantity(value, kind)


def load_config(path, command=None):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_config(text, command, base_dir=os.path.dirname(os.path.abspath(path)))


# --------------------------------------------------------------------------
# serialization


def _material_table(spec):
    out = {"model": spec.model}
    for f in fields(spec):
        v = getattr(spec, f.name)
        kind = MATERIAL_KEYS.get(f.name)
        if f.name in ("model", "oscillators", "weight") or v is None:
            continue
        out[f.name] = format_quantity(v, kind) if kind else v
    if spec.model == "bcs":
        out["weight"] = spec.weight
    if spec.oscillators == "gold":
        out["oscillators"] = "gold"
    elif spec.oscillators is not None:
        out["oscillators"] = [
            {
                "strength": format_quantity(o.strength, "frequency2"),
                "frequency": format_quantity(o.frequency, "frequency"),
                "damping": format_quantity(o.damping, "frequency"),
            }
            for o in spec.oscillators
        ]
    return out


def serialize_config(cfg):
    """TOML text that :func:`parse_config` turns back into ``cfg``."""
    run = {
        "command": cfg.command,
        "prescription": cfg.prescription,
        "rel_tol": cfg.rel_tol,
        "rrr_values": list(cfg.rrr_values),
        "workers": cfg.workers,
        "overlayer": cfg.overlayer,
        "format": cfg.format,
    }
    if cfg.out is not None:
        run["out"] = cfg.out
    if cfg.grid is not None:
        run["grid"] = [format_quantity(x, GRID_KIND[cfg.axis]) for x in cfg.grid]
    geo = {k: format_quantity(getattr(cfg, k), "length") for k in ("R", "a", "w", "s")}
    geo["temperature"] = format_quantity(cfg.temperature, "temperature")
    geo["rrr"] = cfg.rrr
    mats = {role: _material_table(spec) for role, spec in cfg.materials.items()}
    return tomli_w.dumps({"run": run, "geometry": geo, "materials": mats})
