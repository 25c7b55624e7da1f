"""Parsing of quantity strings such as ``"80 nm"`` or ``"0.035 eV"``.

The configuration layer is the only place where units appear; everything
past it is SI (rad/s for angular frequencies, J for energies).
"""

import re

from .constants import EV, EV_FREQ
from .errors import MissingUnit, ConfigError

_NUMBER = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_QUANTITY = re.compile(rf"^\s*({_NUMBER})\s*([^\s\d].*?)?\s*$")

# kind -> unit -> SI factor
UNITS = {
    "length": {"m": 1.0, "cm": 1e-2, "mm": 1e-3, "um": 1e-6, "µm": 1e-6, "nm": 1e-9, "pm": 1e-12},
    "temperature": {"K": 1.0, "mK": 1e-3},
    "frequency": {"rad/s": 1.0, "eV": EV_FREQ, "meV": 1e-3 * EV_FREQ},
    "frequency2": {"rad^2/s^2": 1.0, "eV^2": EV_FREQ**2},
    "energy": {"J": 1.0, "eV": EV, "meV": 1e-3 * EV},
}

# serialization writes SI so that parse(format(x)) == x bit for bit
CANONICAL = {
    "length": "m",
    "temperature": "K",
    "frequency": "rad/s",
    "frequency2": "rad^2/s^2",
    "energy": "J",
}


def split_quantity(text):
    """Return ``(number, unit)`` from ``"<number> <unit>"``; unit may be None."""
    if isinstance(text, bool):
        raise ConfigError(f"expected a quantity, got {text!r}")
    if isinstance(text, (int, float)):
        return float(text), None
    m = _QUANTITY.match(str(text))
    if not m:
        raise ConfigError(f"cannot parse quantity {text!r}")
    return float(m.group(1)), m.group(2)


def parse_quantity(text, kind, key="value", allow_reduced=False):
    """Convert a quantity string to SI.

    With ``allow_reduced`` (temperatures only) the unit ``Tc`` is accepted and
    ``(value, "Tc")`` is returned unconverted so the caller can resolve it
    against a critical temperature.
    """
    value, unit = split_quantity(text)
    if unit is None:
        raise MissingUnit(f"{key}: {text!r} has no unit (expected one of {sorted(UNITS[kind])})")
    if allow_reduced and unit == "Tc":
        return value, "Tc"
    table = UNITS[kind]
    if unit not in table:
        raise ConfigError(f"{key}: unknown {kind} unit {unit!r} (expected one of {sorted(table)})")
    factor = table[unit]
    if factor < 1 and abs(round(1 / factor) * factor - 1.0) < 1e-12:
        # 300 nm -> 300 / 1e9, the double nearest to 3e-7
        return value / round(1 / factor)
    return value * factor


def format_quantity(value, kind):
    return f"{float(value)!r} {CANONICAL[kind]}"
