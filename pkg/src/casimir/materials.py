"""Dielectric response on the imaginary frequency axis.

All models are immutable dataclasses exposing ``epsilon(xi, T)``, which is
vectorized over ``xi`` (rad/s), and ``static_weight(T)``, the coefficient
``lim_{xi->0} xi**2 * (eps(i xi) - 1)`` that controls how a medium screens
static magnetic fields.  The zero-frequency limit itself is never evaluated
numerically here; see :mod:`casimir.reflection`.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
import math
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad
import tomli

from .constants import EV_FREQ, HBAR, K_B
from .errors import (
    ExtrapolationNotConverged,
    InvalidModelParameters,
    InvalidRRR,
    NonPositiveFrequency,
    NonPositiveTemperature,
    TemperatureAboveCritical,
)
from .units import parse_quantity

#: weak-coupling ratio Delta(0) / (k_B T_c)
BCS_RATIO = 1.764


def _check_positive(name, value, strict=True):
    if not np.isfinite(value) or (value <= 0 if strict else value < 0):
        raise InvalidModelParameters(f"{name} must be {'>' if strict else '>='} 0, got {value!r}")


@dataclass(frozen=True)
class Oscillator:
    """One Lorentz term ``g / (xi**2 + omega**2 + gamma * xi)``."""

    strength: float  # rad^2/s^2
    frequency: float  # rad/s
    damping: float = 0.0  # rad/s

    def __post_init__(self):
        _check_positive("oscillator strength", self.strength, strict=False)
        _check_positive("oscillator frequency", self.frequency)
        _check_positive("oscillator damping", self.damping, strict=False)


class PermittivityModel:
    """Base class; subclasses are frozen dataclasses."""

    kind = "abstract"
    conductor = True

    def epsilon(self, xi, T=None):
        raise NotImplementedError

    def static_weight(self, T=None):
        """``lim xi**2 (eps - 1)`` as xi -> 0, in rad^2/s^2."""
        raise NotImplementedError


@dataclass(frozen=True)
class Vacuum(PermittivityModel):
    kind = "vacuum"
    conductor = False

    def epsilon(self, xi, T=None):
        return np.ones_like(np.asarray(xi, dtype=float))

    def static_weight(self, T=None):
        return 0.0


@dataclass(frozen=True)
class PerfectConductor(PermittivityModel):
    """Ideal mirror, eps = infinity at every frequency."""

    kind = "perfect"

    def epsilon(self, xi, T=None):
        return np.full_like(np.asarray(xi, dtype=float), np.inf)

    def static_weight(self, T=None):
        return math.inf


@dataclass(frozen=True)
class Plasma(PermittivityModel):
    plasma_frequency: float

    kind = "plasma"

    def __post_init__(self):
        _check_positive("plasma_frequency", self.plasma_frequency)

    def epsilon(self, xi, T=None):
        xi = np.asarray(xi, dtype=float)
        return 1.0 + self.plasma_frequency**2 / xi**2

    def static_weight(self, T=None):
        return self.plasma_frequency**2


@dataclass(frozen=True)
class Drude(PermittivityModel):
    plasma_frequency: float
    damping: float

    kind = "drude"

    def __post_init__(self):
        _check_positive("plasma_frequency", self.plasma_frequency)
        _check_positive("damping", self.damping, strict=False)

    def epsilon(self, xi, T=None):
        xi = np.asarray(xi, dtype=float)
        return 1.0 + self.plasma_frequency**2 / (xi * (xi + self.damping))

    def static_weight(self, T=None):
        # a dissipationless "Drude" metal is a plasma
        return self.plasma_frequency**2 if self.damping == 0 else 0.0


@dataclass(frozen=True)
class DrudeLorentz(PermittivityModel):
    """Drude conduction term plus Lorentz oscillators for bound electrons."""

    plasma_frequency: float
    damping: float
    oscillators: tuple = ()

    kind = "drude-lorentz"

    def __post_init__(self):
        _check_positive("plasma_frequency", self.plasma_frequency)
        _check_positive("damping", self.damping, strict=False)
        object.__setattr__(self, "oscillators", tuple(self.oscillators))

    def epsilon(self, xi, T=None):
        xi = np.asarray(xi, dtype=float)
        eps = 1.0 + self.plasma_frequency**2 / (xi * (xi + self.damping))
        for osc in self.oscillators:
            eps = eps + osc.strength / (xi**2 + osc.frequency**2 + osc.damping * xi)
        return eps

    def static_weight(self, T=None):
        return self.plasma_frequency**2 if self.damping == 0 else 0.0


def bcs_gap(T, critical_temperature, gap_zero=None):
    """BCS gap Delta(T) in joules from the interpolation
    ``Delta0 * tanh(1.74 * sqrt(Tc/T - 1))``.

    ``gap_zero`` defaults to the weak-coupling value ``1.764 k_B Tc``.
    """
    if not critical_temperature > 0:
        raise InvalidModelParameters(f"critical temperature must be > 0, got {critical_temperature!r}")
    if gap_zero is None:
        gap_zero = BCS_RATIO * K_B * critical_temperature
    if T < 0:
        raise NonPositiveTemperature(f"temperature must be >= 0, got {T!r}")
    if T > critical_temperature:
        raise TemperatureAboveCritical(f"T = {T} K is above Tc = {critical_temperature} K")
    if T == 0:
        return float(gap_zero)
    return float(gap_zero * math.tanh(1.74 * math.sqrt(critical_temperature / T - 1.0)))


def mattis_bardeen_weight(gap, kT, hgamma):
    """Superfluid weight of a local BCS superconductor with elastic
    impurity scattering (all arguments are energies in J).

    Sums ``pi kT sum_n Delta^2 / ((w_n^2 + Delta^2)(sqrt(w_n^2 + Delta^2) + hgamma/2))``
    over fermionic Matsubara energies ``w_n``.  Goes to 1 in the clean limit
    at T = 0 and to ``pi Delta tanh(Delta / 2kT) / hgamma`` in the dirty limit.
    """
    if gap <= 0:
        return 0.0
    eta = hgamma / (2.0 * gap)

    def f(u):
        s = np.sqrt(u * u + 1.0)
        return 1.0 / ((u * u + 1.0) * (s + eta))

    if kT <= 0:
        return quad(f, 0.0, np.inf, epsabs=0.0, epsrel=1e-13, limit=200)[0]
    t = kT / gap
    h = 2.0 * math.pi * t
    cutoff = 200.0 * max(1.0, eta, h)
    n = min(int(math.ceil(cutoff / h)), 2_000_000)
    u = math.pi * t * (2.0 * np.arange(n) + 1.0)
    head = h * math.fsum(f(u))
    # the remaining sum is a midpoint rule for the integral over [U, inf),
    # mapped onto (0, 1] with u = U / v
    U = h * n
    tail = quad(lambda v: f(U / v) * U / (v * v) if v > 0 else 0.0, 0.0, 1.0,
                epsabs=0.0, epsrel=1e-12, limit=200)[0]
    return head + tail


def dirty_limit_weight(gap, kT, hgamma):
    """``min(1, pi Delta tanh(Delta/2kT) / hgamma)``, kept inside (0, 1)."""
    if gap <= 0:
        return 0.0
    th = 1.0 if kT <= 0 else math.tanh(gap / (2.0 * kT))
    w = math.pi * gap * th / hgamma if hgamma > 0 else 1.0
    return min(w, 1.0 - 1e-12)


@dataclass(frozen=True)
class BcsSuperconductor(PermittivityModel):
    """Two-fluid form of a BCS superconductor on the imaginary axis::

        eps(i xi) = 1 + kappa wp^2 / xi^2 + (1 - kappa) wp^2 / (xi (xi + gamma))

    ``kappa(T)`` is the superfluid weight; the default is
    :func:`mattis_bardeen_weight`, any callable ``(gap, kT, hgamma) -> float``
    can be plugged in instead.
    """

    plasma_frequency: float
    damping: float
    critical_temperature: float
    gap_zero: Optional[float] = None
    weight: Callable = field(default=mattis_bardeen_weight, compare=False)

    kind = "bcs"

    def __post_init__(self):
        _check_positive("plasma_frequency", self.plasma_frequency)
        _check_positive("damping", self.damping, strict=False)
        _check_positive("critical_temperature", self.critical_temperature)
        if self.gap_zero is None:
            object.__setattr__(self, "gap_zero", BCS_RATIO * K_B * self.critical_temperature)
        _check_positive("gap_zero", self.gap_zero)

    def _require_superconducting(self, T):
        if T is None:
            raise InvalidModelParameters("superconductor permittivity needs a temperature")
        if T <= 0:
            raise NonPositiveTemperature(f"temperature must be > 0, got {T!r}")
        if T >= self.critical_temperature:
            raise TemperatureAboveCritical(
                f"T = {T} K is not below Tc = {self.critical_temperature} K"
            )

    def gap(self, T):
        return bcs_gap(T, self.critical_temperature, self.gap_zero)

    def superfluid_weight(self, T):
        self._require_superconducting(T)
        return _cached_weight(self.weight, self.gap(T), K_B * T, HBAR * self.damping)

    def epsilon(self, xi, T=None):
        kappa = self.superfluid_weight(T)
        xi = np.asarray(xi, dtype=float)
        wp2 = self.plasma_frequency**2
        return 1.0 + kappa * wp2 / xi**2 + (1.0 - kappa) * wp2 / (xi * (xi + self.damping))

    def static_weight(self, T=None):
        if self.damping == 0:
            return self.plasma_frequency**2
        return self.superfluid_weight(T) * self.plasma_frequency**2

    def normal_state(self):
        """The Drude metal this superconductor turns into above Tc."""
        return Drude(self.plasma_frequency, self.damping)


@lru_cache(maxsize=4096)
def _cached_weight(fn, gap, kT, hgamma):
    return float(fn(gap, kT, hgamma))


def permittivity(model, xi, T=None):
    """Evaluate ``eps(i xi)`` for ``xi > 0`` (scalar or array)."""
    xi_arr = np.asarray(xi, dtype=float)
    if np.any(~(xi_arr > 0)):
        raise NonPositiveFrequency("permittivity is only evaluated at xi > 0; xi = 0 is a reflection-level limit")
    if T is not None and T <= 0:
        raise NonPositiveTemperature(f"temperature must be > 0, got {T!r}")
    eps = model.epsilon(xi_arr, T)
    return float(eps) if np.ndim(eps) == 0 else eps


def kappa(model, T, start=None, levels=14, tol=1e-6):
    """Extract ``lim xi^2 (eps(i xi) - 1) / wp^2`` from the permittivity.

    Evaluates the scaled permittivity on ``xi_k = start / 2**k`` and runs
    Richardson (Neville) extrapolation to ``xi = 0``.  Raises
    :class:`ExtrapolationNotConverged` if the last two diagonal extrapolants
    still differ by more than ``tol`` relative.
    """
    if not isinstance(model, BcsSuperconductor):
        raise InvalidModelParameters("kappa is defined for BcsSuperconductor models")
    model._require_superconducting(T)
    wp = model.plasma_frequency
    if start is None:
        scale = min(wp, model.damping) if model.damping > 0 else wp
        start = 1e-2 * scale

    def scaled(xi):
        return xi * xi * (float(model.epsilon(xi, T)) - 1.0) / wp**2

    table = [[scaled(start)]]
    best, diff = table[0][0], math.inf
    for k in range(1, levels):
        row = [scaled(start / 2**k)]
        for j in range(1, k + 1):
            row.append(row[j - 1] + (row[j - 1] - table[k - 1][j - 1]) / (2**j - 1))
        table.append(row)
        diff = abs(row[k] - table[k - 1][k - 1])
        best = row[k]
        if diff <= 1e-13 * abs(best):
            break
    if not diff <= tol * abs(best):
        raise ExtrapolationNotConverged(f"kappa extrapolation stalled (relative change {diff / abs(best):.2e})")
    return best


@dataclass(frozen=True)
class MaterialConstants:
    gamma_room: float
    rrr: float = 1.0

    def __post_init__(self):
        saturated_relaxation(self.gamma_room, self.rrr)  # validates

    @property
    def gamma_saturated(self):
        return saturated_relaxation(self.gamma_room, self.rrr)


def saturated_relaxation(gamma_room, rrr):
    """Low-temperature relaxation rate ``gamma_room / RRR``."""
    if not rrr >= 1:
        raise InvalidRRR(f"RRR must be >= 1, got {rrr!r}")
    if not gamma_room > 0:
        raise InvalidModelParameters(f"room-temperature damping must be > 0, got {gamma_room!r}")
    return gamma_room / rrr


def load_oscillators(path=None):
    """Read an oscillator table (TOML ``[[oscillators]]`` with unit strings).

    Without ``path`` the bundled gold table is returned.
    """
    if path is None:
        text = resources.files("casimir.data").joinpath("gold_oscillators.toml").read_text()
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    data = tomli.loads(text)
    return tuple(
        Oscillator(
            parse_quantity(o["strength"], "frequency2", "strength"),
            parse_quantity(o["frequency"], "frequency", "frequency"),
            parse_quantity(o.get("damping", "0 rad/s"), "frequency", "damping"),
        )
        for o in data["oscillators"]
    )


# Defaults for the Nb / Au setup.  Frequencies are hbar*omega in eV.
GOLD_PLASMA_EV = 9.0
GOLD_GAMMA_ROOM_EV = 0.035
NIOBIUM_PLASMA_EV = 9.3
# from the room-temperature resistivity of Nb, 15.2 micro-ohm cm, with the
# plasma frequency above: gamma = eps0 * wp^2 * rho
NIOBIUM_GAMMA_ROOM_EV = 0.177
NIOBIUM_TC = 9.25
DEFAULT_RRR = 5.0


def gold(rrr=DEFAULT_RRR, oscillators=None):
    """Six-oscillator gold with the damping saturated at ``gamma_room / rrr``."""
    osc = load_oscillators() if oscillators is None else oscillators
    return DrudeLorentz(
        GOLD_PLASMA_EV * EV_FREQ,
        saturated_relaxation(GOLD_GAMMA_ROOM_EV * EV_FREQ, rrr),
        osc,
    )


def niobium(rrr=DEFAULT_RRR, weight=mattis_bardeen_weight):
    return BcsSuperconductor(
        NIOBIUM_PLASMA_EV * EV_FREQ,
        saturated_relaxation(NIOBIUM_GAMMA_ROOM_EV * EV_FREQ, rrr),
        NIOBIUM_TC,
        weight=weight,
    )
