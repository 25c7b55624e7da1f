"""Fresnel and layered-stack reflection coefficients at imaginary frequency.

Frequencies are angular (rad/s), in-plane wavevectors in 1/m.  Every
function broadcasts over ``xi`` and ``k_perp``.

The zero-frequency (l = 0) coefficients live in
:func:`zero_frequency_reflection` and are built from the symbolic limits of
each model, never from evaluating a permittivity at tiny ``xi``; that limit is
exactly where the Drude and plasma prescriptions part ways.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .constants import C
from .errors import InvalidInput, InvalidWavevector, NonPositiveFrequency
from .materials import PerfectConductor, PermittivityModel, Vacuum

# exp(-x) for x above this is flushed to exactly zero
EXP_CUTOFF = 700.0


class Polarization(str, Enum):
    TE = "TE"
    TM = "TM"


class Prescription(str, Enum):
    """Rule for the static (l = 0) response of conductors."""

    DRUDE = "drude"
    PLASMA = "plasma"


@dataclass(frozen=True)
class Layer:
    material: PermittivityModel
    thickness: float

    def __post_init__(self):
        if not (np.isfinite(self.thickness) and self.thickness >= 0):
            raise InvalidInput(f"layer thickness must be finite and >= 0, got {self.thickness!r}")


@dataclass(frozen=True)
class LayeredStack:
    """Finite layers (vacuum side first) on a semi-infinite substrate."""

    substrate: PermittivityModel
    layers: tuple = ()

    def __post_init__(self):
        if isinstance(self.substrate, Vacuum):
            raise InvalidInput("the substrate of a stack cannot be vacuum")
        object.__setattr__(self, "layers", tuple(self.layers))
        for layer in self.layers:
            if not isinstance(layer, Layer):
                raise InvalidInput(f"expected Layer, got {type(layer).__name__}")

    @classmethod
    def bare(cls, material):
        return cls(material)

    @classmethod
    def coated(cls, coating, thickness, substrate):
        return cls(substrate, (Layer(coating, thickness),))

    def media(self):
        """``(materials, thicknesses)`` from the first layer down to the
        substrate, cut at the first perfect conductor (nothing below it is
        visible)."""
        mats, widths = [], []
        for layer in self.layers:
            mats.append(layer.material)
            if isinstance(layer.material, PerfectConductor):
                return mats, widths
            widths.append(layer.thickness)
        mats.append(self.substrate)
        return mats, widths


def _decay(width, k):
    x = 2.0 * width * k
    with np.errstate(over="ignore", under="ignore"):
        return np.where(x > EXP_CUTOFF, 0.0, np.exp(-np.minimum(x, EXP_CUTOFF)))


def axial_wavenumber(eps, xi, k_perp):
    """``sqrt(eps xi^2/c^2 + k_perp^2)``; equals ``k_perp`` at ``xi = 0``."""
    xi = np.asarray(xi, dtype=float)
    k_perp = np.asarray(k_perp, dtype=float)
    if np.any(k_perp < 0):
        raise InvalidWavevector("k_perp must be >= 0")
    with np.errstate(invalid="ignore"):
        exi2 = np.where(xi == 0, 0.0, np.asarray(eps, dtype=float) * xi * xi)
    return np.sqrt(exi2 / C**2 + k_perp**2)


def _fresnel_from_exi2(pol, eps_a, eps_b, exi2_a, exi2_b, xi, k_perp):
    """Fresnel coefficient given ``eps*xi^2`` of both media.

    Written as ``(k_a^2 - k_b^2) / (k_a + k_b)^2`` (and the TM analogue) so
    the coefficient is exactly zero for identical media and free of
    cancellation for nearly identical ones.
    """
    k2 = k_perp * k_perp
    ka = np.sqrt(exi2_a / C**2 + k2)
    kb = np.sqrt(exi2_b / C**2 + k2)
    if pol is Polarization.TE:
        return ((exi2_a - exi2_b) / C**2) / (ka + kb) ** 2
    q0 = xi * xi / C**2
    num = (eps_b - eps_a) * (eps_a * eps_b * q0 + k2 * (eps_a + eps_b))
    return num / (eps_b * ka + eps_a * kb) ** 2


def fresnel(pol, eps_a, eps_b, xi, k_perp):
    """Reflection coefficient of the a|b interface seen from medium a."""
    pol = Polarization(pol)
    xi = np.asarray(xi, dtype=float)
    k_perp = np.asarray(k_perp, dtype=float)
    eps_a = np.asarray(eps_a, dtype=float)
    eps_b = np.asarray(eps_b, dtype=float)
    if np.any(k_perp < 0) or np.any((xi == 0) & (k_perp == 0)):
        raise InvalidWavevector("need k_perp >= 0 and (xi, k_perp) != (0, 0)")
    if np.any(np.isinf(eps_a)):
        raise InvalidInput("incident medium cannot be a perfect conductor")
    with np.errstate(invalid="ignore"):
        exi2_a = np.where(xi == 0, 0.0, eps_a * xi * xi)
        exi2_b = np.where(xi == 0, 0.0, eps_b * xi * xi)
        r = _fresnel_from_exi2(pol, eps_a, eps_b, exi2_a, exi2_b, xi, k_perp)
    ideal = -1.0 if pol is Polarization.TE else 1.0
    return np.where(np.isinf(eps_b), ideal, r)


def _compose(r_top, decay, r_below):
    return (r_top + decay * r_below) / (1.0 + decay * r_top * r_below)


def stack_reflection(stack, pol, xi, k_perp, T=None):
    """Reflection coefficient of a layered stack seen from vacuum, ``xi > 0``.

    Layers are folded in from the substrate outward with the two-interface
    composition ``(r_01 + e r_12) / (1 + e r_01 r_12)``, ``e = exp(-2 w k_1)``.
    """
    pol = Polarization(pol)
    xi = np.asarray(xi, dtype=float)
    k_perp = np.asarray(k_perp, dtype=float)
    if np.any(~(xi > 0)):
        raise NonPositiveFrequency("stack_reflection needs xi > 0; use zero_frequency_reflection for l = 0")
    if np.any(k_perp < 0):
        raise InvalidWavevector("k_perp must be >= 0")
    mats, widths = stack.media()
    xi2 = xi * xi
    k2 = k_perp * k_perp

    eps = [np.ones_like(xi)]
    for m in mats[:-1]:
        eps.append(np.asarray(m.epsilon(xi, T), dtype=float))
    last = mats[-1]
    ideal = isinstance(last, PerfectConductor)

    if ideal:
        R = np.broadcast_to(-1.0 if pol is Polarization.TE else 1.0, np.broadcast(xi, k_perp).shape)
    else:
        eps.append(np.asarray(last.epsilon(xi, T), dtype=float))
        R = _fresnel_from_exi2(pol, eps[-2], eps[-1], eps[-2] * xi2, eps[-1] * xi2, xi, k_perp)
    for i in range(len(widths), 0, -1):
        ea, eb = eps[i - 1], eps[i]
        r = _fresnel_from_exi2(pol, ea, eb, ea * xi2, eb * xi2, xi, k_perp)
        kb = np.sqrt(eb * xi2 / C**2 + k2)
        R = _compose(r, _decay(widths[i - 1], kb), R)
    return np.asarray(R, dtype=float)


def static_screening(material, prescription, T=None):
    """``lim xi^2 eps(i xi)`` used for the static TE field in ``material``."""
    if isinstance(material, Vacuum):
        return 0.0
    if isinstance(material, PerfectConductor):
        return np.inf
    if Prescription(prescription) is Prescription.PLASMA:
        return material.plasma_frequency**2
    return material.static_weight(T)


def zero_frequency_reflection(stack, pol, k_perp, prescription, T=None, overlayer="immaterial"):
    """Reflection coefficient of a stack for the l = 0 Matsubara term.

    TE: each medium contributes ``k = sqrt(k_perp^2 + W/c^2)`` with ``W`` the
    static screening weight under ``prescription`` (zero for a normal metal
    under the Drude rule, ``kappa wp^2`` for a superconductor, ``wp^2`` for
    any conductor under the plasma rule).  With ``overlayer="immaterial"``
    conducting layers that do not screen static fields are dropped from the
    TE problem altogether, so a buried superconductor is seen as if it were
    bare; ``overlayer="propagate"`` keeps them as field-free gaps of their
    geometric thickness instead.

    TM: every conductor has a diverging static permittivity, so the first
    conducting interface reflects with +1.
    """
    pol = Polarization(pol)
    prescription = Prescription(prescription)
    if overlayer not in ("immaterial", "propagate"):
        raise InvalidInput(f"overlayer must be 'immaterial' or 'propagate', got {overlayer!r}")
    k_perp = np.asarray(k_perp, dtype=float)
    if np.any(~(k_perp > 0)):
        raise InvalidWavevector("zero-frequency reflection needs k_perp > 0")
    mats, widths = stack.media()

    if pol is Polarization.TM:
        gap = 0.0
        for m, w in zip(mats, widths):
            if m.conductor:
                break
            gap += w
        return np.asarray(_decay(gap, k_perp) * np.ones_like(k_perp), dtype=float)

    weights = [static_screening(m, prescription, T) for m in mats]
    if overlayer == "immaterial":
        keep = [i for i, (m, W) in enumerate(zip(mats[:-1], weights[:-1])) if not (m.conductor and W == 0)]
        mats = [mats[i] for i in keep] + [mats[-1]]
        widths = [widths[i] for i in keep]
        weights = [weights[i] for i in keep] + [weights[-1]]

    k2 = k_perp * k_perp
    W = [0.0] + weights
    ks = [np.sqrt(k2 + w / C**2) if np.isfinite(w) else None for w in W]

    def interface(i):
        # medium i above medium i+1 (index 0 is vacuum)
        if ks[i + 1] is None:
            return -np.ones_like(k_perp)
        return ((W[i] - W[i + 1]) / C**2) / (ks[i] + ks[i + 1]) ** 2

    n = len(widths)
    R = interface(n)
    for i in range(n, 0, -1):
        R = _compose(interface(i - 1), _decay(widths[i - 1], ks[i]), R)
    return np.asarray(R, dtype=float)
