"""Sphere-plate forces in the proximity force approximation and the
differential signal between a superconducting and a normal strip.

The sphere (bare Nb) faces either a Nb strip buried under an Au overlayer of
thickness ``w`` or a bare semi-infinite Au plate.  The signal is the
difference of the two attraction magnitudes,

    dF = |F_strip| - |F_Au| = -2 pi R (F_strip - F_Au),

which is positive when the buried superconductor adds binding.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
import math

import numpy as np

from .constants import C, K_B
from .errors import GeometryInvalid, InvalidInput, InvalidRRR
from .lifshitz import Y_SPAN, free_energy_difference
from .materials import DEFAULT_RRR, NIOBIUM_TC, BcsSuperconductor, gold, kappa, niobium
from .output import DataTable
from .quadrature import integrate
from .reflection import LayeredStack, Prescription

#: reference penetration depth for the overlayer check
DELTA_REF = 20e-9

PASS, WARN, FAIL = "pass", "warn", "fail"


@dataclass(frozen=True)
class SetupGeometry:
    """Sphere radius ``R``, separation ``a``, overlayer thickness ``w`` and
    strip half-width ``s`` in meters, temperature ``T`` in kelvin."""

    R: float
    a: float
    w: float
    s: float
    T: float
    sphere_material: object
    overlayer_material: object
    strip_material: object
    far_plate_material: object
    rrr: float = None  # only needed for sweeps over RRR

    def __post_init__(self):
        for name in ("R", "a", "s", "T"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise InvalidInput(f"{name} must be > 0, got {v!r}")
        if not (np.isfinite(self.w) and self.w >= 0):
            raise InvalidInput(f"w must be >= 0, got {self.w!r}")

    @classmethod
    def nb_au(cls, R=150e-6, a=300e-9, w=80e-9, s=100e-6, T=None, rrr=DEFAULT_RRR, oscillators=None):
        """Nb sphere, Au overlayer on a Nb strip, Au far plate.  ``T``
        defaults to ``0.8 Tc``."""
        nb = niobium(rrr)
        au = gold(rrr, oscillators)
        if T is None:
            T = 0.8 * NIOBIUM_TC
        return cls(R, a, w, s, T, nb, au, nb, au, rrr)

    @property
    def rho(self):
        """Radius of the interaction spot, ``sqrt(a R)``."""
        return math.sqrt(self.a * self.R)

    def stacks(self):
        """``(sphere, strip side, far plate)`` stacks."""
        sphere = LayeredStack(self.sphere_material)
        strip = LayeredStack.coated(self.overlayer_material, self.w, self.strip_material)
        far = LayeredStack(self.far_plate_material)
        return sphere, strip, far

    def with_rrr(self, rrr):
        """Same setup with every damping rescaled from ``self.rrr`` to ``rrr``."""
        if self.rrr is None:
            raise InvalidInput("setup has no reference RRR to rescale from")
        if not rrr >= 1:
            raise InvalidRRR(f"RRR must be >= 1, got {rrr!r}")
        factor = self.rrr / rrr

        def rescale(m):
            return replace(m, damping=m.damping * factor) if hasattr(m, "damping") else m

        mats = {
            k: rescale(getattr(self, k))
            for k in ("sphere_material", "overlayer_material", "strip_material", "far_plate_material")
        }
        return replace(self, rrr=rrr, **mats)


@dataclass(frozen=True)
class Check:
    check: str
    status: str
    value: float
    threshold: float

    @property
    def margin(self):
        return self.value / self.threshold


@dataclass
class DeltaForce:
    """Differential force (N) and its split into the TE l = 0 mode and the rest."""

    delta_f: float
    te0_part: float
    rest_part: float
    error_estimate: float
    l_max: int
    warnings: list = field(default_factory=list)


def pfa_force(R, free_energy):
    """``2 pi R F``: sphere-plate force from the plate-plate free energy per area."""
    if not R > 0:
        raise InvalidInput(f"R must be > 0, got {R!r}")
    return 2.0 * math.pi * R * free_energy


def _skin_depth(material):
    wp = getattr(material, "plasma_frequency", None)
    return C / wp if wp else math.inf


def validate_geometry(setup):
    """Check the approximations the force model relies on.

    ``R/a`` (PFA): fail below 20, warn below 100.  ``s/rho`` (strip wide
    compared to the interaction spot): warn below 10.  ``w/(c/wp)`` and
    ``w/20nm`` (overlayer much thicker than the penetration depth): warn
    below 3 and 4 respectively.
    """
    ra = setup.R / setup.a
    checks = [Check("R/a", FAIL if ra < 20 else WARN if ra < 100 else PASS, ra, 100.0)]
    sr = setup.s / setup.rho
    checks.append(Check("s/rho", PASS if sr >= 10 else WARN, sr, 10.0))
    wd = setup.w / _skin_depth(setup.overlayer_material)
    checks.append(Check("w/skin_depth", PASS if wd >= 3 else WARN, wd, 3.0))
    w0 = setup.w / DELTA_REF
    checks.append(Check("w/delta_ref", PASS if w0 >= 4 else WARN, w0, 4.0))
    return checks


def delta_force(setup, prescription=Prescription.DRUDE, rel_tol=1e-6, *, overlayer="immaterial"):
    """Differential force ``|F_strip| - |F_Au|`` in newtons.

    Raises :class:`GeometryInvalid` on a failed geometry check; softer
    problems end up in ``warnings``.
    """
    checks = validate_geometry(setup)
    bad = [c for c in checks if c.status == FAIL]
    if bad:
        raise GeometryInvalid("; ".join(f"{c.check} = {c.value:.3g}" for c in bad))
    sphere, strip, far = setup.stacks()
    d = free_energy_difference(sphere, strip, far, setup.a, setup.T, prescription, rel_tol, overlayer=overlayer)
    scale = -2.0 * math.pi * setup.R
    total = scale * d.total
    te0 = scale * d.te_zero
    return DeltaForce(
        delta_f=total,
        te0_part=te0,
        rest_part=scale * (d.tm_zero + d.nonzero_sum),
        error_estimate=abs(scale) * d.quadrature_error_estimate,
        l_max=d.l_max,
        warnings=[c for c in checks if c.status == WARN],
    )


def drude_te0_closed_form(R, a, T, omega_s, rel_tol=1e-10):
    """TE l = 0 force between two superconductors with superfluid plasma
    frequency ``omega_s`` (normal metals contribute nothing there)::

        (k_B T R / 2 a^2) int_0^40 y log(1 - exp(-2y) r(y)^2) dy
        r = (y - sqrt(y^2 + s^2)) / (y + sqrt(y^2 + s^2)),  s = omega_s a / c

    Signed like the free energy, i.e. negative.
    """
    if not omega_s >= 0:
        raise InvalidInput(f"omega_s must be >= 0, got {omega_s!r}")
    s2 = (omega_s * a / C) ** 2

    def f(y):
        r = -s2 / (y + np.sqrt(y * y + s2)) ** 2
        return y * np.log1p(-np.exp(-2.0 * y) * r * r)

    if s2 == 0:
        return 0.0
    value, _ = integrate(f, 0.0, Y_SPAN, rel_tol=rel_tol, breakpoints=(0.0, 3.0, 10.0, Y_SPAN))
    return K_B * T * R / (2.0 * a * a) * value


def superfluid_plasma_frequency(model, T):
    """``omega_s = sqrt(kappa) omega_p`` of a superconductor."""
    if not isinstance(model, BcsSuperconductor):
        raise InvalidInput("superfluid plasma frequency needs a BcsSuperconductor")
    return math.sqrt(kappa(model, T)) * model.plasma_frequency


AXES = {
    "separation": ("a", "m"),
    "temperature": ("T", "K"),
    "thickness": ("w", "m"),
    "rrr": ("rrr", "1"),
}


def _point(setup, axis, x):
    if axis == "rrr":
        return setup.with_rrr(x)
    return replace(setup, **{AXES[axis][0]: x})


def sweep(setup, prescription, axis, grid, rel_tol=1e-6, *, workers=1, overlayer="immaterial"):
    """Evaluate :func:`delta_force` along one axis.

    ``prescription`` may be ``"both"``, which gives paired columns.  Forces
    are in newtons; rows follow ``grid`` whatever ``workers`` is.
    """
    if axis not in AXES:
        raise InvalidInput(f"axis must be one of {sorted(AXES)}, got {axis!r}")
    grid = [float(x) for x in grid]
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise InvalidInput("grid must be strictly increasing")
    presc = ["drude", "plasma"] if prescription == "both" else [Prescription(prescription).value]

    name, unit = AXES[axis]
    columns, units = [name], [unit]
    if axis == "temperature":
        tc = getattr(setup.strip_material, "critical_temperature", None)
        if tc:
            columns.append("T/Tc")
            units.append("1")
    for p in presc:
        columns += [f"dF_{p}", f"dF_{p}_te0", f"dF_{p}_rest", f"dF_{p}_err"]
        units += ["N"] * 4

    jobs = [(x, p) for x in grid for p in presc]

    def run(job):
        x, p = job
        return delta_force(_point(setup, axis, x), p, rel_tol, overlayer=overlayer)

    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(j) for j in jobs]
    l_max = [r.l_max for r in results]

    rows = []
    it = iter(results)
    for x in grid:
        row = [x]
        if len(columns) > 1 and columns[1] == "T/Tc":
            row.append(x / tc)
        for _ in presc:
            r = next(it)
            row += [r.delta_f, r.te0_part, r.rest_part, r.error_estimate]
        rows.append(row)
    meta = {"axis": axis, "prescription": prescription, "rel_tol": rel_tol,
            "max_l": max(l_max) if l_max else 0}
    return DataTable(columns, units, rows, meta)
