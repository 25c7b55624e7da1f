"""Lifshitz free energy per unit area between two layered plates.

    F(T, a) = (k_B T / 2 pi) sum'_l int_0^inf dk k sum_pol log(1 - exp(-2 a q_l) R1 R2)

with ``q_l = sqrt(xi_l^2/c^2 + k^2)`` and the l = 0 term weighted by 1/2.
The k-integral is done in ``y = a q_l`` over ``[y_l, y_l + 40]``, where
``y_l = xi_l a / c``; the integrand decays like ``exp(-2y)`` so the cut costs
nothing at double precision.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .constants import C, HBAR, K_B
from .materials import PerfectConductor
from .errors import InvalidInput, NonPositiveTemperature, TruncationNotConverged
from .quadrature import integrate_batch
from .reflection import (
    Polarization,
    Prescription,
    stack_reflection,
    zero_frequency_reflection,
)

MIN_TEMPERATURE = 0.01  # K
Y_SPAN = 40.0
# initial panels in u = y - y_l
PANELS = (0.0, 3.0, 10.0, Y_SPAN)
BLOCK = 32768


def matsubara_frequency(T, l):
    """``xi_l = 2 pi l k_B T / hbar`` in rad/s."""
    if not T > 0:
        raise NonPositiveTemperature(f"temperature must be > 0, got {T!r}")
    if np.any(np.asarray(l) < 0):
        raise InvalidInput("Matsubara index must be >= 0")
    return 2.0 * math.pi * np.asarray(l, dtype=float) * K_B * T / HBAR if np.ndim(l) else 2.0 * math.pi * l * K_B * T / HBAR


def thermal_length(T):
    """``hbar c / (2 pi k_B T)``, the separation where thermal effects take over."""
    return HBAR * C / (2.0 * math.pi * K_B * T)


@dataclass
class FreeEnergyBreakdown:
    """Free energy per area (J/m^2) and its split into modes.

    ``l_terms[l]`` is the full (TE + TM, weighted) contribution of Matsubara
    index ``l`` for ``l = 0 .. l_max``.
    """

    total: float
    te_zero: float
    tm_zero: float
    nonzero_sum: float
    l_terms: np.ndarray
    quadrature_error_estimate: float
    te_terms: np.ndarray = field(repr=False, default=None)
    tm_terms: np.ndarray = field(repr=False, default=None)
    l_max: int = 0
    truncation_estimate: float = 0.0


def _log_factor(y, product):
    """``log(1 - exp(-2y) * product)`` without cancellation."""
    e = np.exp(-2.0 * y)
    x = e * product
    near = x >= 0.5
    np.negative(x, out=x)
    out = np.log1p(x, out=x)
    if near.any():
        y, product = np.broadcast_arrays(y, product)
        yn, en, pn = y[near], e[near], product[near]
        out[near] = np.log(-np.expm1(-2.0 * yn) + en * (1.0 - pn))
    return out


def _one_minus(y, product):
    e = np.exp(-2.0 * y)
    return -np.expm1(-2.0 * y) + e * (1.0 - product)


class _Problem:
    """Integrand for one geometry; ``ref`` turns it into a difference
    ``F(stack1, stack2) - F(stack1, ref)``."""

    def __init__(self, stack1, stack2, a, T, prescription, ref=None, overlayer="immaterial"):
        if not a > 0:
            raise InvalidInput(f"separation must be > 0, got {a!r}")
        if not T > 0:
            raise NonPositiveTemperature(f"temperature must be > 0, got {T!r}")
        if T < MIN_TEMPERATURE:
            raise InvalidInput(f"temperature below the {MIN_TEMPERATURE} K engine minimum")
        self.stack1, self.stack2, self.ref = stack1, stack2, ref
        self.a, self.T = float(a), float(T)
        self.prescription = Prescription(prescription)
        self.overlayer = overlayer
        self.constant = all(
            s is None or isinstance(s.media()[0][0], PerfectConductor) for s in (stack1, stack2, ref)
        )
        self.xi1 = matsubara_frequency(self.T, 1)
        self.prefactor = K_B * self.T / (2.0 * math.pi * self.a**2)

    def _reflections(self, l, pol, xi, k):
        if l is not None and self.constant:
            # ideal mirrors: R = -1 (TE) or +1 (TM) whatever xi and k
            r = -1.0 if pol is Polarization.TE else 1.0
            return r, r, (r if self.ref is not None else None)
        if l is None:
            args = (pol, k, self.prescription, self.T, self.overlayer)
            r = lambda s: zero_frequency_reflection(s, *args)
        else:
            r = lambda s: stack_reflection(s, pol, xi, k, self.T)
        return r(self.stack1), r(self.stack2), (r(self.ref) if self.ref is not None else None)

    def integrals(self, ls, pol, rel_tol):
        """Unweighted y-integrals for indices ``ls`` (all zero or all >= 1)."""
        ls = np.asarray(ls, dtype=int)
        zero = ls[0] == 0
        xi = self.xi1 * ls.astype(float)
        y_low = xi * self.a / C

        def f(owner, u):
            rows = owner[:, :1]
            yl = y_low[rows]
            y = yl + u
            k = None
            if zero or not self.constant:
                k = u + 2.0 * yl
                k *= u
                np.sqrt(k, out=k)
                k *= 1.0 / self.a
            R1, R2, Rr = self._reflections(None if zero else 1, pol, xi[rows], k)
            if Rr is None:
                out = _log_factor(y, np.asarray(R1 * R2, dtype=float))
                out *= y
                return out
            e = np.exp(-2.0 * y)
            den = _one_minus(y, R1 * Rr)
            with np.errstate(invalid="ignore", divide="ignore"):
                z = e * (R1 * (R2 - Rr)) / den
                # R2 - Rr carries an absolute rounding error of order eps
                scale = y * e * np.abs(R1) * (np.abs(R2) + np.abs(Rr)) / den
            return y * np.log1p(-z), scale

        return integrate_batch(f, PANELS, len(ls), rel_tol)

    def weighted(self, ls, pol, rel_tol):
        res = self.integrals(ls, pol, rel_tol)
        w = self.prefactor * (0.5 if ls[0] == 0 else 1.0)
        return w * res.values, w * res.errors


def _tail_bounds(prev, cur):
    """Geometric-ratio estimate of everything after ``cur`` (padded by 2)."""
    prev, cur = np.abs(prev), np.abs(cur)
    with np.errstate(divide="ignore", invalid="ignore"):
        rho = np.where(prev > 0, cur / prev, np.inf)
        bound = np.where(rho < 1.0, 2.0 * cur * rho / (1.0 - rho), np.inf)
    return np.where(cur == 0.0, 0.0, bound)


def _sum_matsubara(problem, rel_tol, floor_factor, max_terms):
    te0, te0_err = problem.weighted(np.array([0]), Polarization.TE, rel_tol)
    tm0, tm0_err = problem.weighted(np.array([0]), Polarization.TM, rel_tol)
    te, tm, errs = [te0], [tm0], [te0_err + tm0_err]

    omega_c = C / (2.0 * problem.a)
    floor = max(1, math.ceil(floor_factor * omega_c / problem.xi1))
    if floor > max_terms:
        raise TruncationNotConverged(f"floor l_max = {floor} exceeds the budget of {max_terms} terms")

    partial = float(te0[0] + tm0[0])
    last = partial
    quiet = 0  # consecutive small terms carried across blocks
    start = 1
    block = min(max(256, floor), BLOCK)
    l_max = None
    while l_max is None:
        stop = min(start + block, max_terms + 1)
        if start >= stop:
            raise TruncationNotConverged(f"Matsubara sum not converged within {max_terms} terms")
        ls = np.arange(start, stop)
        vte, ete = problem.weighted(ls, Polarization.TE, rel_tol)
        if problem.constant:
            # ideal mirrors: R1 R2 = 1 in both polarizations
            vtm, etm = vte, ete
        else:
            vtm, etm = problem.weighted(ls, Polarization.TM, rel_tol)
        t = vte + vtm
        te.append(vte)
        tm.append(vtm)
        errs.append(ete + etm)

        partials = partial + np.cumsum(t)
        small = np.abs(t) <= rel_tol * np.abs(partials)
        # length of the run of small terms ending at each index
        idx = np.arange(len(t))
        last_break = np.maximum.accumulate(np.where(small, -1, idx))
        run = np.where(last_break < 0, idx + 1 + quiet, idx - last_break)
        tails = _tails_for(t, last)
        ok = (ls >= floor) & (run >= 3) & (tails <= rel_tol * np.abs(partials))
        if ok.any():
            l_max = int(ls[np.argmax(ok)])
        else:
            partial = float(partials[-1])
            last = float(t[-1])
            quiet = int(run[-1])
            start = stop
            block = min(max(2 * block, floor - start + 1), BLOCK)

    n = l_max + 1
    te_a = np.concatenate(te)[:n]
    tm_a = np.concatenate(tm)[:n]
    err_a = np.concatenate(errs)[:n]
    tot = te_a + tm_a
    tail = float(_tail_bounds(tot[-2:-1], tot[-1:])[0])
    return FreeEnergyBreakdown(
        total=math.fsum(tot),
        te_zero=float(te_a[0]),
        tm_zero=float(tm_a[0]),
        nonzero_sum=math.fsum(tot[1:]),
        l_terms=tot,
        quadrature_error_estimate=math.fsum(err_a) + tail,
        te_terms=te_a,
        tm_terms=tm_a,
        l_max=l_max,
        truncation_estimate=tail,
    )


def _tails_for(t, last):
    prev = np.concatenate([[last], t[:-1]])
    return _tail_bounds(prev, t)


def _check_tol(rel_tol):
    if not 0 < rel_tol <= 1e-3:
        raise InvalidInput(f"rel_tol must be in (0, 1e-3], got {rel_tol!r}")


def free_energy_per_area(stack1, stack2, a, T, prescription=Prescription.DRUDE, rel_tol=1e-6, *,
                         overlayer="immaterial", floor_factor=10.0, max_terms=1_000_000):
    """Casimir free energy per unit area (J/m^2) between two stacks a distance
    ``a`` apart at temperature ``T``.

    The Matsubara sum stops at the first ``l >= ceil(floor_factor * c / (2 a xi_1))``
    where three consecutive terms and the estimated remainder are all below
    ``rel_tol`` times the partial sum.
    """
    _check_tol(rel_tol)
    problem = _Problem(stack1, stack2, a, T, prescription, overlayer=overlayer)
    return _sum_matsubara(problem, rel_tol, floor_factor, max_terms)


def free_energy_difference(stack1, stack2, reference, a, T, prescription=Prescription.DRUDE, rel_tol=1e-6, *,
                           overlayer="immaterial", floor_factor=10.0, max_terms=1_000_000):
    """``F(stack1, stack2) - F(stack1, reference)`` summed term by term.

    The two free energies share most of their value, so the difference is
    integrated directly as ``log((1 - e R1 R2) / (1 - e R1 Rref))`` and the
    truncation/quadrature tolerances apply to the difference itself.
    """
    _check_tol(rel_tol)
    problem = _Problem(stack1, stack2, a, T, prescription, ref=reference, overlayer=overlayer)
    return _sum_matsubara(problem, rel_tol, floor_factor, max_terms)


def mode_term(stack1, stack2, a, T, l, pol, prescription=Prescription.DRUDE, rel_tol=1e-6, *,
              overlayer="immaterial", reference=None):
    """A single ``(l, polarization)`` summand, including the l = 0 half weight."""
    _check_tol(rel_tol)
    if int(l) != l or l < 0:
        raise InvalidInput(f"Matsubara index must be a non-negative integer, got {l!r}")
    problem = _Problem(stack1, stack2, a, T, prescription, ref=reference, overlayer=overlayer)
    value, _ = problem.weighted(np.array([int(l)]), Polarization(pol), rel_tol)
    return float(value[0])
