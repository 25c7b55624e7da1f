"""Batched adaptive Gauss-Kronrod (7/15) quadrature.

Many independent integrals (one per Matsubara index) are refined together
so the integrand is evaluated on large numpy arrays.  Refinement decisions
for one integral only look at that integral's own panels, so a result does
not depend on what else was in the batch.
"""

from dataclasses import dataclass

import numpy as np

from .errors import QuadratureNotConverged

# QUADPACK qk15 abscissae/weights (positive half, centre last)
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[1:7:2] = _WG[:3]
GAUSS_WEIGHTS[7] = _WG[3]
GAUSS_WEIGHTS[9:15:2] = _WG[2::-1]

_KG = np.stack([KRONROD_WEIGHTS, GAUSS_WEIGHTS], axis=1)

# an integrand may return (values, scale) where scale bounds the size of the
# quantities it cancels; errors below NOISE_FACTOR * eps * int(scale) are
# roundoff and are accepted
NOISE_FACTOR = 100.0
# panels per integrand call
CHUNK = 1 << 16

_EPS = np.finfo(float).eps
_TINY = np.finfo(float).tiny


@dataclass
class BatchResult:
    values: np.ndarray
    errors: np.ndarray
    panels: np.ndarray  # number of panels used per integral


def gk15(values, half):
    """Kronrod estimate and QUADPACK-style error for rows of 15 samples."""
    resk, resg = (values @ _KG).T
    mean = 0.5 * resk
    resasc = (np.abs(values - mean[:, None]) @ KRONROD_WEIGHTS) * half
    resabs = (np.abs(values) @ KRONROD_WEIGHTS) * half
    err = np.abs((resk - resg) * half)
    scaled = np.where(
        (resasc > 0) & (err > 0),
        resasc * np.minimum(1.0, (200.0 * err / np.where(resasc > 0, resasc, 1.0)) ** 1.5),
        err,
    )
    floor = np.where(resabs > _TINY / (50 * _EPS), 50 * _EPS * resabs, 0.0)
    return resk * half, np.maximum(scaled, floor), resabs


def _evaluate(f, owner, centre, half):
    # bounded chunks keep the integrand's temporaries small
    parts = []
    for i in range(0, len(owner), CHUNK):
        sl = slice(i, i + CHUNK)
        x = centre[sl, None] + half[sl, None] * NODES[None, :]
        y = f(np.broadcast_to(owner[sl, None], x.shape), x)
        if isinstance(y, tuple):
            y, scale = y
            noise = (np.asarray(scale, dtype=float) @ KRONROD_WEIGHTS) * half[sl]
        else:
            noise = np.zeros(len(x))
        parts.append(gk15(np.asarray(y, dtype=float), half[sl]) + (noise,))
    if len(parts) == 1:
        return parts[0]
    return tuple(np.concatenate(p) for p in zip(*parts))


def integrate_batch(f, breakpoints, n, rel_tol, abs_tol=0.0, max_depth=40, cancellation=1e-3):
    """Integrate ``n`` functions over a common set of initial panels.

    Parameters
    ----------
    f : callable
        ``f(owner, x)`` with integer array ``owner`` (which integral) and an
        array ``x`` of abscissae of the same shape; returns integrand values,
        or ``(values, scale)`` with ``scale`` the magnitude of whatever the
        integrand loses to cancellation (sets a roundoff floor on the
        tolerance).
    breakpoints : array_like
        Increasing panel boundaries shared by every integral at the start.
    n : int
        Number of integrals.
    rel_tol, abs_tol : float
        Integral ``i`` is accepted once its summed error estimate is below
        ``max(rel_tol * |I_i|, rel_tol * cancellation * int |f_i|, abs_tol)``.
        The middle term keeps sign-changing integrands with a near-zero
        result from being refined forever.

    Returns
    -------
    BatchResult
    """
    bp = np.asarray(breakpoints, dtype=float)
    lo = np.tile(bp[:-1], n)
    hi = np.tile(bp[1:], n)
    owner = np.repeat(np.arange(n), len(bp) - 1)
    depth = np.zeros_like(owner)

    done_val = np.zeros(n)
    done_err = np.zeros(n)
    done_cnt = np.zeros(n, dtype=int)
    # panels carried over from earlier rounds (already evaluated)
    kept = (np.empty(0),) * 6 + (np.empty(0, int), np.empty(0, int))

    while True:
        centre = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        val, err, mag, noise = _evaluate(f, owner, centre, half)

        k_lo, k_hi, k_val, k_err, k_mag, k_noise, k_own, k_dep = kept
        lo = np.concatenate([k_lo, lo])
        hi = np.concatenate([k_hi, hi])
        val = np.concatenate([k_val, val])
        err = np.concatenate([k_err, err])
        mag = np.concatenate([k_mag, mag])
        noise = np.concatenate([k_noise, noise])
        owner = np.concatenate([k_own, owner])
        depth = np.concatenate([k_dep, depth])

        tot_val = np.bincount(owner, weights=val, minlength=n)
        tot_err = np.bincount(owner, weights=err, minlength=n)
        tot_mag = np.bincount(owner, weights=mag, minlength=n)
        tot_noise = np.bincount(owner, weights=noise, minlength=n)
        count = np.bincount(owner, minlength=n)
        active = count > 0
        tol = np.maximum(rel_tol * np.maximum(np.abs(tot_val), cancellation * tot_mag), abs_tol)
        tol = np.maximum(tol, NOISE_FACTOR * _EPS * tot_noise)
        ok = active & (tot_err <= tol)

        finished = ok[owner]
        if finished.any():
            fin = np.flatnonzero(ok)
            done_val[fin] = tot_val[fin]
            done_err[fin] = tot_err[fin]
            done_cnt[fin] = count[fin]
        keep = ~finished
        if not keep.any():
            break
        lo, hi, val, err, mag, noise = lo[keep], hi[keep], val[keep], err[keep], mag[keep], noise[keep]
        owner, depth = owner[keep], depth[keep]

        # an open integral has sum(err) > tol, so at least one of its panels
        # exceeds tol / count and gets split
        split = err > tol[owner] / count[owner]

        if np.any(depth[split] >= max_depth):
            bad = np.unique(owner[split & (depth >= max_depth)])
            raise QuadratureNotConverged(
                f"{len(bad)} integral(s) exceeded subdivision depth {max_depth}"
            )
        ns = ~split
        kept = (lo[ns], hi[ns], val[ns], err[ns], mag[ns], noise[ns], owner[ns], depth[ns])
        s_lo, s_hi, s_own, s_dep = lo[split], hi[split], owner[split], depth[split] + 1
        mid = 0.5 * (s_lo + s_hi)
        lo = np.concatenate([s_lo, mid])
        hi = np.concatenate([mid, s_hi])
        owner = np.concatenate([s_own, s_own])
        depth = np.concatenate([s_dep, s_dep])

    return BatchResult(done_val, done_err, done_cnt)


def integrate(f, a, b, rel_tol=1e-10, abs_tol=0.0, breakpoints=None, max_depth=40):
    """Scalar convenience wrapper: returns ``(value, error)``."""
    bp = [a, b] if breakpoints is None else breakpoints
    res = integrate_batch(lambda _, x: f(x), bp, 1, rel_tol, abs_tol, max_depth, cancellation=0.0)
    return float(res.values[0]), float(res.errors[0])
