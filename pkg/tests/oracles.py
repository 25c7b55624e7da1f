"""Independent reference computations used by the tests.

Nothing here imports the package's numerical code: the reflection oracle
solves the boundary-value problem directly, the gap oracle solves the BCS
gap equation, and scalar references use mpmath.
"""

import mpmath as mp
import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

C = 299792458.0
HBAR = 6.62607015e-34 / (2 * 3.14159265358979323846)  # exact SI h
K_B = 1.380649e-23
EV = 1.602176634e-19


def transfer_matrix_reflection(pol, xi, k, eps_layers, widths, eps_substrate):
    """Reflection coefficient of vacuum | layers | substrate at imaginary
    frequency by solving the field-matching equations as one linear system.

    In medium j the field is ``A_j exp(kappa_j (z - z_{j+1})) + B_j exp(-kappa_j (z - z_j))``
    (both terms bounded inside the layer).  Vacuum (z < 0) carries
    ``a exp(kappa_0 z) + exp(-kappa_0 z)`` and the substrate only the decaying
    ``t exp(-kappa_s (z - z_n))``; the reflection coefficient is ``a``.
    TE matches f and f'; TM matches f and f'/eps.
    """
    eps = [1.0] + list(eps_layers) + [eps_substrate]
    kap = [np.sqrt(e * xi**2 / C**2 + k**2) for e in eps]
    z = np.concatenate([[0.0], np.cumsum(widths)])
    n = len(widths)
    # unknowns: a, (A_1, B_1), ..., (A_n, B_n), t
    size = 2 * n + 2
    M = np.zeros((size, size))
    rhs = np.zeros(size)

    def weight(j):
        return 1.0 if pol == "TE" else 1.0 / eps[j]

    def col_A(j):
        return 1 + 2 * (j - 1)

    row = 0
    for i in range(n + 1):  # interface at z[i] between media i and i+1
        zi = z[i]
        # left medium i
        if i == 0:
            # a e^{k0 z} + e^{-k0 z} at z = 0
            M[row, 0] = 1.0
            rhs[row] -= 1.0
            M[row + 1, 0] = weight(0) * kap[0]
            rhs[row + 1] -= weight(0) * (-kap[0])
        else:
            j = i
            eA = 1.0  # exp(kap (z_i - z_{j+1})) at the right end of layer j: z_{j+1} = z_i
            eB = np.exp(-kap[j] * (zi - z[j - 1]))
            M[row, col_A(j)] = eA
            M[row, col_A(j) + 1] = eB
            M[row + 1, col_A(j)] = weight(j) * kap[j] * eA
            M[row + 1, col_A(j) + 1] = -weight(j) * kap[j] * eB
        # right medium i+1, subtracted
        j = i + 1
        if j == n + 1:
            M[row, size - 1] = -1.0
            M[row + 1, size - 1] = weight(j) * kap[j]
        else:
            eA = np.exp(kap[j] * (zi - z[j]))
            eB = 1.0
            M[row, col_A(j)] = -eA
            M[row, col_A(j) + 1] = -eB
            M[row + 1, col_A(j)] = -weight(j) * kap[j] * eA
            M[row + 1, col_A(j) + 1] = weight(j) * kap[j] * eB
        row += 2
    sol = np.linalg.solve(M, rhs)
    return sol[0]


def bcs_gap_ratio(coupling=0.2, cutoff=1.0):
    """Delta(0) / (k_B Tc) from the weak-coupling gap equation with a sharp
    energy cutoff (energies in units of the cutoff)."""
    inv = 1.0 / coupling
    gap0 = cutoff / np.sinh(inv)

    def tc_eq(kt):
        f = lambda e: np.tanh(e / (2 * kt)) / e if e > 0 else 1 / (2 * kt)
        return quad(f, 0, cutoff, limit=400, epsabs=0, epsrel=1e-13, points=[kt, 10 * kt])[0] - inv

    tc = brentq(tc_eq, 1e-6 * cutoff, cutoff, xtol=1e-16, rtol=1e-14)
    return gap0 / tc


def bcs_gap_at(t, coupling=0.2, cutoff=1.0):
    """Gap at reduced temperature ``t = T/Tc`` relative to the T = 0 gap."""
    inv = 1.0 / coupling
    gap0 = cutoff / np.sinh(inv)
    tc = gap0 / bcs_gap_ratio(coupling, cutoff)
    kt = t * tc

    def eq(d):
        f = lambda e: np.tanh(np.sqrt(e * e + d * d) / (2 * kt)) / np.sqrt(e * e + d * d)
        return quad(f, 0, cutoff, limit=400, epsabs=0, epsrel=1e-13, points=[d, 10 * d])[0] - inv

    return brentq(eq, 1e-12 * gap0, 2 * gap0, xtol=1e-18, rtol=1e-13) / gap0


def mp_matsubara(T, l=1):
    mp.mp.dps = 30
    hbar = mp.mpf("6.62607015e-34") / (2 * mp.pi)
    return 2 * mp.pi * l * mp.mpf("1.380649e-23") * T / hbar


def mp_zeta3_integral():
    """int_0^inf y log(1 - exp(-2y)) dy = -zeta(3)/4."""
    mp.mp.dps = 30
    return mp.quad(lambda y: y * mp.log(1 - mp.exp(-2 * y)), [0, 1, 10, mp.inf])


def mp_drude_lorentz(xi_ev, wp_ev, gamma_ev, oscillators_ev):
    """eps(i xi) with everything in eV (ħω), summed term by term in mpmath."""
    mp.mp.dps = 30
    x = mp.mpf(xi_ev)
    eps = 1 + mp.mpf(wp_ev) ** 2 / (x * (x + mp.mpf(gamma_ev)))
    for g, w, d in oscillators_ev:
        eps += mp.mpf(g) / (x**2 + mp.mpf(w) ** 2 + mp.mpf(d) * x)
    return eps
