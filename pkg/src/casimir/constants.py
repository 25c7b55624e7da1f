"""Physical constants and unit helpers (SI throughout)."""

from scipy.constants import Boltzmann as K_B
from scipy.constants import c as C
from scipy.constants import electron_volt, hbar as HBAR
import numpy as np

EV = electron_volt
#: angular frequency corresponding to 1 eV, i.e. 1 eV / hbar in rad/s
EV_FREQ = EV / HBAR

ZETA3 = 1.2020569031595942853997381615114499907649862923405


def ev_to_rad(x):
    """Convert an energy hbar*omega given in eV to an angular frequency in rad/s."""
    return np.asarray(x, dtype=float) * EV_FREQ if np.ndim(x) else float(x) * EV_FREQ


def rad_to_ev(x):
    return np.asarray(x, dtype=float) / EV_FREQ if np.ndim(x) else float(x) / EV_FREQ


__all__ = ["K_B", "C", "HBAR", "EV", "EV_FREQ", "ZETA3", "ev_to_rad", "rad_to_ev"]
