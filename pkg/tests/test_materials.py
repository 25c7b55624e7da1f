import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from casimir.constants import EV, EV_FREQ, K_B
from casimir.errors import (
    ExtrapolationNotConverged,
    InvalidModelParameters,
    InvalidRRR,
    NonPositiveFrequency,
    TemperatureAboveCritical,
)
from casimir.materials import (
    BCS_RATIO,
    BcsSuperconductor,
    Drude,
    DrudeLorentz,
    MaterialConstants,
    Oscillator,
    Plasma,
    Vacuum,
    bcs_gap,
    dirty_limit_weight,
    gold,
    kappa,
    load_oscillators,
    mattis_bardeen_weight,
    niobium,
    permittivity,
    saturated_relaxation,
)

TC = 9.25
AU_OSC_EV = [(7.091, 3.05, 0.75), (41.46, 4.15, 1.85), (2.7, 5.4, 1.0),
             (154.7, 8.5, 7.0), (44.55, 13.5, 6.0), (309.6, 21.5, 9.0)]

positive_xi = st.floats(1e9, 1e18)


def non_vacuum_models():
    nb = niobium()
    return [Plasma(9 * EV_FREQ), Drude(9 * EV_FREQ, 0.035 * EV_FREQ), gold(), nb]


# ---------------------------------------------------------------- permittivity

def test_vacuum_is_one():
    assert permittivity(Vacuum(), 1e15) == 1.0


def test_plasma_at_plasma_frequency_is_two():
    wp = 9 * EV_FREQ
    assert permittivity(Plasma(wp), wp) == pytest.approx(2.0, rel=1e-15)


# mpmath term-by-term sums of the six-oscillator gold at RRR = 5
# (gamma = 0.007 eV), frozen from tests/oracles.mp_drude_lorentz
GOLD_FROZEN = {0.1: 7577.35385374239076, 1.0: 87.0493915109133525, 10.0: 3.43845020770259654}


@pytest.mark.parametrize("xi_ev", sorted(GOLD_FROZEN))
def test_gold_matches_term_by_term_sum(xi_ev, au):
    oracle = float(oracles.mp_drude_lorentz(xi_ev, 9.0, 0.007, AU_OSC_EV))
    assert oracle == pytest.approx(GOLD_FROZEN[xi_ev], rel=1e-14)
    assert permittivity(au, xi_ev * EV_FREQ) == pytest.approx(oracle, rel=1e-12)


def test_bundled_oscillator_table():
    osc = load_oscillators()
    assert len(osc) == 6
    for o, (g, w, d) in zip(osc, AU_OSC_EV):
        assert o.strength == pytest.approx(g * EV_FREQ**2, rel=1e-15)
        assert o.frequency == pytest.approx(w * EV_FREQ, rel=1e-15)
        assert o.damping == pytest.approx(d * EV_FREQ, rel=1e-15)


def test_nonpositive_frequency_rejected(au):
    with pytest.raises(NonPositiveFrequency):
        permittivity(au, 0.0)
    with pytest.raises(NonPositiveFrequency):
        permittivity(au, np.array([1e14, -1.0]))


def test_superconductor_needs_t_below_tc(nb):
    with pytest.raises(TemperatureAboveCritical):
        permittivity(nb, 1e14, TC)
    with pytest.raises(TemperatureAboveCritical):
        permittivity(nb, 1e14, 12.0)


@pytest.mark.parametrize("bad", [
    lambda: Plasma(0.0),
    lambda: Drude(1e16, -1.0),
    lambda: Oscillator(-1.0, 1e15),
    lambda: Oscillator(1.0, 0.0),
    lambda: BcsSuperconductor(1e16, 1e13, 0.0),
])
def test_invalid_parameters(bad):
    with pytest.raises(InvalidModelParameters):
        bad()


@given(positive_xi, positive_xi)
def test_monotone_decay_toward_one(x1, x2):
    lo, hi = sorted((x1, x2))
    for m in non_vacuum_models():
        e_lo = float(m.epsilon(lo, 0.8 * TC))
        e_hi = float(m.epsilon(hi, 0.8 * TC))
        assert e_lo >= e_hi > 1.0


@given(positive_xi)
def test_drude_below_plasma(xi):
    wp = 9 * EV_FREQ
    assert Drude(wp, 0.035 * EV_FREQ).epsilon(xi) < Plasma(wp).epsilon(xi)


def test_bcs_near_tc_reduces_to_drude(nb):
    drude = nb.normal_state()
    e_s = permittivity(nb, 1e13, 0.999 * TC)
    e_n = permittivity(drude, 1e13)
    assert abs(e_s - e_n) / e_n < 1e-2


def test_bcs_double_pole_weight(nb):
    """xi^2 (eps - 1) levels off at kappa wp^2 once xi is far below gamma.

    Nb with RRR = 5 has gamma ~ 4e-3 wp, so the plateau starts around
    xi ~ 1e-8 wp rather than 1e-3 wp; the window is shifted accordingly."""
    T = 0.5 * TC
    wp = nb.plasma_frequency
    vals = [xi * xi * (permittivity(nb, xi, T) - 1.0) for xi in wp * 10.0 ** -np.arange(8, 12)]
    assert (max(vals) - min(vals)) / np.mean(vals) < 1e-4
    assert vals[-1] / wp**2 == pytest.approx(kappa(nb, T), rel=1e-4)


# ---------------------------------------------------------------- gap

def test_gap_endpoints():
    d0 = BCS_RATIO * K_B * TC
    assert bcs_gap(0.0, TC) == d0
    assert bcs_gap(TC, TC) == 0.0


def test_gap_equation_ratio_and_niobium_gap():
    # oracle: sharp-cutoff BCS gap equation at weak coupling
    ratio = oracles.bcs_gap_ratio(0.2)
    assert ratio == pytest.approx(1.76395707, rel=1e-7)  # frozen oracle value
    assert BCS_RATIO == pytest.approx(ratio, rel=1e-3)
    assert bcs_gap(0.0, TC) / (1e-3 * EV) == pytest.approx(1.406, abs=5e-4)


@pytest.mark.parametrize("t, frozen", [(0.5, 0.95688897), (0.8, 0.71105351), (0.95, 0.38032490)])
def test_gap_interpolation_tracks_gap_equation(t, frozen):
    assert oracles.bcs_gap_at(t) == pytest.approx(frozen, rel=1e-6)
    assert bcs_gap(t * TC, TC) / bcs_gap(0.0, TC) == pytest.approx(frozen, rel=2e-2)


@given(st.floats(0.001, 0.999), st.floats(0.001, 0.999))
def test_gap_strictly_decreasing(t1, t2):
    if t1 == t2:
        return
    lo, hi = sorted((t1, t2))
    assert bcs_gap(lo * TC, TC) > bcs_gap(hi * TC, TC) >= 0.0


def test_gap_above_tc_rejected():
    with pytest.raises(TemperatureAboveCritical):
        bcs_gap(10.0, TC)


# ---------------------------------------------------------------- kappa

def test_kappa_vanishes_at_tc(nb):
    assert 0 < kappa(nb, 0.9999 * TC) < 1e-2


def test_kappa_clean_limit_approaches_one():
    clean = BcsSuperconductor(9.3 * EV_FREQ, 1e-6 * EV_FREQ, TC)
    assert kappa(clean, 0.1 * TC) > 0.99


def test_kappa_dirty_limit_vanishes():
    dirty = BcsSuperconductor(9.3 * EV_FREQ, 100 * EV_FREQ, TC)
    assert kappa(dirty, 0.1 * TC) < 1e-3


def test_kappa_decreasing_in_t_matches_direct_evaluation(nb):
    ts = [0.3, 0.5, 0.8]
    ks = [kappa(nb, t * TC) for t in ts]
    assert ks[0] > ks[1] > ks[2] > 0
    wp = nb.plasma_frequency
    for t, k in zip(ts, ks):
        xi = 1e-6 * wp
        direct = xi * xi * (permittivity(nb, xi, t * TC) - 1.0) / wp**2
        # the normal-fluid part still adds ~ (1 - kappa) xi / gamma at this xi
        assert direct > k
        assert (direct - k) / k < 1e-2


def test_kappa_decreasing_in_gamma():
    ks = [kappa(niobium(rrr), 0.5 * TC) for rrr in (20, 5, 2)]
    assert ks[0] > ks[1] > ks[2]


def test_kappa_equals_superfluid_weight(nb):
    for t in (0.2, 0.6, 0.95):
        assert kappa(nb, t * TC) == pytest.approx(nb.superfluid_weight(t * TC), rel=1e-8)


def test_kappa_reports_stalled_extrapolation(nb):
    with pytest.raises(ExtrapolationNotConverged):
        kappa(nb, 0.5 * TC, start=nb.plasma_frequency, levels=3, tol=1e-12)


def test_weights_agree_in_dirty_limit():
    # corrections are of relative order (gap / hgamma) log(hgamma / gap)
    gap, kT = 1.0, 0.3
    for hgamma, tol in ((1e4, 2e-3), (1e7, 5e-6)):
        exact = mattis_bardeen_weight(gap, kT, hgamma)
        assert exact == pytest.approx(dirty_limit_weight(gap, kT, hgamma), rel=tol)


@given(st.floats(1e-3, 0.999), st.floats(1.0, 100.0))
def test_kappa_in_unit_interval(t, rrr):
    k = niobium(rrr).superfluid_weight(t * TC)
    assert 0.0 < k < 1.0


# ---------------------------------------------------------------- relaxation

def test_saturated_relaxation_examples():
    g = 0.035 * EV_FREQ
    assert saturated_relaxation(g, 5) == pytest.approx(0.007 * EV_FREQ, rel=1e-15)
    assert saturated_relaxation(g, 1) == g
    assert saturated_relaxation(g, 7) == pytest.approx(0.005 * EV_FREQ, rel=1e-15)


def test_material_constants():
    mc = MaterialConstants(0.035 * EV_FREQ, 5.0)
    assert mc.gamma_saturated == mc.gamma_room / 5.0


def test_rrr_below_one_rejected():
    with pytest.raises(InvalidRRR):
        saturated_relaxation(1e13, 0.5)
