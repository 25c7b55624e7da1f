import math
from dataclasses import replace

import numpy as np
import pytest

import oracles
from casimir.constants import C, K_B, ZETA3
from casimir.errors import GeometryInvalid, InvalidInput
from casimir.materials import gold, niobium
from casimir.pfa import (
    FAIL,
    PASS,
    WARN,
    SetupGeometry,
    delta_force,
    drude_te0_closed_form,
    pfa_force,
    superfluid_plasma_frequency,
    sweep,
    validate_geometry,
)

TC = 9.25


def test_pfa_force_examples():
    assert pfa_force(150e-6, 0.0) == 0.0
    assert abs(pfa_force(150e-6, -1e-12)) == pytest.approx(9.42e-16, rel=1e-3)
    assert pfa_force(300e-6, -1e-12) == 2 * pfa_force(150e-6, -1e-12)
    with pytest.raises(InvalidInput):
        pfa_force(0.0, 1.0)


# ---------------------------------------------------------------- geometry

def checks_by_name(setup):
    return {c.check: c for c in validate_geometry(setup)}


def test_fig3_geometry_passes(fig3_setup):
    assert fig3_setup.rho == pytest.approx(6.7e-6, rel=1e-2)
    checks = checks_by_name(fig3_setup)
    assert all(c.status == PASS for c in checks.values())
    assert checks["w/delta_ref"].margin == pytest.approx(1.0)
    assert checks["w/delta_ref"].value == pytest.approx(4.0)


def test_small_radius_fails(fig3_setup):
    bad = replace(fig3_setup, R=10 * fig3_setup.a)
    assert checks_by_name(bad)["R/a"].status == FAIL
    with pytest.raises(GeometryInvalid):
        delta_force(bad)
    assert checks_by_name(replace(fig3_setup, R=50 * fig3_setup.a))["R/a"].status == WARN


def test_narrow_strip_and_thin_overlayer_warn(fig3_setup):
    c = checks_by_name(replace(fig3_setup, s=2e-6, w=30e-9))
    assert c["s/rho"].status == WARN
    assert c["w/skin_depth"].status == WARN
    d = delta_force(replace(fig3_setup, s=2e-6))
    assert [w.check for w in d.warnings] == ["s/rho"]


def test_setup_validation():
    with pytest.raises(InvalidInput):
        SetupGeometry.nb_au(a=-1e-9)
    with pytest.raises(InvalidInput):
        SetupGeometry.nb_au(w=-1e-9)


# ---------------------------------------------------------------- delta force

@pytest.fixture(scope="module")
def fig3_pair():
    s = SetupGeometry.nb_au()
    return delta_force(s, "drude"), delta_force(s, "plasma")


def test_prescription_contrast(fig3_pair):
    drude, plasma = fig3_pair
    assert abs(drude.delta_f) / abs(plasma.delta_f) > 100


def test_drude_signal_is_positive_and_te0_dominated(fig3_pair):
    drude, _ = fig3_pair
    assert drude.delta_f > 0
    assert abs(drude.rest_part) < 0.1 * abs(drude.delta_f)
    assert drude.delta_f == pytest.approx(drude.te0_part + drude.rest_part, rel=1e-12)


def test_rest_part_prescription_independent(fig3_pair):
    drude, plasma = fig3_pair
    assert abs(drude.rest_part - plasma.rest_part) < drude.error_estimate + plasma.error_estimate


def test_plasma_signal_shrinks_with_burial(fig3_setup):
    thin = delta_force(fig3_setup, "plasma")
    thick = delta_force(replace(fig3_setup, w=160e-9), "plasma")
    assert abs(thick.delta_f) < abs(thin.delta_f)
    assert abs(thick.te0_part) * 10 <= abs(thin.te0_part)


def test_no_contrast_no_signal(fig3_setup):
    au = fig3_setup.far_plate_material
    d = delta_force(replace(fig3_setup, strip_material=au), "drude")
    assert d.delta_f == 0.0


# ---------------------------------------------------------------- closed form

def test_closed_form_limits():
    R, a, T = 150e-6, 300e-9, 7.4
    assert drude_te0_closed_form(R, a, T, 0.0) == 0.0
    ideal = K_B * T * R / (2 * a * a) * float(oracles.mp_zeta3_integral())
    assert ideal == pytest.approx(-K_B * T * R / (2 * a * a) * ZETA3 / 4, rel=1e-14)
    big = drude_te0_closed_form(R, a, T, 1e3 * C / a)
    assert big == pytest.approx(ideal, rel=5e-3)


def test_closed_form_matches_engine(fig3_setup):
    d = delta_force(fig3_setup, "drude")
    ws = superfluid_plasma_frequency(fig3_setup.strip_material, fig3_setup.T)
    cf = drude_te0_closed_form(fig3_setup.R, fig3_setup.a, fig3_setup.T, ws)
    assert d.te0_part == pytest.approx(-cf, rel=1e-6)


def test_superfluid_plasma_frequency_needs_superconductor():
    with pytest.raises(InvalidInput):
        superfluid_plasma_frequency(gold(), 1.0)


# ---------------------------------------------------------------- sweeps

def test_sweep_separation_monotone():
    s = SetupGeometry.nb_au(T=0.9 * TC)
    t = sweep(s, "drude", "separation", np.linspace(150e-9, 600e-9, 6))
    f = t.column("dF_drude")
    assert np.all(np.diff(np.abs(f)) < 0)
    assert t.units[t.columns.index("dF_drude")] == "N"


def test_sweep_empty_grid():
    t = sweep(SetupGeometry.nb_au(), "both", "separation", [])
    assert len(t) == 0
    assert "dF_plasma" in t.columns


def test_sweep_parallel_is_deterministic():
    s = SetupGeometry.nb_au()
    grid = [4.0, 6.0, 8.0]
    a = sweep(s, "both", "temperature", grid)
    b = sweep(s, "both", "temperature", grid, workers=3)
    assert a.rows == b.rows
    assert a.column("T/Tc") == pytest.approx(np.array(grid) / TC)


def test_sweep_rrr_rescales_damping():
    s = SetupGeometry.nb_au()
    t = sweep(s, "drude", "rrr", [2.0, 5.0])
    row5 = t.rows[1]
    direct = delta_force(s, "drude")
    assert row5[1] == pytest.approx(direct.delta_f, rel=1e-9)
    assert s.with_rrr(2.0).strip_material.damping == pytest.approx(niobium(2.0).damping, rel=1e-14)


def test_sweep_rejects_bad_grids():
    s = SetupGeometry.nb_au()
    with pytest.raises(InvalidInput):
        sweep(s, "drude", "separation", [300e-9, 200e-9])
    with pytest.raises(InvalidInput):
        sweep(s, "drude", "color", [1.0])
