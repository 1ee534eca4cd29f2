import math

import numpy as np
import pytest

from wickpt import dynamics as dyn
from wickpt import roundtrip as rt
from wickpt import spectra as sp
from wickpt.lattice import QuarticDoubleWell, SquireWell, assemble_hamiltonian, build_grid, default_grid


def test_derived_scales_hene():
    s = rt.derived_scales(rt.HENE)
    assert s.L == pytest.approx(57e-6, rel=1e-2)
    assert s.L == pytest.approx(math.sqrt(s.D))
    assert s.T_R == pytest.approx(4e-9, rel=1e-2)
    assert s.theta == pytest.approx(633e-9 / (math.pi * 250e-6**2))


def test_doubling_aperture_halves_length():
    wide = rt.PhysicalConfig(633e-9, 0.1, 500e-6, 0.6)
    assert rt.derived_scales(wide).L == pytest.approx(0.5 * rt.derived_scales(rt.HENE).L, rel=1e-15)


def test_config_must_be_positive():
    with pytest.raises(ValueError):
        rt.PhysicalConfig(633e-9, 0.1, 0.0, 0.6)


@pytest.mark.parametrize("alpha", [0.0, 1e-7, 3.3e-4])
def test_tilt_roundtrip(alpha):
    assert rt.gamma_to_tilt(rt.tilt_to_gamma(alpha, rt.HENE), rt.HENE) == pytest.approx(alpha, rel=1e-15, abs=0)


def test_filter_identity_at_zero_strength():
    psi = np.random.default_rng(0).standard_normal(64) + 0j
    assert np.array_equal(rt.huygens_filter(psi, 0.0, 0.1), psi)


def test_wall_filter_sine_eigenfunction():
    g = build_grid(-6, 6, 300)
    m = 3
    k = m * math.pi / 12
    psi = np.sin(k * (g.x + 6))
    out = rt.huygens_filter(psi, 0.7, g.h, "wall")
    assert np.allclose(out, math.exp(-0.7 * k**2) * psi, atol=1e-13)


def test_gaussian_width_law():
    g = build_grid(-40, 40, 2048)
    w, D = 1.5, 0.8
    out = rt.huygens_filter(np.exp(-(g.x**2) / w**2), D, g.h)
    w2 = w**2 + 4 * D
    expect = math.sqrt(w**2 / w2) * np.exp(-(g.x**2) / w2)
    assert np.allclose(out, expect, atol=1e-12)


def test_filter_is_contraction():
    rng = np.random.default_rng(3)
    psi = np.zeros(400, complex)
    psi[100:300] = rng.standard_normal(200) + 1j * rng.standard_normal(200)
    for boundary in ("open", "wall"):
        out = rt.huygens_filter(psi, 0.5, 0.05, boundary)
        assert np.linalg.norm(out) <= np.linalg.norm(psi)


def test_leak_warning():
    psi = np.ones(100, complex)
    with pytest.warns(RuntimeWarning, match="padding"):
        _, leak = rt.huygens_filter(psi, 5.0, 0.1, "open", return_leak=True)
    assert leak > 0


def test_round_trip_identities():
    g = build_grid(-5, 5, 100)
    psi = np.exp(-g.x**2) + 0.1j * g.x
    ident = rt.RoundTripOperator(0.0, np.ones(g.n), 0.0, g)
    assert np.allclose(rt.round_trip(psi, ident), psi)
    balanced = rt.RoundTripOperator(0.3, np.full(g.n, math.exp(-0.3)), 0.0, g)
    assert np.allclose(rt.round_trip(psi, balanced), psi, atol=1e-15)


def test_active_mirror_rejected():
    g = build_grid(-1, 1, 10)
    with pytest.raises(ValueError):
        rt.RoundTripOperator(0.0, np.full(10, 1.1), 1.0, g)


def test_growth_factor_matches_spectrum():
    s = SquireWell(6.0)
    g = default_grid(s, 400)
    op = rt.RoundTripOperator.from_potential(s, g, g=0.1)
    e1 = sp.eigenvalues(assemble_hamiltonian(s, g), 1)[0].real
    assert rt.growth_factor(op) == pytest.approx(math.exp(0.1 - e1), rel=1e-5)


def test_bch_vanishes_for_commuting_parts():
    g = build_grid(-6, 6, 120)
    op = rt.RoundTripOperator(0.2, np.full(g.n, 0.9 + 0.1j), 1.0, g, "wall")
    rep = rt.bch_consistency(np.sin(math.pi * (g.x + 6) / 12), op)
    assert max(rep.errors) < 1e-12


def test_bch_second_order_for_tilted_mirror():
    s = SquireWell(6.0, 0.07)
    g = default_grid(s, 300)
    op = rt.RoundTripOperator.from_potential(s, g, g=0.1)
    rep = rt.bch_consistency(np.sin(math.pi * (g.x + 6) / 12), op)
    assert all(3.2 < r < 4.8 for r in rep.ratios)


def test_round_trip_agrees_with_linear_step():
    # one round trip at scale s versus one Crank-Nicolson step of length s
    s = QuarticDoubleWell(0.002, 3.0, 0.05)
    g = build_grid(-15, 15, 600)
    op = rt.RoundTripOperator.from_potential(s, g, g=0.2)
    h_op = assemble_hamiltonian(s, g, 0.2)
    psi = np.exp(-((g.x - 3) ** 2)) + np.exp(-((g.x + 3) ** 2))
    errs = []
    for scale in (0.4, 0.2, 0.1):
        a = rt.round_trip(psi, op.scaled(scale))
        b = dyn.CrankNicolson(h_op, scale)(psi.astype(complex))
        errs.append(np.linalg.norm(a - b) / np.linalg.norm(psi))
    assert 3.0 < errs[0] / errs[1] < 5.0 and 3.0 < errs[1] / errs[2] < 5.0


def test_units_report_contents():
    rep = rt.units_report(rt.HENE, {"squire": 0.056}, u=6.0)
    assert rep["aperture_2a_m"] == pytest.approx(684e-6, rel=1e-2)
    assert rep["tilt"]["squire"]["alpha_rad"] == pytest.approx(0.1e-3, rel=5e-2)
