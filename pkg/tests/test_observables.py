import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spinomit import (
    PhaseWrap, PumpMode, UndefinedEfficiency, derive, efficiencies, group_delay, omit_linewidth,
    output_spectrum, paper_default, solve_sidebands, solve_steady,
)
from spinomit import observables
from spinomit.observables import half_height_width, phase_derivative, window_fwhm

KAPPA = derive(paper_default()).kappa
DENSE = np.linspace(0.98, 1.02, 2001) * 1e8
COARSE = np.linspace(0.98, 1.02, 81) * 1e8


def _eta(p, grid=DENSE):
    return efficiencies(solve_sidebands(p, grid), p)


@given(theta=st.floats(0, 2 * math.pi), gain=st.floats(0, 0.6), omega=st.floats(-6e4, 6e4),
       pump=st.sampled_from([PumpMode.SUM_FREQ, PumpMode.DOUBLE_CONTROL]))
def test_theta_periodicity(theta, gain, omega, pump):
    p = paper_default(G=gain * KAPPA, theta=theta, Omega=omega, pump_mode=pump, root_policy="nearest")
    a, b = _eta(p, COARSE), _eta(p.replace(theta=theta + 2 * math.pi), COARSE)
    np.testing.assert_allclose(b.eta1, a.eta1, rtol=1e-9)
    np.testing.assert_allclose(b.eta2, a.eta2, rtol=1e-9)


def test_efficiencies_finite_and_nonnegative():
    for p in (paper_default(), paper_default(Omega=-6e4, G=0.6 * KAPPA, theta=1.5 * math.pi)):
        eff = _eta(p)
        for values in (eff.eta1, eff.eta2):
            assert np.all(np.isfinite(values)) and np.all(values >= 0)


def test_nonreciprocity_exceeds_one_point():
    right = _eta(paper_default(Omega=2e4)).eta1
    left = _eta(paper_default(Omega=-2e4)).eta1
    assert np.max(np.abs(right - left)) > 0.01


def test_efficiency_shrinks_with_probe():
    p = paper_default()
    small = _eta(p.replace(P_p=p.P_p / 100), COARSE).eta1
    np.testing.assert_allclose(small, _eta(p, COARSE).eta1 / 10, rtol=1e-8)


def test_undefined_without_probe():
    p = paper_default(P_p=0.0)
    with pytest.raises(UndefinedEfficiency):
        efficiencies(solve_sidebands(p, 1e8), p)


def test_zero_upper_amplitude_gives_zero_eta1():
    p = paper_default()
    sol = dataclasses.replace(solve_sidebands(p, 1e8), A2_plus=0j)
    assert efficiencies(sol, p).eta1 == 0.0


def test_output_identities():
    p = paper_default(Omega=2e4, G=0.2 * KAPPA)
    d = derive(p)
    sol = solve_sidebands(p, COARSE)
    out = output_spectrum(sol, sol.steady, p)
    assert out.C1 == d.eps_l - math.sqrt(d.kappa_ex) * sol.steady.a_s
    assert np.array_equal(out.C2, sol.eps_p - math.sqrt(d.kappa_ex) * sol.A1_plus)


def test_output_without_probe():
    p = paper_default(P_p=0.0)
    d = derive(p)
    sol = solve_sidebands(p, COARSE)
    out = output_spectrum(sol, sol.steady, p)
    assert out.C1 == d.eps_l - math.sqrt(d.kappa_ex) * sol.steady.a_s
    for name in ("C2", "stokes", "up2", "low2"):
        assert np.all(np.asarray(getattr(out, name)) == 0)


def test_transparency_window():
    p = paper_default()
    grid = np.array([0.99, 0.995, 1.0, 1.005, 1.01]) * 1e8
    sol = solve_sidebands(p, grid)
    t = np.abs(output_spectrum(sol, sol.steady, p).C2 / sol.eps_p) ** 2
    assert t[2] > t[1] > t[0]
    assert t[2] > t[3] > t[4]


def test_group_delay_factor_of_two():
    p = paper_default(G=0.4 * KAPPA)
    deriv, h, _ = phase_derivative(p)
    gd = group_delay(p)
    assert gd.step == h
    assert 2 * gd.tau1 == deriv


@pytest.mark.parametrize("changes", [{}, {"Omega": 2e4}, {"G": 0.4 * KAPPA}, {"Omega": -2e4, "G": 0.4 * KAPPA}])
def test_group_delay_step_doubling(changes):
    p = paper_default(**changes)
    fine = group_delay(p)
    coarse = group_delay(p, step=2 * fine.step)
    assert math.isfinite(fine.tau1)
    assert abs(coarse.tau1 - fine.tau1) < 1e-3 * abs(fine.tau1)
    assert fine.halving_change < 1e-3


def test_rotation_switches_fast_and_slow_light():
    p = paper_default(G=0.4 * KAPPA)
    assert group_delay(p.replace(Omega=0.0)).tau1 < 0
    assert group_delay(p.replace(Omega=-3e4)).tau1 > 0


def test_phase_wrap(monkeypatch):
    monkeypatch.setattr(observables, "MAX_STENCIL_JUMP", 0.0)
    with pytest.raises(PhaseWrap):
        group_delay(paper_default())


@pytest.mark.parametrize("omega", [2e4, -2e4])
def test_peak_location_stable_under_gain(omega):
    step = DENSE[1] - DENSE[0]
    base = paper_default(Omega=omega, theta=0.0)
    ref = DENSE[np.argmax(_eta(base).eta1)]
    for gain in (0.2, 0.4, 0.6):
        peak = DENSE[np.argmax(_eta(base.replace(G=gain * KAPPA)).eta1)]
        assert abs(peak - ref) < step, f"G = {gain} kappa moved the peak by {(peak - ref) / step:.0f} steps"


def test_linewidth_without_drive():
    p = paper_default(P_l=0.0)
    assert omit_linewidth(solve_steady(p), p) == p.Gamma_m


def test_linewidth_exceeds_intrinsic():
    p = paper_default()
    assert omit_linewidth(solve_steady(p), p) > p.Gamma_m


def test_half_height_width_of_lorentzian():
    x = np.linspace(-10, 10, 2001)
    y = 1 / (1 + (x / 1.5) ** 2)
    # half height is measured above the window's floor, not above zero
    level = (1 + y.min()) / 2
    assert half_height_width(x, y) == pytest.approx(3.0 * math.sqrt(1 / level - 1), rel=1e-6)


def test_window_width_matches_linewidth():
    p = paper_default()
    measured = window_fwhm(p)
    predicted = omit_linewidth(solve_steady(p), p)
    assert abs(measured / predicted - 1) <= 0.2, f"FWHM {measured:.4e} vs {predicted:.4e}"


def test_window_width_matches_standard_broadening():
    p = paper_default()
    d = derive(p)
    s = solve_steady(p)
    standard = p.Gamma_m + 2 * d.xi**2 * d.x_zpf**2 * s.photons / d.kappa
    assert abs(window_fwhm(p) / standard - 1) <= 0.05
