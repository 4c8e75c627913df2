import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spinomit import (
    NonMarkovian, PumpMode, Regime, SingularSystem, derive, efficiencies, paper_default, solve_sidebands,
    solve_steady, susceptibilities,
)
from spinomit.sidebands import closed_form_2wl_first, closed_form_plain, solve_first_order, solve_first_order_2wl

KAPPA = derive(paper_default()).kappa
GRID = np.linspace(0.98, 1.02, 100) * 1e8
DENSE = np.linspace(0.98, 1.02, 2001) * 1e8


def _maxrel(a, b):
    return float(np.max(np.abs(np.asarray(a) - b) / np.abs(b)))


def _peaks(values):
    idx = [j for j in range(1, len(values) - 1) if values[j] > values[j - 1] and values[j] >= values[j + 1]]
    return [values[j] for j in idx]


def test_mechanical_resonance_zero():
    p = paper_default(Gamma_m=0.0)
    st_ = solve_steady(p)
    chi = susceptibilities(1, p.omega_m, st_, p)["chi"]
    assert abs(chi) <= 1e-12 * p.m * p.omega_m**2


def test_cavity_resonance_zero():
    p = paper_default(kappa_a=0.0, kappa_ex=0.0, P_l=0.0)
    p_ok = paper_default(kappa_a=1e-6, kappa_ex=1e-6, P_l=0.0)
    st_ = solve_steady(p_ok)
    sigma1 = susceptibilities(1, st_.Delta_eff, st_, p_ok)["sigma1"]
    assert abs(sigma1) <= 1e-6
    assert p.kappa_a == 0.0


def test_second_order_coefficients_by_hand():
    p = paper_default()
    d = derive(p)
    s = solve_steady(p)
    dp = p.omega_m
    c = susceptibilities(2, dp, s, p)
    assert c["chi"] == pytest.approx(p.m * (p.omega_m**2 - 2j * p.Gamma_m * dp - 4 * dp**2), rel=1e-15)
    assert c["sigma1"] == pytest.approx(d.kappa + 1j * s.Delta_eff - 2j * dp, rel=1e-15)
    assert c["sigma2"] == pytest.approx(d.kappa - 1j * s.Delta_eff - 2j * dp, rel=1e-15)


@pytest.mark.parametrize("changes", [{}, {"Omega": 2e4}, {"Omega": -2e4}, {"G": 0.2 * KAPPA, "theta": 1.0}])
def test_dense_solve_matches_closed_form(changes):
    p = paper_default(**changes)
    sol = solve_sidebands(p, GRID)
    A1p, X1, A1m_conj, A2p = closed_form_plain(sol.steady, GRID, p)
    assert _maxrel(sol.A1_plus, A1p) <= 1e-10
    assert _maxrel(sol.X1_plus, X1) <= 1e-10
    assert _maxrel(np.conj(sol.A1_minus), A1m_conj) <= 1e-10
    assert _maxrel(sol.A2_plus, A2p) <= 1e-10


def test_standard_omit_response_without_opa():
    p = paper_default()
    d = derive(p)
    s = solve_steady(p)
    c = susceptibilities(1, GRID, s, p)
    D = 1j * 1.054571817e-34 * d.xi**2 * s.photons
    f3 = 2j * D * s.Delta_eff + c["sigma1"] * c["sigma2"] * c["chi"]
    expected = (D + c["sigma2"] * c["chi"]) * math.sqrt(d.kappa_ex) * d.probe_amplitude(GRID) / f3
    assert _maxrel(solve_sidebands(p, GRID).A1_plus, expected) <= 1e-10


def test_doubled_control_closed_form():
    p = paper_default(pump_mode=PumpMode.DOUBLE_CONTROL, G=0.2 * KAPPA, theta=0.5 * math.pi)
    sol = solve_sidebands(p, GRID)
    assert _maxrel(sol.A1_plus, closed_form_2wl_first(sol.steady, GRID, p)) <= 1e-10


def test_doubled_control_reduces_without_opa():
    p = paper_default()
    q = p.replace(pump_mode=PumpMode.DOUBLE_CONTROL)
    a, b = solve_sidebands(p, GRID), solve_sidebands(q, GRID)
    for name in ("A1_plus", "A1_minus", "X1_plus", "A2_plus", "A2_minus", "X2_plus"):
        assert _maxrel(getattr(b, name), getattr(a, name)) <= 1e-12


@pytest.mark.parametrize("pump", [PumpMode.SUM_FREQ, PumpMode.DOUBLE_CONTROL])
def test_homogeneous_without_probe(pump):
    p = paper_default(P_p=0.0, pump_mode=pump)
    sol = solve_sidebands(p, GRID)
    for name in ("A1_plus", "A1_minus", "X1_plus", "A2_plus", "A2_minus", "X2_plus"):
        assert np.all(getattr(sol, name) == 0)


def test_doubled_control_first_order_vanishes_without_probe():
    p = paper_default(P_p=0.0, pump_mode=PumpMode.DOUBLE_CONTROL, G=0.2 * KAPPA, theta=1.0)
    s = solve_steady(p)
    first = solve_first_order_2wl(s, GRID, p)
    for value in (first.A1_plus, first.A1_minus, first.X1_plus):
        assert np.all(value == 0)


def test_sumfreq_opa_drives_first_order_without_probe():
    # the summed-frequency pump beats at the probe frequency itself
    p = paper_default(P_p=0.0, G=0.2 * KAPPA)
    first = solve_first_order(solve_steady(p), GRID, p)
    assert np.all(np.abs(first.A1_plus) > 0)


@given(factor=st.sampled_from([0.25, 4.0, 1 / 16]), omega=st.floats(-6e4, 6e4))
def test_probe_scaling(factor, omega):
    p = paper_default(Omega=omega)
    q = p.replace(P_p=p.P_p * factor)
    a, b = solve_sidebands(p, GRID), solve_sidebands(q, GRID)
    r = math.sqrt(factor)
    for name in ("A1_plus", "A1_minus", "X1_plus"):
        assert _maxrel(getattr(b, name), r * getattr(a, name)) <= 1e-8
    for name in ("A2_plus", "A2_minus", "X2_plus"):
        assert _maxrel(getattr(b, name), factor * getattr(a, name)) <= 1e-8


def test_mechanical_displacement_is_real():
    sol = solve_sidebands(paper_default(Omega=2e4), GRID)
    t = np.linspace(0, 2 * math.pi / 1e8, 7)[:, None]
    x = sol.X1_plus * np.exp(-1j * GRID * t) + sol.X1_minus * np.exp(1j * GRID * t)
    assert np.max(np.abs(x.imag)) <= 1e-12 * np.max(np.abs(x))


def test_singular_system():
    with pytest.raises(SingularSystem) as info:
        solve_sidebands(paper_default(Gamma_m=0.0, P_l=0.0), 1e8)
    assert info.value.condition > 1e12


def test_scalar_and_batched_agree():
    p = paper_default(Omega=-2e4, G=0.2 * KAPPA)
    batch = solve_sidebands(p, GRID)
    one = solve_sidebands(p, float(GRID[37]))
    assert one.A2_plus == pytest.approx(batch[37].A2_plus, rel=1e-12)


def test_wideband_bath_matches_markovian():
    markov = efficiencies(solve_sidebands(paper_default(), DENSE), paper_default()).eta1
    p = paper_default(bath=NonMarkovian(2e10, 0.0))
    nm = solve_sidebands(p, DENSE)
    assert nm.regime is Regime.NON_MARKOVIAN
    assert _maxrel(efficiencies(nm, p).eta1, markov) <= 1e-2


def test_narrow_bath_restores_peak_symmetry():
    # light injected from the right, lambda_1 = 2 omega_m
    markov = paper_default(Omega=-7.7e3)
    narrow = markov.replace(bath=NonMarkovian(2e8, 0.0))
    m_peaks = _peaks(efficiencies(solve_sidebands(markov, DENSE), markov).eta1)
    n_peaks = _peaks(efficiencies(solve_sidebands(narrow, DENSE), narrow).eta1)
    assert len(m_peaks) == len(n_peaks) == 2
    assert abs(m_peaks[0] / m_peaks[1] - 1) > 0.2
    assert abs(n_peaks[0] / n_peaks[1] - 1) < 0.05


def test_doubled_control_widening_window():
    """A larger gain widens the suppression window between the two eta1 peaks."""
    base = paper_default(pump_mode=PumpMode.DOUBLE_CONTROL, Omega=0.0, theta=0.0, root_policy="nearest")

    def gap(gain):
        p = base.replace(G=gain * KAPPA)
        eta = efficiencies(solve_sidebands(p, DENSE), p).eta1
        idx = [j for j in range(1, len(eta) - 1) if eta[j] > eta[j - 1] and eta[j] >= eta[j + 1]]
        return DENSE[idx[-1]] - DENSE[idx[0]]

    assert gap(0.8) > gap(0.0)
