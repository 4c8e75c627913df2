import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spinomit import (
    AboveThreshold, MultipleRoots, NonMarkovian, PumpMode, Regime, derive, paper_default, solve_steady,
)
from spinomit.model import HBAR
from spinomit.steadystate import TOL, solve_steady_2wl, solve_steady_plain

KAPPA = derive(paper_default()).kappa
spins = st.floats(min_value=-6e4, max_value=6e4, allow_nan=False)
powers = st.floats(min_value=0.0, max_value=10e-3, allow_nan=False)


def _rel(a, b):
    if a == b:
        return 0.0
    return abs(a - b) / abs(b)


def test_undriven_cavity():
    p = paper_default(P_l=0.0, Omega=2e4)
    d = derive(p)
    s = solve_steady(p)
    x_rot = p.R * (p.Omega / p.omega_m) ** 2
    assert s.a_s == 0
    assert s.x_s == pytest.approx(x_rot, rel=1e-15)
    assert s.Delta_eff == pytest.approx(p.Delta_0 + d.Delta_s, rel=1e-15)


def test_undriven_cavity_with_centrifugal_detuning():
    p = paper_default(P_l=0.0, Omega=2e4, centrifugal_detuning=True)
    d = derive(p)
    s = solve_steady(p)
    assert s.Delta_eff == pytest.approx(p.Delta_0 + d.Delta_s - d.xi * d.x_rot, rel=1e-15)


def test_undriven_nonmarkovian():
    p = paper_default(P_l=0.0, bath=NonMarkovian(lambda_1=2e8, mu=0.0))
    assert solve_steady(p).a_s == 0


@given(omega=spins, power=powers)
def test_self_consistency(omega, power):
    p = paper_default(Omega=omega, P_l=power)
    d = derive(p)
    s = solve_steady(p)
    assert s.residual <= TOL
    x_rot = p.R * (omega / p.omega_m) ** 2
    assert s.x_s == pytest.approx(HBAR * d.xi * s.photons / (p.m * p.omega_m**2) + x_rot, rel=1e-14)
    # the amplitude satisfies the steady field equation at the returned detuning
    lhs = (d.kappa + 1j * s.Delta_eff) * s.a_s
    assert abs(lhs - math.sqrt(d.kappa_ex) * d.eps_l) <= 1e-12 * math.sqrt(d.kappa_ex) * d.eps_l + 1e-300
    radiation = HBAR * d.xi**2 * s.photons / (p.m * p.omega_m**2)
    assert s.Delta_eff == pytest.approx(p.Delta_0 + d.Delta_s - radiation, rel=1e-12)


@given(omega=spins, power=powers, theta=st.floats(0, 2 * math.pi))
def test_opa_off_matches_plain(omega, power, theta):
    p = paper_default(Omega=omega, P_l=power, theta=theta)
    d = derive(p)
    plain = solve_steady_plain(d, p)
    dc = solve_steady_2wl(d, p.replace(pump_mode=PumpMode.DOUBLE_CONTROL))
    assert _rel(dc.a_s, plain.a_s) <= 1e-12
    assert _rel(dc.Delta_eff, plain.Delta_eff) <= 1e-12
    assert _rel(dc.x_s, plain.x_s) <= 1e-12


@given(st.floats(min_value=1e3, max_value=6e4))
def test_photon_number_is_nonreciprocal(omega):
    right = solve_steady(paper_default(Omega=omega))
    left = solve_steady(paper_default(Omega=-omega))
    assert right.photons != left.photons
    p = paper_default()
    assert p.R * (omega / p.omega_m) ** 2 == p.R * (-omega / p.omega_m) ** 2


def test_nonreciprocity_at_20khz():
    right = solve_steady(paper_default(Omega=2e4))
    left = solve_steady(paper_default(Omega=-2e4))
    assert _rel(right.photons, left.photons) > 0.1


def test_bistability_is_reported():
    with pytest.raises(MultipleRoots) as info:
        solve_steady(paper_default(Delta_0=3e8, P_l=0.2))
    assert len(info.value.roots) == 3


def test_doubled_control_bistability_and_nearest_branch():
    p = paper_default(pump_mode=PumpMode.DOUBLE_CONTROL, G=0.6 * KAPPA)
    with pytest.raises(MultipleRoots):
        solve_steady(p)
    s = solve_steady(p.replace(root_policy="nearest"))
    assert s.residual <= TOL
    assert abs(s.Delta_eff - p.Delta_0) < 0.01 * p.omega_m


def test_above_threshold():
    with pytest.raises(AboveThreshold):
        solve_steady(paper_default(pump_mode=PumpMode.DOUBLE_CONTROL, G=3.0 * KAPPA))


FIELDS = ("n", "R", "m", "lambda_vac", "omega_m", "Gamma_m", "Q", "P_l", "P_p", "Delta_0", "Omega")


@pytest.mark.parametrize("field", FIELDS)
def test_continuity(field):
    p = paper_default(Omega=2e4)
    base = solve_steady(p)
    steps = []
    for frac in (0.01, 0.005):
        s = solve_steady(p.replace(**{field: getattr(p, field) * (1 + frac)}))
        shift = abs(s.Delta_eff - base.Delta_eff) / p.omega_m
        assert shift < 0.02
        assert abs(s.photons / base.photons - 1) < 0.05
        steps.append(shift)
    # no branch jump: halving the perturbation roughly halves the response
    if steps[0] > 0:
        assert 0.4 < steps[1] / steps[0] < 0.6


def test_wideband_bath_matches_markovian():
    plain = solve_steady(paper_default())
    for consistent in (False, True):
        nm = solve_steady(paper_default(bath=NonMarkovian(2e10, 0.0, memory_consistent=consistent)))
        assert nm.regime is Regime.NON_MARKOVIAN
        assert _rel(nm.a_s, plain.a_s) <= 1e-3
        assert _rel(nm.Delta_eff, plain.Delta_eff) <= 1e-3


def test_narrow_bath_golden_values():
    literal = solve_steady(paper_default(bath=NonMarkovian(2e8, 0.0)))
    assert literal.a_s == pytest.approx(1159.6640280890776 - 4285.699057070959j, rel=1e-10)
    shifted = solve_steady(paper_default(bath=NonMarkovian(2e8, 5e8, memory_consistent=True)))
    assert shifted.a_s == pytest.approx(759.781429689956 - 4703.348574269739j, rel=1e-10)


@pytest.mark.oracle
@pytest.mark.parametrize("changes", [
    {},
    {"Omega": -2e4},
    {"pump_mode": PumpMode.DOUBLE_CONTROL, "G": 0.2 * KAPPA, "theta": 0.0},
])
def test_time_domain_mean_field(changes):
    from spinomit.oracle import run_oracle

    p = paper_default(P_p=0.0, **changes)
    ext = run_oracle(p, p.omega_m)
    s = solve_steady(p)
    assert _rel(ext.mean, s.a_s) <= 1e-6
    for k in (-2, -1, 1, 2):
        assert abs(ext.a[k]) <= 1e-8 * abs(s.a_s)
