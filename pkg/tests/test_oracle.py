"""Time-domain oracle checks.  Each integration takes a fraction of a second
after the first call compiles the kernel."""
import math

import numpy as np
import pytest

from spinomit import BlowUp, NonPeriodic, PumpMode, derive, paper_default, solve_sidebands, solve_steady
from spinomit.oracle import OracleControls, Trajectory, arbitrate, extract_harmonics, integrate, run_oracle

pytestmark = pytest.mark.oracle
KAPPA = derive(paper_default()).kappa
DP = 0.997e8


def _synthetic(fn, periods=32, samples=64):
    period = 2 * math.pi / DP
    t = np.arange(2 * periods * samples) * (period / samples)
    a = fn(t)
    return Trajectory(t=t, a=a, x=np.real(a), v=np.zeros_like(t), Delta_p=DP)


def test_projection_of_known_harmonics():
    ext = extract_harmonics(_synthetic(lambda t: 1 + 0.1 * np.exp(-1j * DP * t)))
    assert ext.mean == pytest.approx(1.0, abs=1e-13)
    assert ext.A1_plus == pytest.approx(0.1, abs=1e-13)
    for k in (-2, -1, 2):
        assert abs(ext.a[k]) < 1e-13
    assert ext.residual_fraction < 1e-20


def test_drifting_signal_is_not_periodic():
    with pytest.raises(NonPeriodic):
        extract_harmonics(_synthetic(lambda t: (1 + 1e4 * DP * t / 1e3) * np.exp(-1j * DP * t)))


def test_orbit_is_periodic_and_perturbative():
    ext = run_oracle(paper_default(), DP)
    assert ext.perturbative
    assert ext.residual_fraction < 1e-4
    assert ext.drift <= 1e-6


def test_displacement_stays_real():
    ext = run_oracle(paper_default(Omega=2e4), DP)
    for k in (1, 2):
        assert abs(ext.x[-k] - np.conj(ext.x[k])) <= 1e-12 * abs(ext.x[k])


def test_blowup_above_threshold():
    p = paper_default(pump_mode=PumpMode.DOUBLE_CONTROL, G=3 * KAPPA, P_p=0.0)
    with pytest.raises(BlowUp):
        integrate(p, 1e8)


def test_tolerance_halving():
    p = paper_default()
    ref = run_oracle(p, DP)
    half = run_oracle(p, DP, OracleControls(rtol=5e-11, atol=5e-13))
    for k in ref.a:
        assert abs(half.a[k] - ref.a[k]) < 1e-4 * abs(ref.a[k])


def test_upper_second_order_sideband():
    p = paper_default()
    ext = run_oracle(p, DP)
    sol = solve_sidebands(p, DP)
    err = abs(abs(ext.A2_plus) / abs(sol.A2_plus) - 1)
    assert err <= 0.02, f"|A2+| differs by {100 * err:.2f}%"


def test_truncation_error_shrinks_with_probe_power():
    def gap(p):
        ext = run_oracle(p, DP)
        sol = solve_sidebands(p, DP)
        return abs(ext.A2_plus - sol.A2_plus) / abs(sol.A2_plus)

    p = paper_default()
    full, quarter = gap(p), gap(p.replace(P_p=p.P_p / 4))
    assert quarter < full / 2


def test_first_order_with_opa():
    # a weak probe keeps the comparison inside the first-order regime
    p = paper_default(G=0.2 * KAPPA, theta=0.0, P_p=paper_default().P_p / 16)
    ext = run_oracle(p, 1e8)
    sol = solve_sidebands(p, 1e8)
    assert abs(ext.A1_plus - sol.A1_plus) / abs(sol.A1_plus) < 0.05


def test_doubled_control_mean_field():
    p = paper_default(pump_mode=PumpMode.DOUBLE_CONTROL, G=0.2 * KAPPA, theta=0.5 * math.pi, P_p=0.0)
    ext = run_oracle(p, 1e8)
    assert abs(ext.mean - solve_steady(p).a_s) <= 1e-6 * abs(ext.mean)


def test_arbitration_verdicts():
    report = arbitrate()
    assert report["chi_form"]["verdict"] == "shifted"
    assert report["chi_form"]["max_error"]["shifted"] < 0.01
    assert report["steady_2wl_form"]["verdict"] == "corrected"
