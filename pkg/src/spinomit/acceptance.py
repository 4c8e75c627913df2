"""Acceptance checks shared by the ``validate`` subcommand and the test suite.

Every check returns a :class:`CriterionResult` carrying what was measured,
what was expected and the tolerance used.  Checks never raise on a failed
comparison; failure is part of the result.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np
from scipy.optimize import brentq

from .model import NonMarkovian, PhysParams, PumpMode, derive, paper_default
from .observables import efficiencies, group_delay
from .oracle import OracleControls, equivalence_grid
from .sidebands import solve_sidebands

GRID = np.linspace(0.98, 1.02, 2001)
STEP = GRID[1] - GRID[0]


@dataclass
class CriterionResult:
    id: int
    name: str
    passed: bool
    measured: Dict = field(default_factory=dict)
    expected: Dict = field(default_factory=dict)
    tolerance: str = ""
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.id:2d} {self.name}: {self.detail}"

    def to_dict(self) -> Dict:
        return asdict(self)


def _rel(measured, expected):
    return abs(measured - expected) / abs(expected)


def _spectra(params: PhysParams, grid=GRID):
    sol = solve_sidebands(params, params.omega_m * grid)
    eff = efficiencies(sol, params)
    return eff.eta1, eff.eta2


def _peaks(values, floor=0.3):
    top = np.max(values)
    return [i for i in range(1, len(values) - 1)
            if values[i] >= values[i - 1] and values[i] > values[i + 1] and values[i] >= floor * top]


def _position_ok(measured_ratio, quoted, decimals=3):
    """Peak position agreement at the precision of the quoted value, +-1 grid step."""
    rounded = round(measured_ratio, decimals)
    return abs(rounded - quoted) <= STEP * 1.0000001 or abs(measured_ratio - quoted) <= STEP * 1.0000001


def _kappa():
    return derive(paper_default()).kappa


# ---------------------------------------------------------------------------

def criterion_1() -> CriterionResult:
    d = derive(paper_default(Omega=2e4))
    ds = d.Delta_s
    ratio = derive(paper_default(Omega=-2e4)).Delta_s / 1e8
    err = _rel(ds, 1.5082e7)
    ok = err <= 1e-3
    return CriterionResult(1, "Sagnac shift", ok,
                           {"Delta_s": ds, "Delta_s_over_wm_right": ratio, "relative_error": err},
                           {"Delta_s": 1.5082e7, "Delta_s_over_wm_right": -0.1508}, "0.1% relative",
                           f"Delta_s = {ds / 1e6:.4f} MHz vs 15.082 MHz (rel err {err:.2e})")


def criterion_2() -> CriterionResult:
    eta1, eta2 = _spectra(paper_default())
    peaks = _peaks(eta1)
    peak_vals = [float(eta1[i]) for i in peaks]
    between = [i for i in range(len(GRID)) if peaks and peaks[0] < i < peaks[-1]]
    minimum = GRID[between[int(np.argmin(eta1[between]))]] if between else float("nan")
    two = len(peaks) == 2
    peaks_ok = two and all(_rel(v, 0.196) <= 0.05 for v in peak_vals)
    min_ok = two and abs(minimum - 1.0) <= 0.005
    peaks2 = _peaks(eta2)
    e2 = float(np.max(eta2))
    eta2_ok = len(peaks2) == 1 and _rel(e2, 0.0082) <= 0.05
    ok = peaks_ok and min_ok and eta2_ok
    return CriterionResult(
        2, "Baseline eta1/eta2", ok,
        {"eta1_peaks": peak_vals, "eta1_peak_positions": [float(GRID[i]) for i in peaks],
         "eta1_local_min_at": float(minimum), "eta2_peak": e2, "eta2_peak_count": len(peaks2)},
        {"eta1_peaks": [0.196, 0.196], "eta1_local_min_near": 1.0, "eta2_peak": 0.0082},
        "5% relative",
        f"eta1 peaks {[round(100 * v, 2) for v in peak_vals]}% vs 19.6% "
        f"(ok={peaks_ok}), min at {minimum:.4f} (ok={min_ok}), eta2 {100 * e2:.3f}% vs 0.82% (ok={eta2_ok})")


def criterion_3() -> CriterionResult:
    k = _kappa()
    checks = []
    e1, _ = _spectra(paper_default(Omega=2e4, G=0.2 * k))
    checks.append(("Omega=+20k, theta=0, eta1(0.997)", float(e1[np.argmin(abs(GRID - 0.997))]), 0.272))
    e1, _ = _spectra(paper_default(Omega=-2e4, G=0.2 * k))
    checks.append(("Omega=-20k, theta=0, eta1(1.004)", float(e1[np.argmin(abs(GRID - 1.004))]), 0.216))
    e1, _ = _spectra(paper_default(Omega=2e4, G=0.2 * k, theta=1.5 * math.pi))
    checks.append(("Omega=+20k, theta=3pi/2, max eta1", float(np.max(e1)), 0.374))
    e1, _ = _spectra(paper_default(Omega=-2e4, G=0.2 * k, theta=1.5 * math.pi))
    checks.append(("Omega=-20k, theta=3pi/2, max eta1", float(np.max(e1)), 0.292))
    ok = all(_rel(m, e) <= 0.05 for _, m, e in checks)
    return CriterionResult(3, "OPA enhancement (SumFreq)", ok,
                           {n: m for n, m, _ in checks}, {n: e for n, _, e in checks}, "5% relative",
                           "; ".join(f"{n}: {100 * m:.2f}% vs {100 * e:.1f}%" for n, m, e in checks))


def criterion_4() -> CriterionResult:
    k = _kappa()
    grid = np.array([1.002])
    e0, _ = _spectra(paper_default(G=0.0), grid)
    e6, _ = _spectra(paper_default(G=0.6 * k), grid)
    ratio = float(e6[0] / e0[0])
    return CriterionResult(4, "Gain scaling", ratio >= 5.0,
                           {"ratio": ratio, "eta1_G0": float(e0[0]), "eta1_G06": float(e6[0])},
                           {"ratio": ">= 5"}, "ratio >= 5",
                           f"eta1(0.6 kappa)/eta1(0) at 1.002 omega_m = {ratio:.3f}")


def _eta2_peak(params):
    _, e2 = _spectra(params)
    i = int(np.argmax(e2))
    return float(e2[i]), float(GRID[i])


def criterion_5() -> CriterionResult:
    right = _eta2_peak(paper_default(Omega=-6e4))
    left = _eta2_peak(paper_default(Omega=6e4))
    ok = (_rel(right[0], 0.0304) <= 0.05 and _position_ok(right[1], 1.003)
          and _rel(left[0], 0.0097) <= 0.05 and _position_ok(left[1], 0.999))
    return CriterionResult(
        5, "Lower-sideband nonreciprocity", ok,
        {"Omega=-60k": {"eta2": right[0], "at": right[1]}, "Omega=+60k": {"eta2": left[0], "at": left[1]}},
        {"Omega=-60k": {"eta2": 0.0304, "at": 1.003}, "Omega=+60k": {"eta2": 0.0097, "at": 0.999}},
        "5% relative; position at quoted precision +-1 grid step",
        f"-60k: {100 * right[0]:.3f}% at {right[1]:.5f} (vs 3.04% at 1.003); "
        f"+60k: {100 * left[0]:.3f}% at {left[1]:.5f} (vs 0.97% at 0.999)")


def criterion_6() -> CriterionResult:
    k = _kappa()
    g0 = _eta2_peak(paper_default(Omega=-2e4))
    g2 = _eta2_peak(paper_default(Omega=-2e4, G=0.2 * k))
    g3 = _eta2_peak(paper_default(Omega=-2e4, G=0.2 * k, theta=1.5 * math.pi))
    ok = (_rel(g0[0], 0.0108) <= 0.05 and _rel(g2[0], 0.0175) <= 0.05 and _rel(g3[0], 0.0251) <= 0.05
          and _position_ok(g2[1], 1.001))
    return CriterionResult(
        6, "eta2 OPA gains", ok,
        {"G=0": g0[0], "G=0.2k": g2[0], "G=0.2k,theta=3pi/2": g3[0], "G=0.2k_at": g2[1]},
        {"G=0": 0.0108, "G=0.2k": 0.0175, "G=0.2k,theta=3pi/2": 0.0251, "G=0.2k_at": 1.001},
        "5% relative",
        f"max eta2 {100 * g0[0]:.3f}% -> {100 * g2[0]:.3f}% (at {g2[1]:.5f}) -> {100 * g3[0]:.3f}% "
        f"vs 1.08% -> 1.75% -> 2.51%")


def _dc_scan(form="corrected"):
    k = _kappa()
    base = paper_default(pump_mode=PumpMode.DOUBLE_CONTROL, G=0.2 * k, Omega=0.0, steady_2wl_form=form)
    thetas = np.linspace(0.0, 2.0, 201)
    best1 = (-1.0, 0.0, 0.0)
    best2 = (-1.0, 0.0, 0.0)
    for th in thetas:
        e1, e2 = _spectra(base.replace(theta=th * math.pi))
        i, j = int(np.argmax(e1)), int(np.argmax(e2))
        if e1[i] > best1[0]:
            best1 = (float(e1[i]), float(th), float(GRID[i]))
        if e2[j] > best2[0]:
            best2 = (float(e2[j]), float(th), float(GRID[j]))
    at0 = float(np.max(_spectra(base.replace(theta=0.0))[0]))
    at_half = float(np.max(_spectra(base.replace(theta=0.5 * math.pi))[0]))
    return {"theta=0": at0, "theta=pi/2": at_half, "max_eta1": best1[0], "max_eta1_theta_over_pi": best1[1],
            "max_eta1_at": best1[2], "max_eta2": best2[0]}


def criterion_7() -> CriterionResult:
    m = _dc_scan("corrected")
    try:
        literal = _dc_scan("literal")
    except Exception as exc:  # report content only
        literal = {"error": f"{type(exc).__name__}: {exc}"}
    ok = (_rel(m["theta=0"], 0.0952) <= 0.10 and _rel(m["theta=pi/2"], 0.1153) <= 0.10
          and _rel(m["max_eta1"], 0.1173) <= 0.10 and abs(m["max_eta1_theta_over_pi"] - 0.64) <= 0.011
          and _position_ok(m["max_eta1_at"], 1.003) and _rel(m["max_eta2"], 0.0095) <= 0.10)
    return CriterionResult(
        7, "Doubled-control regime", ok, {"corrected": m, "literal": literal},
        {"theta=0": 0.0952, "theta=pi/2": 0.1153, "max_eta1": 0.1173, "max_eta1_theta_over_pi": 0.64,
         "max_eta1_at": 1.003, "max_eta2": 0.0095},
        "10% relative",
        f"peak {100 * m['theta=0']:.2f}% -> {100 * m['theta=pi/2']:.2f}%, global max {100 * m['max_eta1']:.2f}% "
        f"at theta={m['max_eta1_theta_over_pi']:.2f} pi, Delta_p={m['max_eta1_at']:.4f}; "
        f"max eta2 {100 * m['max_eta2']:.3f}%")


def _tau(spin):
    k = _kappa()
    return group_delay(paper_default(G=0.4 * k, theta=0.0, P_l=1e-3, Omega=spin)).tau1


def _first_crossing(sign, limit=1.5e5, step=1e3):
    speeds = np.arange(0.0, limit + step, step)
    values = [_tau(sign * s) for s in speeds]
    for i in range(len(speeds) - 1):
        if np.sign(values[i]) != np.sign(values[i + 1]):
            root = brentq(lambda s: _tau(sign * s), speeds[i], speeds[i + 1], xtol=1.0)
            return float(root), values[i] < 0
    return float("nan"), False


def criterion_8() -> CriterionResult:
    right, right_up = _first_crossing(-1)
    left, left_up = _first_crossing(+1)
    ok = _rel(right, 3e4) <= 0.10 and _rel(left, 1.01e5) <= 0.10 and right_up and left_up
    return CriterionResult(
        8, "Group-delay sign transitions", ok,
        {"right_drive_crossing": right, "left_drive_crossing": left,
         "right_fast_to_slow": right_up, "left_fast_to_slow": left_up},
        {"right_drive_crossing": 3e4, "left_drive_crossing": 1.01e5}, "+-10% on crossing speed",
        f"right drive crosses at {right / 1e3:.1f} kHz (vs 30), left drive at {left / 1e3:.1f} kHz (vs 101)")


def _nm_eta1(params, grid=GRID):
    return _spectra(params, grid)[0]


def criterion_9() -> CriterionResult:
    out = {}
    ok = True
    for spin in (-2e4, 0.0, 2e4):
        base = paper_default(Omega=spin, G=0.0)
        markov = _nm_eta1(base)
        dists = []
        for lam in (20.0, 50.0, 200.0):
            nm = _nm_eta1(base.replace(bath=NonMarkovian(lambda_1=lam * 1e8, mu=0.0)))
            dists.append(float(np.max(np.abs(nm - markov) / markov)))
        monotone = dists[0] > dists[1] > dists[2]
        ok = ok and dists[2] <= 0.01 and monotone
        out[f"Omega={spin:g}"] = {"max_rel_diff_20_50_200": dists, "monotone": monotone}
    worst = max(v["max_rel_diff_20_50_200"][2] for v in out.values())
    return CriterionResult(9, "Markovian limit", ok, out,
                           {"max_rel_diff_at_200": "<= 0.01", "monotone": True}, "1% pointwise relative",
                           f"worst pointwise relative gap at lambda_1 = 200 omega_m: {100 * worst:.3f}%")


def criterion_10() -> CriterionResult:
    base = paper_default(G=0.0, Omega=0.0)
    diffs = {}
    for lam in (2.0, 200.0):
        a = _nm_eta1(base.replace(bath=NonMarkovian(lambda_1=lam * 1e8, mu=0.0)))
        b = _nm_eta1(base.replace(bath=NonMarkovian(lambda_1=lam * 1e8, mu=5e8)))
        diffs[lam] = float(np.max(np.abs(a - b) / a))
    ok = diffs[2.0] > 0.10 and diffs[200.0] <= 0.01
    # informational: the same comparison with the memory-consistent steady state
    a = _nm_eta1(base.replace(bath=NonMarkovian(lambda_1=2e10, mu=0.0, memory_consistent=True)))
    b = _nm_eta1(base.replace(bath=NonMarkovian(lambda_1=2e10, mu=5e8, memory_consistent=True)))
    consistent = float(np.max(np.abs(a - b) / a))
    return CriterionResult(10, "mu sensitivity", ok,
                           {"lambda_1=2wm": diffs[2.0], "lambda_1=200wm": diffs[200.0],
                            "lambda_1=200wm_memory_consistent": consistent},
                           {"lambda_1=2wm": "> 0.10", "lambda_1=200wm": "<= 0.01"}, "pointwise relative",
                           f"mu=0 vs 5 omega_m: {100 * diffs[2.0]:.1f}% at lambda_1=2 omega_m, "
                           f"{100 * diffs[200.0]:.2f}% at 200 omega_m "
                           f"({100 * consistent:.2f}% with the memory-consistent steady state)")


def criterion_11(controls: Optional[OracleControls] = None) -> CriterionResult:
    results = equivalence_grid(controls=controls)
    ok = all(r["passed"] for r in results)
    worst = max(r["max_relative_error"] for r in results)
    summary = {f"{r['pump_mode']}/G={r['G_over_kappa']}/Omega={r['Omega']:g}": r["max_relative_error"]
               for r in results}
    return CriterionResult(11, "Oracle equivalence", ok, {"max_relative_error": summary, "details": results},
                           {"max_relative_error": "<= 0.03"}, "3% relative at eta1 peaks",
                           f"worst eta1 gap {100 * worst:.2f}% over {len(results)} configurations")


def criterion_12() -> CriterionResult:
    base = paper_default(G=0.0)
    grid = base.omega_m * np.linspace(0.98, 1.02, 21)
    full = solve_sidebands(base, grid)
    quarter = solve_sidebands(base.replace(P_p=base.P_p / 4.0), grid)
    # quartering the power halves eps_p up to the tiny probe-frequency factor, which cancels here
    ratio_eps = full.eps_p / quarter.eps_p
    e1 = float(np.max(np.abs(full.A1_plus / quarter.A1_plus / ratio_eps - 1)))
    e1m = float(np.max(np.abs(full.A1_minus / quarter.A1_minus / ratio_eps - 1)))
    e2 = float(np.max(np.abs(full.A2_plus / quarter.A2_plus / ratio_eps**2 - 1)))
    e2m = float(np.max(np.abs(full.A2_minus / quarter.A2_minus / ratio_eps**2 - 1)))
    worst = max(e1, e1m, e2, e2m)
    return CriterionResult(12, "Perturbative scaling", worst <= 1e-8,
                           {"A1_plus": e1, "A1_minus": e1m, "A2_plus": e2, "A2_minus": e2m},
                           {"max_deviation": "<= 1e-8"}, "1e-8 relative",
                           f"largest deviation from linear/quadratic scaling {worst:.2e}")


CRITERIA: Dict[int, Callable[[], CriterionResult]] = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5, 6: criterion_6,
    7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10, 11: criterion_11, 12: criterion_12,
}


def run_all(skip_oracle: bool = False) -> List[CriterionResult]:
    out = []
    for key, fn in CRITERIA.items():
        if skip_oracle and key == 11:
            continue
        out.append(fn())
    return out


def validate(skip_oracle: bool = False) -> Dict:
    results = run_all(skip_oracle)
    return {"passed": all(r.passed for r in results), "criteria": [r.to_dict() for r in results]}
