"""Regression baselines for curves that are only shown graphically.

The stored values were written once, after the oracle checks had been run
on the same build.  Regenerate deliberately with

    SPINOMIT_REGEN_GOLDEN=1 pytest tests/test_golden.py
"""
import json
import math
import os
from pathlib import Path

import numpy as np
import pytest

from spinomit import NonMarkovian, PumpMode, derive, efficiencies, group_delay, paper_default, solve_sidebands

GOLDEN = Path(__file__).parent / "golden" / "baselines.json"
KAPPA = derive(paper_default()).kappa
PROBE = np.linspace(0.98, 1.02, 41)


def _eta(p):
    eff = efficiencies(solve_sidebands(p, PROBE * p.omega_m), p)
    out = {"eta1": eff.eta1.tolist()}
    if eff.eta2 is not None:
        out["eta2"] = eff.eta2.tolist()
    return out


def _delay_map():
    p = paper_default(G=0.0)
    return {"tau1": [[group_delay(p.replace(P_l=pl, Omega=om)).tau1 for om in (-6e4, -2e4, 0.0, 2e4, 6e4)]
                     for pl in (1e-3, 4e-3, 7e-3, 10e-3)]}


CASES = {
    "sumfreq_gain_scan": lambda: {f"G={g}": _eta(paper_default(Omega=-2e4, G=g * KAPPA))
                                  for g in (0.0, 0.2, 0.4, 0.6)},
    "sumfreq_phase_scan": lambda: {f"theta={t}pi": _eta(paper_default(Omega=-2e4, G=0.2 * KAPPA, theta=t * math.pi))
                                   for t in (0.0, 0.5, 1.0, 1.5)},
    "delay_map": _delay_map,
    "doubled_control_phase_scan": lambda: {
        f"theta={t}pi": _eta(paper_default(pump_mode=PumpMode.DOUBLE_CONTROL, G=0.2 * KAPPA, theta=t * math.pi))
        for t in (0.0, 0.5, 0.64, 1.0)},
    "narrow_bath_widths": lambda: {f"lambda_1={lam}wm": _eta(paper_default(bath=NonMarkovian(lam * 1e8, 0.0)))
                                   for lam in (0.5, 2.0, 5.0, 30.0)},
    "narrow_bath_gain": lambda: {f"G={g}": _eta(paper_default(G=g * KAPPA, bath=NonMarkovian(2e8, 0.0)))
                                 for g in (0.0, 0.2, 0.4)},
}


def _load():
    if os.environ.get("SPINOMIT_REGEN_GOLDEN"):
        GOLDEN.parent.mkdir(exist_ok=True)
        GOLDEN.write_text(json.dumps({k: fn() for k, fn in CASES.items()}, indent=1, sort_keys=True) + "\n")
    return json.loads(GOLDEN.read_text())


@pytest.fixture(scope="module")
def golden():
    return _load()


@pytest.mark.parametrize("case", sorted(CASES))
def test_matches_baseline(case, golden):
    stored, fresh = golden[case], CASES[case]()
    assert stored.keys() == fresh.keys()
    for key in stored:
        if isinstance(stored[key], dict):
            for name, values in stored[key].items():
                np.testing.assert_allclose(fresh[key][name], values, rtol=1e-9, err_msg=f"{case}/{key}/{name}")
        else:
            np.testing.assert_allclose(fresh[key], stored[key], rtol=1e-9, err_msg=f"{case}/{key}")
