"""Built-in sweep presets that regenerate the published figure data."""
from __future__ import annotations

import math
from typing import Callable, Dict, List, Tuple

from .errors import UnknownPreset
from .sweep import Axis, SweepSpec

PROBE = Axis.linear("Delta_p", 0.98, 1.02, 2001, "wm")
SPINS = Axis("Omega", (-2e4, 0.0, 2e4))
SPIN_MAP = Axis.linear("Omega", -6e4, 6e4, 121)
POWER = Axis.linear("P_l", 0.0, 10e-3, 201)
SPIN_DELAY = Axis.linear("Omega", -1.5e5, 1.5e5, 301)
_OPA = {
    "a": {"G": 0.0, "theta": 0.0},
    "b": {"G": "0.2kappa", "theta": 0.0},
    "c": {"G": "0.2kappa", "theta": "1.5pi"},
}


def _spec(name, description, axes, observables=("eta1", "eta2"), delta_p=1.0, **overrides):
    return SweepSpec(axes=tuple(axes), overrides=overrides, observables=tuple(observables),
                     delta_p=delta_p, name=name, description=description)


def _build() -> Dict[str, Callable[[], SweepSpec]]:
    table: Dict[str, Callable[[], SweepSpec]] = {}

    def add(name, description, axes, observables=("eta1", "eta2"), delta_p=1.0, **overrides):
        table[name] = lambda: _spec(name, description, axes, observables, delta_p, **overrides)

    for panel, opa in _OPA.items():
        surface = chr(ord(panel) + 3)
        add(f"fig2{panel}", f"eta1 spectra for Omega in {{-20, 0, 20}} kHz, OPA {opa}", [PROBE, SPINS], **opa)
        add(f"fig2{surface}", f"eta1 over Delta_p and Omega, OPA {opa}", [PROBE, SPIN_MAP], **opa)
        add(f"fig4{panel}", f"eta2 spectra for Omega in {{-20, 0, 20}} kHz, OPA {opa}", [PROBE, SPINS], **opa)
        add(f"fig4{surface}", f"eta2 over Delta_p and Omega, OPA {opa}", [PROBE, SPIN_MAP], **opa)
    add("fig3a", "eta1 for several gains, theta = 0, Omega = -20 kHz",
        [PROBE, Axis("G", (0.0, 0.2, 0.4, 0.6), "kappa")], Omega=-2e4, theta=0.0)
    add("fig3b", "eta1 over Delta_p and G, theta = 0, Omega = -20 kHz",
        [PROBE, Axis.linear("G", 0.0, 0.6, 61, "kappa")], Omega=-2e4, theta=0.0)
    add("fig3c", "eta1 for several OPA phases, G = 0.2 kappa, Omega = -20 kHz",
        [PROBE, Axis("theta", (0.0, 0.5, 1.0, 1.5), "pi")], Omega=-2e4, G="0.2kappa")
    add("fig3d", "eta1 over Delta_p and theta, G = 0.2 kappa, Omega = -20 kHz",
        [PROBE, Axis.linear("theta", 0.0, 2.0, 101, "pi")], Omega=-2e4, G="0.2kappa")
    add("fig5", "eta1 against the OPA gain at fixed probe detunings, Omega = 0, theta = 0",
        [Axis.linear("G", 0.0, 0.6, 121, "kappa"), Axis("Delta_p", (0.998, 1.0, 1.002), "wm")],
        Omega=0.0, theta=0.0)
    add("fig6a", "tau1 against control power without OPA", [POWER, SPINS], ("tau1",), G=0.0)
    add("fig6b", "tau1 against control power, G = 0.4 kappa, theta = 0", [POWER, SPINS], ("tau1",),
        G="0.4kappa", theta=0.0)
    add("fig6c", "tau1 against control power for several gains, Omega = 0",
        [POWER, Axis("G", (0.0, 0.2, 0.4, 0.6), "kappa")], ("tau1",), Omega=0.0, theta=0.0)
    add("fig6d", "tau1 against control power for several phases, G = 0.4 kappa, Omega = 0",
        [POWER, Axis("theta", (0.0, 0.5, 1.0, 1.5), "pi")], ("tau1",), Omega=0.0, G="0.4kappa")
    add("fig7", "tau1 against spin speed, G = 0.4 kappa, theta = 0, P_l = 1 mW",
        [SPIN_DELAY], ("tau1",), G="0.4kappa", theta=0.0, P_l=1e-3)
    add("fig8a", "tau1 over control power and spin speed, G = 0",
        [Axis.linear("P_l", 0.0, 10e-3, 101), Axis.linear("Omega", -6e4, 6e4, 121)], ("tau1",), G=0.0)
    add("fig8b", "tau1 over control power and OPA phase, G = 0.4 kappa, Omega = 0",
        [Axis.linear("P_l", 0.0, 10e-3, 101), Axis.linear("theta", 0.0, 2.0, 101, "pi")], ("tau1",),
        G="0.4kappa", Omega=0.0)
    dc = {"pump_mode": "DoubleControl"}
    add("2wl-gain", "doubled-control pump: spectra over Delta_p and G, theta = 0, Omega = 0",
        [PROBE, Axis.linear("G", 0.0, 0.8, 81, "kappa")], theta=0.0, Omega=0.0, root_policy="nearest", **dc)
    add("2wl-theta", "doubled-control pump: spectra over Delta_p and theta, G = 0.2 kappa, Omega = 0",
        [PROBE, Axis.linear("theta", 0.0, 2.0, 101, "pi")], G="0.2kappa", Omega=0.0, **dc)
    add("2wl-spin", "doubled-control pump: spectra over Delta_p and Omega, G = 0.2 kappa, theta = 0",
        [PROBE, SPIN_MAP], G="0.2kappa", theta=0.0, **dc)
    add("2wl-spin-theta", "doubled-control pump: spectra for Omega in {-20, 0, 20} kHz, G = 0.4 kappa, theta = pi/2",
        [PROBE, SPINS], G="0.4kappa", theta="0.5pi", **dc)
    nm = {"bath": "non-markovian", "mu": 0.0}
    add("fig10", "eta1 in a Lorentzian bath for several spectral widths, G = 0, Omega = 0",
        [PROBE, Axis("lambda_1", (0.5, 2.0, 5.0, 30.0, 200.0), "wm")], ("eta1",), G=0.0, Omega=0.0, **nm)
    add("fig10-spin", "eta1 in a Lorentzian bath for several spectral widths, G = 0, Omega = -7.7 kHz",
        [PROBE, Axis("lambda_1", (0.5, 2.0, 5.0, 30.0, 200.0), "wm")], ("eta1",), G=0.0, Omega=-7.7e3, **nm)
    add("fig12", "Markovian bath against lambda_1 = 200 omega_m, G = 0, Omega = 0",
        [PROBE, Axis("lambda_1", (math.inf, 200.0), "wm")], ("eta1",), G=0.0, Omega=0.0, **nm)
    add("fig12-left", "Markovian bath against lambda_1 = 200 omega_m, G = 0, Omega = 20 kHz",
        [PROBE, Axis("lambda_1", (math.inf, 200.0), "wm")], ("eta1",), G=0.0, Omega=2e4, **nm)
    add("fig12-right", "Markovian bath against lambda_1 = 200 omega_m, G = 0, Omega = -20 kHz",
        [PROBE, Axis("lambda_1", (math.inf, 200.0), "wm")], ("eta1",), G=0.0, Omega=-2e4, **nm)
    add("nm-spin", "eta1 over Delta_p and Omega in a Lorentzian bath, lambda_1 = 2 omega_m",
        [PROBE, SPIN_MAP], ("eta1",), G=0.0, bath="non-markovian", lambda_1="2wm", mu=0.0)
    add("nm-gain", "eta1 for several gains in a Lorentzian bath, lambda_1 = 2 omega_m",
        [PROBE, Axis("G", (0.0, 0.2, 0.4), "kappa")], ("eta1",), theta=0.0, Omega=0.0,
        bath="non-markovian", lambda_1="2wm", mu=0.0)
    return table


_PRESETS = _build()


def preset_names() -> List[str]:
    return sorted(_PRESETS)


def list_presets() -> List[Tuple[str, str]]:
    return [(name, _PRESETS[name]().description) for name in preset_names()]


def figure_preset(name: str) -> SweepSpec:
    try:
        factory = _PRESETS[name]
    except KeyError:
        raise UnknownPreset(f"unknown preset {name!r}; try one of: {', '.join(preset_names())}") from None
    return factory()
