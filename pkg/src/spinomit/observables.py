"""Measurable quantities derived from the sideband amplitudes."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np

from .errors import InvalidParams, PhaseWrap, UndefinedEfficiency
from .model import DerivedParams, PhysParams, derive
from .sidebands import SidebandSolution, solve_sidebands
from .steadystate import Regime, SteadyState, regime_of, solve_steady

DEFAULT_STEP = 1e-6  # in units of omega_m
STEP_FLOOR = 1e-10
MAX_STENCIL_JUMP = math.pi / 2


@dataclass(frozen=True)
class Efficiencies:
    """Second-order sideband efficiencies.

    ``eta2`` is ``None`` in the non-Markovian regime, where only the upper
    sideband efficiency is defined.
    """

    eta1: Any
    eta2: Any
    regime: Regime


@dataclass(frozen=True)
class OutputSpectrum:
    C1: complex
    C2: Any
    stokes: Any
    up2: Any
    low2: Any


@dataclass(frozen=True)
class GroupDelay:
    tau1: float
    step: float
    halving_change: float = float("nan")


def _eps(sol: SidebandSolution, d: DerivedParams):
    eps = sol.eps_p if sol.eps_p is not None else d.probe_amplitude(sol.Delta_p)
    if np.any(np.asarray(eps) == 0):
        raise UndefinedEfficiency("probe power is zero; efficiencies are undefined")
    return eps


def upper_transmission(sol: SidebandSolution, params: PhysParams, derived: DerivedParams | None = None):
    """Complex output amplitude of the upper second-order sideband over ``eps_p``.

    This is ``-sqrt(kappa_ex) A2+ / eps_p`` for Markovian baths.  In a
    Lorentzian bath the output is filtered by the kernel evaluated at
    ``2 Delta_p``.
    """
    d = derive(params) if derived is None else derived
    eps = _eps(sol, d)
    amp = -math.sqrt(d.kappa_ex) * np.asarray(sol.A2_plus) / eps
    if sol.regime is Regime.NON_MARKOVIAN:
        lam, mu = params.bath.lambda_1, params.bath.mu
        amp = amp * lam / (lam + 1j * mu - 2j * np.asarray(sol.Delta_p))
    return amp if np.ndim(amp) else complex(amp)


def efficiencies(sol: SidebandSolution, params: PhysParams, derived: DerivedParams | None = None) -> Efficiencies:
    d = derive(params) if derived is None else derived
    eta1 = np.abs(upper_transmission(sol, params, d))
    if sol.regime is Regime.NON_MARKOVIAN:
        eta2 = None
    else:
        eta2 = np.abs(math.sqrt(d.kappa_ex) * np.asarray(sol.A2_minus) / _eps(sol, d))
    if np.ndim(eta1) == 0:
        eta1 = float(eta1)
        eta2 = None if eta2 is None else float(eta2)
    return Efficiencies(eta1=eta1, eta2=eta2, regime=sol.regime)


def output_spectrum(sol: SidebandSolution, steady: SteadyState, params: PhysParams,
                    derived: DerivedParams | None = None) -> OutputSpectrum:
    """Output field components at omega_l, omega_p, 2w_l-w_p, 2w_p-w_l and 3w_l-2w_p."""
    if sol.regime is Regime.NON_MARKOVIAN:
        raise InvalidParams("bath", "output spectrum is defined for Markovian baths only")
    d = derive(params) if derived is None else derived
    s = math.sqrt(d.kappa_ex)
    eps = sol.eps_p if sol.eps_p is not None else d.probe_amplitude(sol.Delta_p)
    return OutputSpectrum(
        C1=d.eps_l - s * steady.a_s,
        C2=eps - s * np.asarray(sol.A1_plus),
        stokes=-s * np.asarray(sol.A1_minus),
        up2=-s * np.asarray(sol.A2_plus),
        low2=-s * np.asarray(sol.A2_minus),
    )


def omit_linewidth(steady: SteadyState, params: PhysParams, derived: DerivedParams | None = None) -> float:
    """Approximate OMIT linewidth ``Gamma_m + xi^2 x_zpf^2 |a_s|^2 / kappa``."""
    d = derive(params) if derived is None else derived
    return params.Gamma_m + d.xi**2 * d.x_zpf**2 * abs(steady.a_s) ** 2 / d.kappa


def _transmission_at(params, d, steady, points):
    sol = solve_sidebands(params, np.asarray(points), steady=steady, derived=d)
    return upper_transmission(sol, params, d)


def phase_derivative(params: PhysParams, at: float | None = None, step: float | None = None,
                     derived: DerivedParams | None = None, steady: SteadyState | None = None):
    """d arg(T)/d Delta_p of the upper-sideband transmission ``T``.

    Central difference with the phase unwrapped along the stencil.  The step
    is reduced by 4x whenever one half of the stencil turns the phase by more
    than pi/2.  Returns ``(derivative, step_used, halving_change)``.
    """
    d = derive(params) if derived is None else derived
    st = solve_steady(params, d) if steady is None else steady
    centre = params.omega_m if at is None else float(at)
    h = DEFAULT_STEP * params.omega_m if step is None else float(step)
    floor = STEP_FLOOR * params.omega_m
    while True:
        pts = centre + np.array([-h, -h / 2, 0.0, h / 2, h])
        T = _transmission_at(params, d, st, pts)
        if np.any(T == 0) or not np.all(np.isfinite(T)):
            raise PhaseWrap("upper-sideband amplitude vanishes on the stencil")
        jumps = np.angle(T[1:] / T[:-1])
        if np.max(np.abs(jumps)) <= MAX_STENCIL_JUMP:
            break
        h /= 4.0
        if h < floor:
            raise PhaseWrap(f"phase still jumps by {np.max(np.abs(jumps)):.3f} rad at step {h:.3e}")
    coarse = (jumps[0] + jumps[1] + jumps[2] + jumps[3]) / (2.0 * h)
    fine = (jumps[1] + jumps[2]) / h
    change = abs(coarse - fine) / abs(fine) if fine != 0 else float("inf")
    return coarse, h, change


def group_delay(params: PhysParams, regime: Optional[Regime] = None, at: float | None = None,
                step: float | None = None, derived: DerivedParams | None = None,
                steady: SteadyState | None = None) -> GroupDelay:
    """Group delay of the upper second-order sideband at ``Delta_p = omega_m``.

    Positive values mean slow light.  ``halving_change`` is the relative
    change in the derivative when the step is halved.
    """
    if regime is not None and Regime(regime) is not regime_of(params):
        raise InvalidParams("regime", "requested regime does not match the parameters")
    dphi, h, change = phase_derivative(params, at=at, step=step, derived=derived, steady=steady)
    return GroupDelay(tau1=float(dphi / 2.0), step=h, halving_change=float(change))


def half_height_width(x, y):
    """Full width at half height of the highest peak of ``y`` above ``min(y)``.

    Crossings are located by quadratic interpolation through three grid
    points around each crossing.  Returns ``nan`` if the peak is not
    bracketed on both sides.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    i = int(np.argmax(y))
    level = y.min() + 0.5 * (y[i] - y.min())

    def crossing(j0, j1):
        # j0 above level, j1 below (adjacent)
        lo = max(0, min(j0, j1) - 1)
        lo = min(lo, len(x) - 3)
        xs, ys = x[lo:lo + 3], y[lo:lo + 3] - level
        coeffs = np.polyfit(xs - x[j0], ys, 2)
        roots = np.roots(coeffs)
        a, b = sorted((x[j0], x[j1]))
        cands = [r.real + x[j0] for r in roots if abs(r.imag) < 1e-12 * (1 + abs(r.real))]
        cands = [c for c in cands if a - 1e-15 <= c <= b + 1e-15]
        if cands:
            return cands[0]
        return x[j0] + (x[j1] - x[j0]) * (y[j0] - level) / (y[j0] - y[j1])

    left = i
    while left > 0 and y[left - 1] > level:
        left -= 1
    right = i
    while right < len(y) - 1 and y[right + 1] > level:
        right += 1
    if left == 0 or right == len(y) - 1:
        return float("nan")
    return float(crossing(right, right + 1) - crossing(left, left - 1))


def window_fwhm(params: PhysParams, span: float = 0.03, count: int = 6001) -> float:
    """Width of the probe transparency window in |C2/eps_p|^2 (rad/s)."""
    d = derive(params)
    grid = params.omega_m * np.linspace(1 - span, 1 + span, count)
    st = solve_steady(params, d)
    sol = solve_sidebands(params, grid, steady=st, derived=d)
    spec = output_spectrum(sol, st, params, d)
    T = np.abs(spec.C2 / sol.eps_p) ** 2
    return half_height_width(grid, T)
