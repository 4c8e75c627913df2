"""Self-consistent classical steady state (a_s, x_s, Delta).

The effective detuning depends on the displacement, which depends on the
intracavity photon number, which in turn depends on the detuning.  For all
three regimes the photon number is a rational function of the detuning, so
the self-consistency condition

    g(Delta) = Delta - base + K * n(Delta) = 0,    K = hbar xi^2 / (m omega_m^2)

is equivalent to a polynomial equation.  Its real roots are used to detect
optical bistability.  The reported root itself comes from a damped
fixed-point iteration, with a bracketed ``brentq`` search as a fallback.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.optimize import brentq

from .errors import AboveThreshold, InvalidParams, MultipleRoots, NoConvergence
from .model import HBAR, DerivedParams, NonMarkovian, PhysParams, PumpMode, derive

TOL = 1e-12
MAX_ITER = 10_000


class Regime(str, enum.Enum):
    PLAIN = "Plain"
    DOUBLE_CONTROL_OPA = "DoubleControlOPA"
    NON_MARKOVIAN = "NonMarkovian"


def regime_of(params: PhysParams) -> Regime:
    if isinstance(params.bath, NonMarkovian):
        return Regime.NON_MARKOVIAN
    if params.pump_mode is PumpMode.DOUBLE_CONTROL:
        return Regime.DOUBLE_CONTROL_OPA
    return Regime.PLAIN


@dataclass(frozen=True)
class SteadyState:
    a_s: complex
    x_s: float
    Delta_eff: float
    regime: Regime
    residual: float
    iterations: int

    @property
    def photons(self) -> float:
        return abs(self.a_s) ** 2


class _Problem:
    """Regime-specific pieces of the fixed-point map, in SI units."""

    def __init__(self, d: DerivedParams, p: PhysParams, regime: Regime):
        self.d, self.p, self.regime = d, p, regime
        self.drive = math.sqrt(d.kappa_ex) * d.eps_l
        self.K = HBAR * d.xi**2 / (p.m * p.omega_m**2)
        shift = d.xi * d.x_rot if p.centrifugal_detuning else 0.0
        self.base = p.Delta_0 + d.Delta_s - shift
        self.g = 2.0 * p.G * complex(math.cos(p.theta), math.sin(p.theta))
        bath = p.bath
        if regime is Regime.NON_MARKOVIAN and bath.memory_consistent:
            lam, mu = bath.lambda_1, bath.mu
            memory = d.kappa_ex * lam / (2.0 * complex(lam, mu))
            self.loss = complex(d.kappa - d.kappa_ex / 2.0) + memory
        else:
            self.loss = complex(d.kappa)

    # -- amplitude for a given detuning -------------------------------------
    def amplitude(self, Delta):
        d, p = self.d, self.p
        if self.regime is Regime.DOUBLE_CONTROL_OPA:
            den = d.kappa**2 + Delta**2 - 4.0 * p.G**2
            num = d.kappa - 1j * Delta + self.g
            if p.steady_2wl_form == "corrected":
                num = self.drive * num
            return num / den
        return self.drive / (self.loss + 1j * Delta)

    def unstable(self, Delta) -> bool:
        if self.regime is not Regime.DOUBLE_CONTROL_OPA:
            return False
        return 4.0 * self.p.G**2 >= self.d.kappa**2 + Delta**2

    def image(self, Delta):
        """F(Delta): detuning implied by the photon number at ``Delta``."""
        return self.base - self.K * abs(self.amplitude(Delta)) ** 2

    # -- polynomial form, in units of omega_m ------------------------------
    def polynomial(self):
        w = self.p.omega_m
        b = self.base / w
        k = self.d.kappa / w
        if self.regime is Regime.DOUBLE_CONTROL_OPA:
            G = self.p.G / w
            gr, gi = self.g.real / w, self.g.imag / w
            num = P.polyadd(P.polypow([k + gr], 2), P.polypow([gi, -1.0], 2))
            den = P.polypow([k * k - 4 * G * G, 0.0, 1.0], 2)
            scale = self.drive**2 if self.p.steady_2wl_form == "corrected" else 1.0
            strength = self.K * scale / w**3
        else:
            lr, li = self.loss.real / w, self.loss.imag / w
            num = np.array([1.0])
            den = P.polyadd(P.polypow([lr], 2), P.polypow([li, 1.0], 2))
            strength = self.K * self.drive**2 / w**3
        return P.polyadd(P.polymul([-b, 1.0], den), strength * num)


def _real_roots(problem: _Problem):
    coeffs = problem.polynomial()
    roots = np.roots(coeffs[::-1])
    w = problem.p.omega_m
    found = []
    for r in roots:
        if abs(r.imag) > 1e-7 * (1.0 + abs(r.real)):
            continue
        delta = r.real * w
        if problem.unstable(delta):
            continue
        # clearing denominators can add near-real roots of the loss term; keep
        # only those that actually satisfy the fixed-point map
        if abs(problem.image(delta) - delta) > 1e-6 * (w + abs(delta)):
            continue
        if all(abs(delta - f) > 1e-9 * (w + abs(f)) for f in found):
            found.append(delta)
    return sorted(found)


def _fixed_point(problem: _Problem, start: float):
    """Damped iteration with a secant estimate of the map's slope."""
    w = problem.p.omega_m
    x = start
    fx = problem.image(x)
    x_prev = f_prev = None
    for it in range(1, MAX_ITER + 1):
        if problem.unstable(x):
            return None, it
        res = abs(fx - x) / w
        if res <= TOL:
            # a couple of extra sweeps squeeze the residual to round-off
            for _ in range(3):
                nxt = problem.image(fx)
                if abs(nxt - fx) >= abs(fx - x):
                    break
                x, fx = fx, nxt
            return x, it
        damping = 1.0
        if x_prev is not None and x != x_prev:
            slope = (fx - f_prev) / (x - x_prev)
            if slope < 1.0:
                damping = min(1.0, 1.0 / (1.0 - slope))
        x_prev, f_prev = x, fx
        x = x + damping * (fx - x)
        fx = problem.image(x)
        if not (math.isfinite(x) and math.isfinite(fx)):
            return None, it
    return None, MAX_ITER


def _bracketed(problem: _Problem, guess: float):
    resid = lambda D: D - problem.image(D)
    w = problem.p.omega_m
    step = max(1e-9 * abs(guess), 1e-9 * w)
    lo, hi = guess - step, guess + step
    for _ in range(200):
        if resid(lo) * resid(hi) <= 0:
            return brentq(resid, lo, hi, xtol=1e-15 * w, rtol=4 * np.finfo(float).eps, maxiter=500)
        step *= 2.0
        lo, hi = guess - step, guess + step
    raise NoConvergence("could not bracket the steady-state detuning", float("nan"), MAX_ITER)


def _solve(d: DerivedParams, p: PhysParams, regime: Regime) -> SteadyState:
    problem = _Problem(d, p, regime)
    start = problem.base
    if problem.unstable(start):
        raise AboveThreshold(f"4G^2 >= kappa^2 + Delta^2 at Delta = {start:.6e}")
    roots = _real_roots(problem)
    if len(roots) > 1:
        if p.root_policy == "error":
            raise MultipleRoots(roots)
        roots = [min(roots, key=lambda r: abs(r - start))]
        start = roots[0]
    Delta, iterations = _fixed_point(problem, start)
    if Delta is None:
        if not roots:
            if regime is Regime.DOUBLE_CONTROL_OPA and 2.0 * p.G >= d.kappa:
                raise AboveThreshold("no steady state below the parametric threshold")
            raise NoConvergence("fixed-point iteration failed", float("nan"), iterations)
        Delta = _bracketed(problem, roots[0])
    if problem.unstable(Delta):
        raise AboveThreshold(f"4G^2 >= kappa^2 + Delta^2 at Delta = {Delta:.6e}")
    residual = abs(problem.image(Delta) - Delta) / p.omega_m
    if residual > TOL:
        raise NoConvergence("steady-state residual above tolerance", residual, iterations)
    a_s = complex(problem.amplitude(Delta))
    x_s = HBAR * d.xi * abs(a_s) ** 2 / (p.m * p.omega_m**2) + d.x_rot
    return SteadyState(a_s=a_s, x_s=x_s, Delta_eff=float(Delta), regime=regime,
                       residual=residual, iterations=iterations)


def solve_steady_plain(d: DerivedParams, p: PhysParams) -> SteadyState:
    """Steady state for the SumFreq pump in a Markovian bath.

    The OPA term oscillates at the probe beat frequency in this regime, so it
    does not enter the steady state.
    """
    if p.pump_mode is not PumpMode.SUM_FREQ or isinstance(p.bath, NonMarkovian):
        raise InvalidParams("pump_mode", "plain steady state needs SumFreq pump and Markovian bath")
    return _solve(d, p, Regime.PLAIN)


def solve_steady_2wl(d: DerivedParams, p: PhysParams) -> SteadyState:
    """Steady state with the OPA pumped at twice the control frequency.

    Solves ``(kappa + i Delta) a - 2G e^{i theta} a* = sqrt(kappa_ex) eps_l``,
    whose solution is ``sqrt(kappa_ex) eps_l (kappa - i Delta + 2G e^{i theta})
    / (kappa^2 + Delta^2 - 4G^2)``.  With ``steady_2wl_form="literal"`` the
    drive factor is dropped, which is only useful for comparison.
    """
    if p.pump_mode is not PumpMode.DOUBLE_CONTROL:
        raise InvalidParams("pump_mode", "doubled-control steady state needs the DoubleControl pump")
    return _solve(d, p, Regime.DOUBLE_CONTROL_OPA)


def solve_steady_nonmarkov(d: DerivedParams, p: PhysParams) -> SteadyState:
    """Steady state in a Lorentzian bath.

    By default this is the Markovian expression ``sqrt(kappa_ex) eps_l /
    (kappa + i Delta)``.  With ``memory_consistent=True`` the loss rate becomes
    ``kappa - kappa_ex/2 + kappa_ex lambda_1 / (2 (lambda_1 + i mu))``, the
    zero-frequency value of the memory integral.
    """
    if not isinstance(p.bath, NonMarkovian):
        raise InvalidParams("bath", "non-Markovian steady state needs a NonMarkovian bath")
    return _solve(d, p, Regime.NON_MARKOVIAN)


def solve_steady(params: PhysParams, derived: DerivedParams | None = None) -> SteadyState:
    """Dispatch on the regime implied by ``params``."""
    d = derive(params) if derived is None else derived
    regime = regime_of(params)
    if regime is Regime.PLAIN:
        return solve_steady_plain(d, params)
    if regime is Regime.DOUBLE_CONTROL_OPA:
        return solve_steady_2wl(d, params)
    return solve_steady_nonmarkov(d, params)
