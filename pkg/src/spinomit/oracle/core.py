"""Time-domain oracle: integrate the mean-field equations and project onto harmonics.

The equations are integrated in scaled variables (see :mod:`._kernel`) with
an adaptive Dormand-Prince 5(4) scheme.  After a settling period of
``50/Gamma_m`` the solution is sampled in windows of whole probe beat
periods.  Consecutive windows are compared until the harmonic coefficients
stop drifting.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from ..errors import AboveThreshold, BlowUp, InvalidParams, MultipleRoots, NoConvergence, NonPeriodic, StepUnderflow
from ..model import HBAR, NonMarkovian, PhysParams, PumpMode, derive
from ..steadystate import solve_steady
from . import _kernel

HARMONICS = (-2, -1, 0, 1, 2)


@dataclass(frozen=True)
class OracleControls:
    rtol: float = 1e-10
    atol: float = 1e-12
    settle_time: Optional[float] = None  # seconds; default 50/Gamma_m
    periods: int = 32
    samples_per_period: int = 64
    max_windows: int = 60
    drift_tol: float = 1e-6
    blowup_factor: float = 1e3


@dataclass(frozen=True)
class OdeState:
    a: complex
    x: float
    v: float
    t: float


@dataclass(frozen=True)
class Trajectory:
    """Samples of the periodic orbit.

    ``windows`` consecutive windows of equal length are stored back to back;
    each window covers a whole number of beat periods.
    """

    t: np.ndarray
    a: np.ndarray
    x: np.ndarray
    v: np.ndarray
    Delta_p: float
    windows: int = 2
    steps: int = 0
    settle_windows: int = 0
    pump_mode: Optional[PumpMode] = None

    @property
    def final(self) -> OdeState:
        return OdeState(a=complex(self.a[-1]), x=float(self.x[-1]), v=float(self.v[-1]), t=float(self.t[-1]))


@dataclass(frozen=True)
class HarmonicExtract:
    """Fourier coefficients of ``a(t)`` and ``x(t)`` at ``k Delta_p``.

    ``a[k]`` multiplies ``exp(-i k Delta_p t)``, so ``a[1]`` estimates A1+
    and ``a[-1]`` estimates A1-.
    """

    a: Dict[int, complex]
    x: Dict[int, complex]
    residual_fraction: float
    drift: float
    perturbative: bool = field(default=True)

    @property
    def A1_plus(self):
        return self.a[1]

    @property
    def A1_minus(self):
        return self.a[-1]

    @property
    def A2_plus(self):
        return self.a[2]

    @property
    def A2_minus(self):
        return self.a[-2]

    @property
    def mean(self):
        return self.a[0]


def _project(t, a, x, Delta_p):
    ca = {k: complex(np.mean(a * np.exp(1j * k * Delta_p * t))) for k in HARMONICS}
    cx = {k: complex(np.mean(x * np.exp(1j * k * Delta_p * t))) for k in HARMONICS}
    return ca, cx


def _drift(prev, cur):
    floor = 1e-6 * max(abs(v) for v in cur.values())
    if floor == 0:
        return 0.0
    return max(abs(cur[k] - prev[k]) / max(abs(cur[k]), floor) for k in cur)


def extract_harmonics(trajectory: Trajectory, Delta_p: Optional[float] = None,
                      drift_tol: float = 1e-6) -> HarmonicExtract:
    """Project the last window onto ``{0, +-Delta_p, +-2 Delta_p}``.

    Raises :class:`NonPeriodic` if the coefficients of the last two windows
    differ by more than ``drift_tol`` (relative).
    """
    dp = trajectory.Delta_p if Delta_p is None else float(Delta_p)
    n = trajectory.t.size
    w = max(1, trajectory.windows)
    size = n // w
    if size == 0:
        raise InvalidParams("trajectory", "empty trajectory")
    sl = slice(n - size, n)
    t, a, x = trajectory.t[sl], np.asarray(trajectory.a[sl]), np.asarray(trajectory.x[sl])
    ca, cx = _project(t, a, x, dp)
    drift = 0.0
    if w >= 2:
        prev = slice(n - 2 * size, n - size)
        pa, _ = _project(trajectory.t[prev], np.asarray(trajectory.a[prev]), np.asarray(trajectory.x[prev]), dp)
        drift = _drift(pa, ca)
        if drift > drift_tol:
            raise NonPeriodic(drift)
    total = float(np.mean(np.abs(a) ** 2))
    lines = sum(abs(v) ** 2 for v in ca.values())
    residual = max(0.0, total - lines) / total if total > 0 else 0.0
    return HarmonicExtract(a=ca, x=cx, residual_fraction=residual, drift=drift,
                           perturbative=residual < 1e-4)


def _setup(params: PhysParams, Delta_p: float, controls: OracleControls):
    if isinstance(params.bath, NonMarkovian):
        raise InvalidParams("bath", "the oracle integrates Markovian baths only")
    if not Delta_p > 0:
        raise InvalidParams("Delta_p", "probe detuning must be positive")
    d = derive(params)
    wm = params.omega_m
    drive_l = math.sqrt(d.kappa_ex) * d.eps_l
    drive_p = math.sqrt(d.kappa_ex) * d.probe_amplitude(Delta_p)
    a_ref = max(drive_l, drive_p) / wm
    if a_ref == 0:
        a_ref = 1.0
    x_ref = HBAR * d.xi * a_ref**2 / (params.m * wm**2)
    g = 2.0 * params.G * complex(math.cos(params.theta), math.sin(params.theta))
    try:
        photons = abs(solve_steady(params, d).a_s) ** 2
    except (AboveThreshold, MultipleRoots, NoConvergence):
        photons = 0.0
    photons = max(photons, (drive_l**2 + drive_p**2) / d.kappa**2, a_ref**2)
    bound = controls.blowup_factor * photons / a_ref**2
    offset = 0.0 if params.centrifugal_detuning else d.xi * d.x_rot / wm
    p = np.array([
        d.kappa / wm,
        (params.Delta_0 + d.Delta_s) / wm,
        d.xi * x_ref / wm,
        Delta_p / wm,
        drive_l / (a_ref * wm),
        drive_p / (a_ref * wm),
        g.real / wm,
        g.imag / wm,
        1.0 if params.pump_mode is PumpMode.SUM_FREQ else 0.0,
        params.Gamma_m / wm,
        d.x_rot / x_ref,
        offset,
        bound,
    ])
    y = np.array([0.0, 0.0, d.x_rot / x_ref, 0.0])
    return p, y, a_ref, x_ref


def _check(status, t):
    if status == _kernel.BLOWUP:
        raise BlowUp(f"state bound exceeded at t = {t:.6e} (scaled time)")
    if status == _kernel.UNDERFLOW:
        raise StepUnderflow(f"step size underflow at t = {t:.6e} (scaled time)")


def integrate(params: PhysParams, Delta_p: float, controls: OracleControls | None = None,
              t_end: float | None = None) -> Trajectory:
    """Integrate from an empty cavity until the orbit is periodic.

    The cavity starts empty and the resonator starts at its rotation-only
    displacement, at rest.  ``t_end`` (seconds) overrides the settling time.
    The returned trajectory holds the last two sampling windows.
    """
    ctl = OracleControls() if controls is None else controls
    p, y, a_ref, x_ref = _setup(params, float(Delta_p), ctl)
    wm = params.omega_m
    if t_end is not None:
        settle = float(t_end) * wm
    elif ctl.settle_time is not None:
        settle = ctl.settle_time * wm
    else:
        settle = 50.0 * wm / params.Gamma_m if params.Gamma_m > 0 else 5e4
    C, A, E = _kernel.C, _kernel.A, _kernel.E
    t, h, status = _kernel.advance(0.0, settle, y, 1e-3, p, ctl.rtol, ctl.atol, C, A, E)
    _check(status, t)
    steps = max(status, 0)
    period = 2.0 * math.pi / p[3]
    n = ctl.periods * ctl.samples_per_period
    windows = []
    prev = None
    for count in range(1, ctl.max_windows + 1):
        ts = t + np.arange(1, n + 1) * (period / ctl.samples_per_period)
        out, h, ns, status = _kernel.sample(t, ts, y, h, p, ctl.rtol, ctl.atol, C, A, E)
        _check(status, t)
        steps += ns
        t = ts[-1]
        windows = (windows + [(ts, out)])[-2:]
        u = out[:, 0] + 1j * out[:, 1]
        coef, _ = _project(ts, u, out[:, 2], p[3])
        if prev is not None and _drift(prev, coef) <= ctl.drift_tol:
            break
        prev = coef
    ts = np.concatenate([w[0] for w in windows])
    out = np.concatenate([w[1] for w in windows])
    return Trajectory(
        t=ts / wm,
        a=(out[:, 0] + 1j * out[:, 1]) * a_ref,
        x=out[:, 2] * x_ref,
        v=out[:, 3] * x_ref * wm,
        Delta_p=float(Delta_p),
        windows=len(windows),
        steps=steps,
        settle_windows=count,
        pump_mode=params.pump_mode,
    )


def run_oracle(params: PhysParams, Delta_p: float, controls: OracleControls | None = None) -> HarmonicExtract:
    ctl = OracleControls() if controls is None else controls
    return extract_harmonics(integrate(params, Delta_p, ctl), Delta_p, ctl.drift_tol)
