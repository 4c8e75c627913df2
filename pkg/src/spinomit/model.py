"""Physical parameters, unit conventions and derived quantities.

Unit convention
---------------
The cavity resonance is computed as ``omega_0 = 2*pi*c/lambda_vac`` (rad/s).
Every other frequency-like parameter (``omega_m``, ``Gamma_m``, ``Omega``,
``G``, ``Delta_0``, ``lambda_1``, ``mu``) is a raw SI value in s^-1 with no
hidden factor of 2*pi: "omega_m = 100 MHz" means ``omega_m = 1e8``.  This is
the only reading under which a 20 kHz spin gives a Sagnac shift of roughly
0.15 omega_m.

Model variants
--------------
A few formula choices are switchable so the time-domain oracle can
arbitrate between them:

``chi_form``
    ``"shifted"`` evaluates the mechanical susceptibility as
    ``m(omega_m^2 - i Gamma_m z - z^2)`` at ``z = n Delta_p``;
    ``"literal"`` keeps ``Delta_p^2`` as the last term for both orders.
``steady_2wl_form``
    ``"corrected"`` includes the drive factor ``sqrt(kappa_ex) eps_l`` in
    the doubled-control steady state, ``"literal"`` omits it.
``centrifugal_detuning``
    When true the rotation-induced displacement ``R (Omega/omega_m)^2``
    enters the optical detuning together with the radiation-pressure part.
    When false it still appears in ``x_s`` but does not shift the cavity.
``root_policy``
    ``"error"`` raises :class:`MultipleRoots` when the steady state is
    bistable.  ``"nearest"`` keeps the root closest to the empty-cavity
    detuning, which is the branch reached when the cavity fills from empty.
"""
from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Union

from .errors import InvalidParams

# Pinned physical constants.
CONSTANTS = {
    "c": 2.99792458e8,  # m/s
    "hbar": 1.054571817e-34,  # J s
}
C_LIGHT = CONSTANTS["c"]
HBAR = CONSTANTS["hbar"]


class PumpMode(str, enum.Enum):
    """Frequency of the OPA pump."""

    SUM_FREQ = "SumFreq"  # omega_g = omega_l + omega_p
    DOUBLE_CONTROL = "DoubleControl"  # omega_g = 2 omega_l

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "").replace("_", "")
        for member in cls:
            if member.value.lower() == key:
                return member
        aliases = {"sum": cls.SUM_FREQ, "double": cls.DOUBLE_CONTROL, "2wl": cls.DOUBLE_CONTROL}
        if key in aliases:
            return aliases[key]
        raise InvalidParams("pump_mode", f"unknown pump mode {value!r}")


@dataclass(frozen=True)
class Markovian:
    """Memoryless (wideband) optical bath."""

    name = "Markovian"


@dataclass(frozen=True)
class NonMarkovian:
    """Lorentzian bath with spectral width ``lambda_1`` and decay ``mu`` (rad/s).

    ``memory_consistent`` selects the variant in which the zero-frequency
    memory integral also enters the steady state and the conjugate
    equation uses the conjugate kernel.
    """

    lambda_1: float
    mu: float = 0.0
    memory_consistent: bool = False
    name = "NonMarkovian"


Bath = Union[Markovian, NonMarkovian]

CHI_FORMS = ("shifted", "literal")
STEADY_2WL_FORMS = ("corrected", "literal")
ROOT_POLICIES = ("error", "nearest")


@dataclass(frozen=True)
class PhysParams:
    """Raw physical parameters in SI units.

    ``kappa_a`` and ``kappa_ex`` default to ``None``, meaning ``omega_0/Q``
    each.  The remaining defaults reproduce the reference device: a silica
    sphere of radius 0.25 mm driven at 1550 nm with 1 mW of control power.
    """

    n: float = 1.44
    R: float = 0.25e-3
    m: float = 25e-12
    lambda_vac: float = 1550e-9
    dn_dlambda: float = 0.0
    omega_m: float = 1e8
    Gamma_m: float = 1e5
    Q: float = 4.5e7
    kappa_a: Optional[float] = None
    kappa_ex: Optional[float] = None
    P_l: float = 1e-3
    P_p: float = 0.05e-3
    Delta_0: float = 1e8
    Omega: float = 0.0
    G: float = 0.0
    theta: float = 0.0
    pump_mode: PumpMode = PumpMode.SUM_FREQ
    bath: Bath = field(default_factory=Markovian)
    chi_form: str = "shifted"
    steady_2wl_form: str = "corrected"
    centrifugal_detuning: bool = True
    root_policy: str = "error"

    def replace(self, **changes) -> "PhysParams":
        return dataclasses.replace(self, **changes)

    def validate(self) -> None:
        """Raise :class:`InvalidParams` naming the first offending field."""
        finite = ("n", "R", "m", "lambda_vac", "dn_dlambda", "omega_m", "Gamma_m", "Q",
                  "P_l", "P_p", "Delta_0", "Omega", "G", "theta")
        for name in finite:
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise InvalidParams(name, f"must be a finite number, got {value!r}")
        if not self.n > 1:
            raise InvalidParams("n", "refractive index must exceed 1")
        for name in ("R", "m", "Q", "lambda_vac", "omega_m"):
            if not getattr(self, name) > 0:
                raise InvalidParams(name, "must be positive")
        for name in ("P_l", "P_p", "G", "Gamma_m"):
            if getattr(self, name) < 0:
                raise InvalidParams(name, "must be non-negative")
        for name in ("kappa_a", "kappa_ex"):
            value = getattr(self, name)
            if value is not None and not (math.isfinite(value) and value >= 0):
                raise InvalidParams(name, "must be a finite non-negative rate")
        if not isinstance(self.pump_mode, PumpMode):
            raise InvalidParams("pump_mode", f"expected PumpMode, got {self.pump_mode!r}")
        if isinstance(self.bath, NonMarkovian):
            if not (math.isfinite(self.bath.lambda_1) and self.bath.lambda_1 > 0):
                raise InvalidParams("lambda_1", "spectral width must be positive")
            if not (math.isfinite(self.bath.mu) and self.bath.mu >= 0):
                raise InvalidParams("mu", "reservoir decay must be non-negative")
            if self.pump_mode is not PumpMode.SUM_FREQ:
                raise InvalidParams("bath", "the non-Markovian model is defined for the SumFreq pump only")
        elif not isinstance(self.bath, Markovian):
            raise InvalidParams("bath", f"unknown bath {self.bath!r}")
        if self.chi_form not in CHI_FORMS:
            raise InvalidParams("chi_form", f"expected one of {CHI_FORMS}")
        if self.steady_2wl_form not in STEADY_2WL_FORMS:
            raise InvalidParams("steady_2wl_form", f"expected one of {STEADY_2WL_FORMS}")
        if self.root_policy not in ROOT_POLICIES:
            raise InvalidParams("root_policy", f"expected one of {ROOT_POLICIES}")


def sagnac_shift(n, R, Omega, omega_0, lambda_vac, dn_dlambda=0.0):
    """Sagnac-Fizeau shift of the co-rotating mode in rad/s.

    Positive ``Omega`` (light injected from the left) gives a positive shift.
    """
    dispersion = (lambda_vac / n) * dn_dlambda if dn_dlambda else 0.0
    return n * R * Omega * omega_0 / C_LIGHT * (1.0 - 1.0 / n**2 - dispersion)


@dataclass(frozen=True)
class DerivedParams:
    """Quantities computed once from :class:`PhysParams`.

    ``eps_p`` is evaluated at the nominal probe detuning ``Delta_p = omega_m``;
    solvers that sweep the probe call :meth:`probe_amplitude` instead.
    """

    omega_0: float
    omega_l: float
    kappa: float
    kappa_a: float
    kappa_ex: float
    xi: float
    eps_l: float
    eps_p: float
    x_zpf: float
    Delta_s: float
    p_phi: float
    x_rot: float
    P_p: float

    def probe_amplitude(self, Delta_p):
        """Probe amplitude sqrt(P_p / hbar omega_p) with omega_p = omega_l + Delta_p."""
        return (self.P_p / (HBAR * (self.omega_l + Delta_p))) ** 0.5


def derive(params: PhysParams) -> DerivedParams:
    params.validate()
    omega_0 = 2.0 * math.pi * C_LIGHT / params.lambda_vac
    omega_l = omega_0 - params.Delta_0
    if omega_l <= 0:
        raise InvalidParams("Delta_0", "control frequency omega_0 - Delta_0 must be positive")
    kappa_a = omega_0 / params.Q if params.kappa_a is None else float(params.kappa_a)
    kappa_ex = omega_0 / params.Q if params.kappa_ex is None else float(params.kappa_ex)
    kappa = (kappa_a + kappa_ex) / 2.0
    if kappa <= 0:
        raise InvalidParams("kappa_a", "total loss rate must be positive")
    omega_p = omega_l + params.omega_m
    return DerivedParams(
        omega_0=omega_0,
        omega_l=omega_l,
        kappa=kappa,
        kappa_a=kappa_a,
        kappa_ex=kappa_ex,
        xi=omega_0 / params.R,
        eps_l=math.sqrt(params.P_l / (HBAR * omega_l)),
        eps_p=math.sqrt(params.P_p / (HBAR * omega_p)),
        x_zpf=math.sqrt(HBAR / (2.0 * params.m * params.omega_m)),
        Delta_s=sagnac_shift(params.n, params.R, params.Omega, omega_0,
                             params.lambda_vac, params.dn_dlambda),
        p_phi=params.m * params.R**2 * params.Omega,
        x_rot=params.R * (params.Omega / params.omega_m) ** 2,
        P_p=params.P_p,
    )


def paper_default(**changes) -> PhysParams:
    """Reference device with the rotation term kept out of the optical detuning.

    This is the configuration whose spectra match the published efficiency
    values; see the module docstring for what ``centrifugal_detuning`` does.
    """
    base = PhysParams(centrifugal_detuning=False)
    return base.replace(**changes) if changes else base


def bath_label(bath: Bath) -> str:
    return bath.name
