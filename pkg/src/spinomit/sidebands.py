"""First- and second-order sideband amplitudes.

With the ansatz

    a = a_s + A1+ e^{-i Dp t} + A1- e^{i Dp t} + A2+ e^{-2i Dp t} + A2- e^{2i Dp t}

(and the same for ``x`` with real-valued closure ``X- = conj(X+)``), each
order reduces to a 3x3 complex linear system for ``(A+, conj(A-), X+)``::

    [ s1      -g      -i xi a_s ] [A+   ]   [r1]
    [ -g*     s2      i xi a_s* ] [A-*  ] = [r2]
    [ -hb a*  -hb a   chi       ] [X+   ]   [r3]

with ``hb = hbar xi``.  ``g`` is the static OPA coupling ``2G e^{i theta}``
in the doubled-control regime and zero otherwise; in the SumFreq regime the
OPA acts through the right-hand side instead.  The non-Markovian regime
replaces ``s1, s2`` by their memory-kernel versions and scales the optical
rows by the kernel ``Lambda``.

Every routine accepts a scalar or an array of probe detunings and solves the
systems in one batched call.  Rows and columns are equilibrated before the
solve because the raw entries span some 35 orders of magnitude.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import InvalidParams, SingularSystem
from .model import HBAR, DerivedParams, PhysParams, derive
from .steadystate import Regime, SteadyState, regime_of, solve_steady

COND_LIMIT = 1e12


@dataclass(frozen=True)
class FirstOrder:
    A1_plus: Any
    A1_minus: Any
    X1_plus: Any


@dataclass(frozen=True)
class SecondOrder:
    A2_plus: Any
    A2_minus: Any
    X2_plus: Any


@dataclass(frozen=True)
class SidebandSolution:
    """Sideband amplitudes at one probe detuning or along an array of them."""

    Delta_p: Any
    A1_plus: Any
    A1_minus: Any
    X1_plus: Any
    A2_plus: Any
    A2_minus: Any
    X2_plus: Any
    regime: Regime
    steady: SteadyState
    eps_p: Any = field(default=None)

    @property
    def X1_minus(self):
        return np.conj(self.X1_plus)

    @property
    def X2_minus(self):
        return np.conj(self.X2_plus)

    def __getitem__(self, index) -> "SidebandSolution":
        pick = lambda v: v if np.ndim(v) == 0 else np.asarray(v)[index]
        return SidebandSolution(
            Delta_p=pick(self.Delta_p), A1_plus=pick(self.A1_plus), A1_minus=pick(self.A1_minus),
            X1_plus=pick(self.X1_plus), A2_plus=pick(self.A2_plus), A2_minus=pick(self.A2_minus),
            X2_plus=pick(self.X2_plus), regime=self.regime, steady=self.steady, eps_p=pick(self.eps_p),
        )


def _chi(params: PhysParams, z, Delta_p):
    last = z if params.chi_form == "shifted" else Delta_p
    return params.m * (params.omega_m**2 - 1j * params.Gamma_m * z - last**2)


def susceptibilities(n, Delta_p, steady: SteadyState, params: PhysParams, derived: DerivedParams | None = None):
    """Coefficients of the order-``n`` system at probe detuning ``Delta_p``.

    Returns a dict with ``sigma1``, ``sigma2`` and ``chi``.  In the
    non-Markovian regime ``sigma1``/``sigma2`` are the memory-kernel forms
    and the kernels ``Lambda`` (first optical row) and ``Lambda_conj``
    (second optical row) are included as well.
    """
    if n not in (1, 2):
        raise InvalidParams("n", "sideband order must be 1 or 2")
    d = derive(params) if derived is None else derived
    Delta_p = np.asarray(Delta_p, dtype=float)
    z = n * Delta_p
    kappa, Delta = d.kappa, steady.Delta_eff
    out = {"chi": _chi(params, z, Delta_p)}
    if steady.regime is Regime.NON_MARKOVIAN:
        lam, mu = params.bath.lambda_1, params.bath.mu
        Lam = lam + 1j * mu - 1j * z
        if params.bath.memory_consistent:
            Lam_c = lam - 1j * mu - 1j * z
            intrinsic = kappa - d.kappa_ex / 2.0
            out["sigma1"] = Lam * (intrinsic + 1j * Delta - 1j * z) + d.kappa_ex * lam / 2.0
            out["sigma2"] = Lam_c * (intrinsic - 1j * Delta - 1j * z) + d.kappa_ex * lam / 2.0
        else:
            Lam_c = Lam
            out["sigma1"] = kappa * lam - 1j * kappa * z / 2.0 + Lam * (1j * Delta - 1j * z)
            out["sigma2"] = kappa * lam - 1j * kappa * z / 2.0 - Lam * (1j * Delta + 1j * z)
        out["Lambda"] = Lam
        out["Lambda_conj"] = Lam_c
    else:
        out["sigma1"] = kappa + 1j * Delta - 1j * z
        out["sigma2"] = kappa - 1j * Delta - 1j * z
    return out


def _assemble(coef, steady: SteadyState, params: PhysParams, d: DerivedParams):
    a = steady.a_s
    ac = np.conj(a)
    xi = d.xi
    sigma1 = np.atleast_1d(coef["sigma1"])
    N = sigma1.shape[0]
    M = np.zeros((N, 3, 3), dtype=complex)
    L1 = np.atleast_1d(coef.get("Lambda", np.ones(N)))
    L2 = np.atleast_1d(coef.get("Lambda_conj", np.ones(N)))
    M[:, 0, 0] = sigma1
    M[:, 1, 1] = np.atleast_1d(coef["sigma2"])
    M[:, 0, 2] = -1j * xi * a * L1
    M[:, 1, 2] = 1j * xi * ac * L2
    M[:, 2, 0] = -HBAR * xi * ac
    M[:, 2, 1] = -HBAR * xi * a
    M[:, 2, 2] = np.atleast_1d(coef["chi"])
    if steady.regime is Regime.DOUBLE_CONTROL_OPA:
        g = 2.0 * params.G * np.exp(1j * params.theta)
        M[:, 0, 1] = -g
        M[:, 1, 0] = -np.conj(g)
    return M, L1, L2


def _solve_batched(M, rhs):
    """Equilibrate, check conditioning, and solve ``M x = rhs`` per batch row."""
    absM = np.abs(M)
    r = absM.max(axis=2)
    r[r == 0] = 1.0
    Mr = M / r[:, :, None]
    c = np.abs(Mr).max(axis=1)
    c[c == 0] = 1.0
    Ms = Mr / c[:, None, :]
    cond = np.linalg.cond(Ms)
    bad = ~np.isfinite(cond) | (cond > COND_LIMIT)
    if np.any(bad):
        raise SingularSystem(float(np.max(np.where(np.isfinite(cond), cond, np.inf))))
    y = np.linalg.solve(Ms, (rhs / r)[:, :, None])[:, :, 0]
    return y / c


def _squeeze(values, scalar):
    return complex(values[0]) if scalar else values


def _prepare(steady, Delta_p, params, derived, expected):
    if steady.regime not in expected:
        raise InvalidParams("regime", f"solver expects {', '.join(r.value for r in expected)}, got {steady.regime.value}")
    d = derive(params) if derived is None else derived
    scalar = np.ndim(Delta_p) == 0
    Dp = np.atleast_1d(np.asarray(Delta_p, dtype=float))
    return d, scalar, Dp


def _first(steady, Delta_p, params, derived, expected):
    d, scalar, Dp = _prepare(steady, Delta_p, params, derived, expected)
    coef = susceptibilities(1, Dp, steady, params, d)
    M, L1, _ = _assemble(coef, steady, params, d)
    source = np.sqrt(d.kappa_ex) * d.probe_amplitude(Dp)
    if steady.regime is not Regime.DOUBLE_CONTROL_OPA:
        source = source + 2.0 * params.G * np.exp(1j * params.theta) * np.conj(steady.a_s)
    rhs = np.zeros((Dp.size, 3), dtype=complex)
    rhs[:, 0] = L1 * source
    sol = _solve_batched(M, rhs)
    return FirstOrder(
        A1_plus=_squeeze(sol[:, 0], scalar),
        A1_minus=_squeeze(np.conj(sol[:, 1]), scalar),
        X1_plus=_squeeze(sol[:, 2], scalar),
    )


def _second(steady, first: FirstOrder, Delta_p, params, derived, expected):
    d, scalar, Dp = _prepare(steady, Delta_p, params, derived, expected)
    coef = susceptibilities(2, Dp, steady, params, d)
    M, L1, L2 = _assemble(coef, steady, params, d)
    A1p = np.atleast_1d(first.A1_plus)
    A1mc = np.conj(np.atleast_1d(first.A1_minus))
    X1 = np.atleast_1d(first.X1_plus)
    xi = d.xi
    r1 = 1j * xi * A1p * X1
    if steady.regime is not Regime.DOUBLE_CONTROL_OPA:
        r1 = r1 + 2.0 * params.G * np.exp(1j * params.theta) * A1mc
    rhs = np.empty((Dp.size, 3), dtype=complex)
    rhs[:, 0] = L1 * r1
    rhs[:, 1] = -1j * xi * A1mc * X1 * L2
    rhs[:, 2] = HBAR * xi * A1mc * A1p
    sol = _solve_batched(M, rhs)
    return SecondOrder(
        A2_plus=_squeeze(sol[:, 0], scalar),
        A2_minus=_squeeze(np.conj(sol[:, 1]), scalar),
        X2_plus=_squeeze(sol[:, 2], scalar),
    )


_PLAIN = (Regime.PLAIN,)
_DC = (Regime.DOUBLE_CONTROL_OPA,)
_NM = (Regime.NON_MARKOVIAN,)


def solve_first_order(steady, Delta_p, params, derived=None) -> FirstOrder:
    """Linear probe response with the OPA pumped at omega_l + omega_p.

    The OPA term ``2G e^{i theta} a*`` beats at the probe frequency.  It adds
    ``2G e^{i theta} a_s*`` to the probe drive at first order.
    """
    return _first(steady, Delta_p, params, derived, _PLAIN)


def solve_second_order(steady, first, Delta_p, params, derived=None) -> SecondOrder:
    return _second(steady, first, Delta_p, params, derived, _PLAIN)


def solve_first_order_2wl(steady, Delta_p, params, derived=None) -> FirstOrder:
    """Linear response with a static OPA coupling between A1+ and conj(A1-)."""
    return _first(steady, Delta_p, params, derived, _DC)


def solve_second_order_2wl(steady, first, Delta_p, params, derived=None) -> SecondOrder:
    """Second-order response.  A2+ and conj(A2-) are coupled and solved together."""
    return _second(steady, first, Delta_p, params, derived, _DC)


def solve_first_order_nm(steady, Delta_p, params, derived=None) -> FirstOrder:
    return _first(steady, Delta_p, params, derived, _NM)


def solve_second_order_nm(steady, first, Delta_p, params, derived=None) -> SecondOrder:
    """Second-order response in a Lorentzian bath.

    The conjugate optical row couples to ``X2+`` through ``Lambda``, the same
    structure as the first order.
    """
    return _second(steady, first, Delta_p, params, derived, _NM)


_DISPATCH = {
    Regime.PLAIN: (solve_first_order, solve_second_order),
    Regime.DOUBLE_CONTROL_OPA: (solve_first_order_2wl, solve_second_order_2wl),
    Regime.NON_MARKOVIAN: (solve_first_order_nm, solve_second_order_nm),
}


def solve_sidebands(params: PhysParams, Delta_p, steady: SteadyState | None = None,
                    derived: DerivedParams | None = None) -> SidebandSolution:
    """Steady state plus both sideband orders for the regime of ``params``."""
    d = derive(params) if derived is None else derived
    st = solve_steady(params, d) if steady is None else steady
    if st.regime is not regime_of(params):
        raise InvalidParams("regime", "steady state does not match the parameter regime")
    first_fn, second_fn = _DISPATCH[st.regime]
    first = first_fn(st, Delta_p, params, d)
    second = second_fn(st, first, Delta_p, params, d)
    return SidebandSolution(
        Delta_p=Delta_p if np.ndim(Delta_p) == 0 else np.asarray(Delta_p, dtype=float),
        A1_plus=first.A1_plus, A1_minus=first.A1_minus, X1_plus=first.X1_plus,
        A2_plus=second.A2_plus, A2_minus=second.A2_minus, X2_plus=second.X2_plus,
        regime=st.regime, steady=st, eps_p=d.probe_amplitude(Delta_p),
    )


# -- printed closed forms, kept for cross-checking the dense solves ----------

def closed_form_plain(steady, Delta_p, params, derived=None):
    """Closed-form first- and second-order amplitudes for the SumFreq regime.

    Returns ``(A1_plus, X1_plus, A1_minus_conj, A2_plus)``.  The same ``chi``
    as the dense solver is used, so the comparison isolates the algebra.
    """
    d = derive(params) if derived is None else derived
    a, Delta, xi = steady.a_s, steady.Delta_eff, d.xi
    ac = np.conj(a)
    c1 = susceptibilities(1, Delta_p, steady, params, d)
    c2 = susceptibilities(2, Delta_p, steady, params, d)
    D = 1j * HBAR * xi**2 * abs(a) ** 2
    f3_1 = 2j * D * Delta + c1["sigma1"] * c1["sigma2"] * c1["chi"]
    f3_2 = 2j * D * Delta + c2["sigma1"] * c2["sigma2"] * c2["chi"]
    f1 = 1j * D * Delta_p + c1["sigma2"] * c2["sigma2"] * c2["chi"]
    f2 = D + c2["sigma2"] * c2["chi"]
    ge = 2.0 * params.G * np.exp(1j * params.theta)
    source = np.sqrt(d.kappa_ex) * d.probe_amplitude(Delta_p) + ge * ac
    A1p = (D + c1["sigma2"] * c1["chi"]) / f3_1 * source
    X1 = HBAR * xi * ac * c1["sigma2"] / (D + c1["sigma2"] * c1["chi"]) * A1p
    A1mc = -1j * xi * ac / c1["sigma2"] * X1
    A2p = (-D * xi**2 * a * X1**2 + 1j * xi * f1 * A1p * X1
           - 2j * xi * params.G * np.exp(1j * params.theta) * ac * f2 * X1) / (c1["sigma2"] * f3_2)
    return A1p, X1, A1mc, A2p


def closed_form_2wl_first(steady, Delta_p, params, derived=None):
    """Closed-form first-order amplitude ``A1_plus`` in the doubled-control regime."""
    d = derive(params) if derived is None else derived
    a, Delta, xi = steady.a_s, steady.Delta_eff, d.xi
    c1 = susceptibilities(1, Delta_p, steady, params, d)
    D = 1j * HBAR * xi**2 * abs(a) ** 2
    G, th = params.G, params.theta
    f3 = 2j * D * Delta + c1["sigma1"] * c1["sigma2"] * c1["chi"]
    f4 = (2j * HBAR * xi**2 * G * (np.conj(a) ** 2 * np.exp(1j * th) - a**2 * np.exp(-1j * th))
          - 4 * G**2 * c1["chi"])
    return (D + c1["sigma2"] * c1["chi"]) / (f4 + f3) * np.sqrt(d.kappa_ex) * d.probe_amplitude(Delta_p)
