"""Parameter sweeps and record output.

A sweep has one or two axes.  The probe axis ``Delta_p`` is always given as
``Delta_p / omega_m``; other axes name a parameter (any numeric field of
:class:`~spinomit.model.PhysParams`, or the bath's ``lambda_1`` / ``mu``)
with an optional unit (``si``, ``wm``, ``kappa`` or ``pi``).  Grid points
that share every parameter except ``Delta_p`` are solved together, and
records are emitted in row-major order over the axes as declared.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .config import NUMERIC, apply_overrides, params_to_dict, parse_quantity
from .errors import ConfigError, SpinOmitError, UndefinedEfficiency
from .model import PhysParams, derive
from .observables import Efficiencies, efficiencies, group_delay, output_spectrum
from .sidebands import solve_sidebands
from .steadystate import regime_of, solve_steady

WORKERS_ENV = "SPINOMIT_WORKERS"
OBSERVABLES = ("eta1", "eta2", "tau1", "output_spectrum", "steady")
AXIS_UNITS = ("si", "wm", "kappa", "pi")
PARAM_COLUMNS = (
    "n", "R", "m", "lambda_vac", "dn_dlambda", "omega_m", "Gamma_m", "Q", "kappa_a", "kappa_ex",
    "P_l", "P_p", "Delta_0", "Omega", "G", "theta", "pump_mode", "bath", "lambda_1", "mu",
    "memory_consistent", "chi_form", "steady_2wl_form", "centrifugal_detuning",
    "root_policy",
)
COLUMNS = PARAM_COLUMNS + (
    "Delta_p", "Delta_p_over_wm", "regime",
    "eta1", "eta2", "tau1", "tau1_step", "tau1_halving_change",
    "C1_re", "C1_im", "C2_re", "C2_im", "stokes_re", "stokes_im",
    "up2_re", "up2_im", "low2_re", "low2_im",
    "a_s_re", "a_s_im", "x_s", "Delta_eff", "Delta_s",
    "steady_iterations", "steady_residual", "error",
)


@dataclass(frozen=True)
class Axis:
    name: str
    values: Tuple[float, ...]
    unit: str = "si"

    @classmethod
    def linear(cls, name: str, lo: float, hi: float, count: int, unit: str = "si") -> "Axis":
        if count < 2:
            raise ConfigError(f"axis {name!r} needs at least 2 points")
        return cls(name, tuple(float(v) for v in np.linspace(lo, hi, int(count))), unit)

    def validate(self) -> None:
        if self.name != "Delta_p" and self.name not in NUMERIC:
            raise ConfigError(f"cannot sweep {self.name!r}")
        if self.unit not in AXIS_UNITS:
            raise ConfigError(f"axis {self.name!r}: unknown unit {self.unit!r}")
        if self.name == "Delta_p" and self.unit not in ("si", "wm"):
            raise ConfigError("the Delta_p axis is always in units of omega_m")
        if len(self.values) < 2:
            raise ConfigError(f"axis {self.name!r} needs at least 2 points")

    def raw(self, value: float):
        """Override value for one grid coordinate, e.g. ``"0.2kappa"``."""
        if self.unit == "si":
            return float(value)
        return f"{float(value)!r}{self.unit}"


@dataclass(frozen=True)
class SweepSpec:
    """Sweep definition.

    ``overrides`` are applied on top of the base parameters before the axes
    (they also select the regime through ``pump_mode`` and ``bath``).
    ``delta_p`` is the probe detuning in units of omega_m used when no axis
    sweeps it.
    """

    axes: Tuple[Axis, ...]
    overrides: Mapping[str, Any] = field(default_factory=dict)
    observables: Tuple[str, ...] = ("eta1", "eta2")
    delta_p: float = 1.0
    name: str = ""
    description: str = ""

    def validate(self) -> None:
        if not 1 <= len(self.axes) <= 2:
            raise ConfigError("a sweep needs one or two axes")
        names = [a.name for a in self.axes]
        if len(set(names)) != len(names):
            raise ConfigError("duplicate sweep axis")
        for axis in self.axes:
            axis.validate()
        bad = [o for o in self.observables if o not in OBSERVABLES]
        if bad:
            raise ConfigError(f"unknown observable(s): {', '.join(bad)}")

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(len(a.values) for a in self.axes)


def parse_axis(text: str) -> Axis:
    """``name=lo:hi:count[:unit]`` or ``name=v1,v2,...[:unit]``."""
    if "=" not in text:
        raise ConfigError(f"bad axis {text!r}; expected name=lo:hi:count[:unit]")
    name, body = (s.strip() for s in text.split("=", 1))
    parts = body.split(":")
    unit = "si"
    if parts and parts[-1].strip().lower() in AXIS_UNITS:
        unit = parts.pop().strip().lower()
    if name == "Delta_p":
        unit = "wm"
    try:
        if len(parts) == 3:
            lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
            return Axis.linear(name, lo, hi, count, unit)
        if len(parts) == 1 and "," in parts[0]:
            return Axis(name, tuple(float(v) for v in parts[0].split(",")), unit)
    except ValueError as exc:
        raise ConfigError(f"bad axis {text!r}: {exc}") from exc
    raise ConfigError(f"bad axis {text!r}; expected name=lo:hi:count[:unit]")


def axis_from_mapping(doc: Mapping) -> Axis:
    try:
        name = doc["name"]
    except (KeyError, TypeError):
        raise ConfigError("each sweep axis needs a name") from None
    unit = str(doc.get("unit", "wm" if name == "Delta_p" else "si")).lower()
    if isinstance(doc.get("values"), str):
        suffix = "" if "unit" not in doc else f":{unit}"
        return parse_axis(f"{name}={doc['values']}{suffix}")
    if "values" in doc:
        return Axis(name, tuple(parse_quantity(v)[0] for v in doc["values"]), unit)
    for key in ("min", "max", "count"):
        if key not in doc:
            raise ConfigError(f"axis {name!r} is missing {key!r}")
    return Axis.linear(name, parse_quantity(doc["min"])[0], parse_quantity(doc["max"])[0], int(doc["count"]), unit)


def spec_from_mapping(doc: Mapping, name: str = "") -> SweepSpec:
    axes = tuple(axis_from_mapping(a) for a in (doc.get("axes") or ()))
    spec = SweepSpec(
        axes=axes,
        overrides=dict(doc.get("overrides") or {}),
        observables=tuple(doc.get("observables") or ("eta1", "eta2")),
        delta_p=parse_quantity(doc.get("delta_p", 1.0))[0],
        name=name,
    )
    spec.validate()
    return spec


# -- evaluation --------------------------------------------------------------

def _num(value):
    if value is None:
        return None
    if isinstance(value, (bool, str)):
        return value
    return float(value)


def _base_record(params: PhysParams) -> Dict[str, Any]:
    rec = dict.fromkeys(COLUMNS)
    rec.update(params_to_dict(params))
    return rec


def _evaluate_group(params: PhysParams, ratios: Sequence[float], observables: Sequence[str]) -> List[Dict[str, Any]]:
    """Records for one parameter point and a list of ``Delta_p / omega_m``."""
    base = _base_record(params)
    try:
        d = derive(params)
        base["regime"] = regime_of(params).value
        base["Delta_s"] = d.Delta_s
        steady = solve_steady(params, d)
    except SpinOmitError as exc:
        return [dict(base, Delta_p=r * params.omega_m, Delta_p_over_wm=r, error=f"{type(exc).__name__}: {exc}")
                for r in ratios]
    base["steady_iterations"] = steady.iterations
    base["steady_residual"] = steady.residual
    if "steady" in observables:
        base.update(a_s_re=steady.a_s.real, a_s_im=steady.a_s.imag, x_s=steady.x_s, Delta_eff=steady.Delta_eff)
    tau_error = None
    if "tau1" in observables:
        try:
            gd = group_delay(params, derived=d, steady=steady)
            base.update(tau1=gd.tau1, tau1_step=gd.step, tau1_halving_change=gd.halving_change)
        except SpinOmitError as exc:
            tau_error = f"tau1: {type(exc).__name__}: {exc}"
    grid = params.omega_m * np.asarray(ratios, dtype=float)
    want_sidebands = any(o in observables for o in ("eta1", "eta2", "output_spectrum"))
    records = []
    if want_sidebands:
        try:
            sols = [solve_sidebands(params, grid, steady=steady, derived=d)]
            split = False
        except SpinOmitError:
            sols, split = [], True
        for i, r in enumerate(ratios):
            rec = dict(base, Delta_p=float(grid[i]), Delta_p_over_wm=float(r), error=tau_error)
            try:
                sol = solve_sidebands(params, float(grid[i]), steady=steady, derived=d) if split else sols[0][i]
                _fill(rec, sol, steady, params, d, observables)
            except SpinOmitError as exc:
                msg = f"{type(exc).__name__}: {exc}"
                rec["error"] = msg if tau_error is None else f"{tau_error}; {msg}"
            records.append(rec)
    else:
        records = [dict(base, Delta_p=float(g), Delta_p_over_wm=float(r), error=tau_error)
                   for g, r in zip(grid, ratios)]
    return records


def _probe_free_limit(sol) -> bool:
    """True when every probe-induced amplitude vanishes identically.

    The efficiencies are ratios to eps_p and go to zero with it in that case,
    so a zero-probe row reports the limit instead of an error.  With the
    summed-frequency OPA the sidebands survive without a probe and the ratio
    diverges, so that case keeps the error.
    """
    amps = (sol.A1_plus, sol.A1_minus, sol.X1_plus, sol.A2_plus, sol.A2_minus)
    return all(np.all(np.asarray(a) == 0) for a in amps)


def _fill(rec, sol, steady, params, d, observables):
    if "eta1" in observables or "eta2" in observables:
        try:
            eff = efficiencies(sol, params, d)
        except UndefinedEfficiency:
            if not _probe_free_limit(sol):
                raise
            nm = sol.regime.value == "NonMarkovian"
            eff = Efficiencies(eta1=0.0, eta2=None if nm else 0.0, regime=sol.regime)
        if "eta1" in observables:
            rec["eta1"] = _num(eff.eta1)
        if "eta2" in observables:
            rec["eta2"] = _num(eff.eta2)
    if "output_spectrum" in observables and steady.regime.value != "NonMarkovian":
        out = output_spectrum(sol, steady, params, d)
        for key in ("C1", "C2", "stokes", "up2", "low2"):
            z = complex(getattr(out, key))
            rec[f"{key}_re"], rec[f"{key}_im"] = z.real, z.imag


def _task(args):
    params, ratios, observables = args
    return _evaluate_group(params, ratios, observables)


def _points(spec: SweepSpec, params: PhysParams):
    """Parameter points (without Delta_p) in row-major order, plus probe ratios."""
    param_axes = [a for a in spec.axes if a.name != "Delta_p"]
    probe_axis = next((a for a in spec.axes if a.name == "Delta_p"), None)
    ratios = list(probe_axis.values) if probe_axis else [spec.delta_p]
    groups = []
    for combo in itertools.product(*(range(len(a.values)) for a in param_axes)):
        overrides = {a.name: a.raw(a.values[i]) for a, i in zip(param_axes, combo)}
        groups.append((combo, overrides))
    return param_axes, probe_axis, ratios, groups


def resolve_workers(workers: Optional[int] = None) -> int:
    if workers is None:
        env = os.environ.get(WORKERS_ENV)
        if env:
            try:
                workers = int(env)
            except ValueError:
                raise ConfigError(f"{WORKERS_ENV} must be an integer, got {env!r}") from None
        else:
            workers = 1
    if workers < 1:
        raise ConfigError("worker count must be at least 1")
    return workers


def run_sweep(spec: SweepSpec, params: PhysParams, workers: Optional[int] = None) -> Iterator[Dict[str, Any]]:
    """Yield one record per grid point in row-major order over ``spec.axes``.

    Configuration problems raise :class:`ConfigError` before any solving.
    Solver failures at a grid point are reported in that row's ``error``
    column and leave other rows untouched.
    """
    spec.validate()
    workers = resolve_workers(workers)
    param_axes, probe_axis, ratios, groups = _points(spec, params)
    tasks = []
    for _, overrides in groups:
        point = apply_overrides(params, {**spec.overrides, **overrides})
        tasks.append((point, ratios, tuple(spec.observables)))
    if workers == 1 or len(tasks) == 1:
        results = map(_task, tasks)
    else:
        pool = ProcessPoolExecutor(max_workers=workers)
        results = pool.map(_task, tasks, chunksize=1)
    try:
        table = {}
        for (combo, _), rows in zip(groups, results):
            table[combo] = rows
    finally:
        if workers != 1 and len(tasks) != 1:
            pool.shutdown()
    order = itertools.product(*(range(len(a.values)) for a in spec.axes))
    for idx in order:
        combo = tuple(i for a, i in zip(spec.axes, idx) if a.name != "Delta_p")
        j = next((i for a, i in zip(spec.axes, idx) if a.name == "Delta_p"), 0)
        yield table[combo][j]


# -- serialisation -----------------------------------------------------------

def format_value(value) -> str:
    """Shortest round-trip text for CSV cells; ``None`` becomes empty."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def _json_value(value):
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, np.integer):
        return int(value)
    return value


def write_csv(records: Iterable[Mapping[str, Any]], stream) -> int:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(COLUMNS)
    n = 0
    for rec in records:
        writer.writerow([format_value(rec.get(c)) for c in COLUMNS])
        n += 1
    return n


def write_jsonl(records: Iterable[Mapping[str, Any]], stream) -> int:
    n = 0
    for rec in records:
        stream.write(json.dumps({c: _json_value(rec.get(c)) for c in COLUMNS}, allow_nan=False))
        stream.write("\n")
        n += 1
    return n


def write_records(records, stream, fmt: str = "csv") -> int:
    if fmt == "csv":
        return write_csv(records, stream)
    if fmt == "jsonl":
        return write_jsonl(records, stream)
    raise ConfigError(f"unknown output format {fmt!r}")


def render(records, fmt: str = "csv") -> str:
    buf = io.StringIO()
    write_records(records, buf, fmt)
    return buf.getvalue()
