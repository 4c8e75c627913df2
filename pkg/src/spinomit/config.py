"""YAML configuration files and override parsing.

A config file has nested sections whose keys are :class:`PhysParams` field
names::

    resonator: {n: 1.44, R: 0.25e-3, m: 25e-12, lambda_vac: 1550e-9, Q: 4.5e7}
    mechanics: {omega_m: 1e8, Gamma_m: 1e5}
    drive:     {P_l: 1e-3, P_p: 5e-5, Delta_0: 1wm}
    rotation:  {Omega: 2e4, centrifugal_detuning: false}
    opa:       {G: 0.2kappa, theta: 1.5pi, pump_mode: SumFreq}
    bath:      {type: non-markovian, lambda_1: 200wm, mu: 0}
    model:     {chi_form: shifted, steady_2wl_form: corrected}
    sweep:     {axes: [...], observables: [eta1, eta2], delta_p: 1.0}

Numbers may carry one unit suffix.  ``wm`` multiplies by ``omega_m``,
``kappa`` by the total loss rate, and ``pi`` by pi.  Everything else is SI.
"""
from __future__ import annotations

import dataclasses
import math
import re
from typing import Any, Dict, Mapping, Optional, Tuple

import yaml

from .errors import ConfigError, InvalidParams
from .model import Markovian, NonMarkovian, PhysParams, PumpMode, derive, paper_default

SECTIONS = {
    "resonator": ("n", "R", "m", "lambda_vac", "dn_dlambda", "Q", "kappa_a", "kappa_ex"),
    "mechanics": ("omega_m", "Gamma_m"),
    "drive": ("P_l", "P_p", "Delta_0"),
    "rotation": ("Omega", "centrifugal_detuning"),
    "opa": ("G", "theta", "pump_mode"),
    "bath": ("type", "lambda_1", "mu", "memory_consistent"),
    "model": ("chi_form", "steady_2wl_form", "root_policy"),
}
NUMERIC = ("n", "R", "m", "lambda_vac", "dn_dlambda", "omega_m", "Gamma_m", "Q", "kappa_a",
           "kappa_ex", "P_l", "P_p", "Delta_0", "Omega", "G", "theta", "lambda_1", "mu")
BOOLEAN = ("centrifugal_detuning", "memory_consistent")
CHOICE = ("pump_mode", "chi_form", "steady_2wl_form", "root_policy", "bath")
KNOWN = set(NUMERIC) | set(BOOLEAN) | set(CHOICE)
UNITS = ("wm", "kappa", "pi")

_NUMBER = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?|[-+]?inf)\s*([a-zA-Z]*)\s*$")


def parse_quantity(value) -> Tuple[float, Optional[str]]:
    """Split ``"0.2kappa"`` into ``(0.2, "kappa")``; plain numbers give unit ``None``."""
    if isinstance(value, bool):
        raise ConfigError(f"expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value), None
    match = _NUMBER.match(str(value))
    if not match:
        raise ConfigError(f"cannot parse number {value!r}")
    number, unit = match.groups()
    unit = unit.lower() or None
    if unit is not None and unit not in UNITS:
        raise ConfigError(f"unknown unit {unit!r} in {value!r} (allowed: {', '.join(UNITS)})")
    return float(number), unit


def parse_bool(value) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {value!r}")


def parse_bath_spec(text: str) -> Dict[str, Any]:
    """``markovian`` or ``lambda1=200wm,mu=0[,consistent=true]`` as override keys."""
    text = str(text).strip()
    if text.lower() in ("markovian", "markov"):
        return {"bath": "markovian"}
    out: Dict[str, Any] = {"bath": "non-markovian"}
    for part in filter(None, (p.strip() for p in text.split(","))):
        if "=" not in part:
            raise ConfigError(f"bad bath item {part!r}; expected key=value")
        key, val = (s.strip() for s in part.split("=", 1))
        key = {"lambda1": "lambda_1", "lambda_1": "lambda_1", "mu": "mu",
               "consistent": "memory_consistent", "memory_consistent": "memory_consistent"}.get(key.lower())
        if key is None:
            raise ConfigError(f"unknown bath key in {part!r}")
        out[key] = val
    return out


def flatten(doc: Mapping) -> Dict[str, Any]:
    """Flatten a nested config document into ``{field: raw value}``."""
    if doc is None:
        return {}
    if not isinstance(doc, Mapping):
        raise ConfigError("config root must be a mapping")
    flat: Dict[str, Any] = {}
    for section, body in doc.items():
        if section == "sweep":
            continue
        if section not in SECTIONS:
            raise ConfigError(f"unknown config section {section!r}")
        if not isinstance(body, Mapping):
            raise ConfigError(f"section {section!r} must be a mapping")
        for key, value in body.items():
            if key not in SECTIONS[section]:
                raise ConfigError(f"unknown key {key!r} in section {section!r}")
            flat["bath" if (section, key) == ("bath", "type") else key] = value
    return flat


def load_config(path) -> Tuple[Dict[str, Any], Optional[dict]]:
    """Read a YAML config; returns ``(flat overrides, sweep section or None)``."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {path}: {exc}") from exc
    doc = doc or {}
    sweep = doc.get("sweep") if isinstance(doc, Mapping) else None
    return flatten(doc), sweep


def _unit_scale(unit, params: PhysParams, field: str) -> float:
    if unit is None:
        return 1.0
    if unit == "wm":
        if field == "omega_m":
            raise ConfigError("omega_m cannot be given relative to itself")
        return params.omega_m
    if unit == "kappa":
        if field in ("Q", "kappa_a", "kappa_ex", "lambda_vac"):
            raise ConfigError(f"{field} cannot be given relative to kappa")
        return derive(params).kappa
    return math.pi


def apply_overrides(params: PhysParams, overrides: Mapping[str, Any]) -> PhysParams:
    """Return ``params`` with ``overrides`` applied.

    Absolute values are applied first so that relative units (``wm``,
    ``kappa``) resolve against the final ``omega_m`` and loss rates.
    """
    unknown = set(overrides) - KNOWN
    if unknown:
        raise ConfigError(f"unknown parameter(s): {', '.join(sorted(unknown))}")
    changes: Dict[str, Any] = {}
    relative: Dict[str, Tuple[float, str]] = {}
    bath_kind = None
    bath_fields: Dict[str, Any] = {}
    for key, raw in overrides.items():
        if key in NUMERIC:
            value, unit = parse_quantity(raw)
            if key in ("lambda_1", "mu"):
                bath_fields[key] = (value, unit)
            elif unit in ("wm", "kappa"):
                relative[key] = (value, unit)
            else:
                changes[key] = value * (math.pi if unit == "pi" else 1.0)
        elif key in BOOLEAN:
            if key == "memory_consistent":
                bath_fields[key] = parse_bool(raw)
            else:
                changes[key] = parse_bool(raw)
        elif key == "pump_mode":
            try:
                changes[key] = PumpMode.parse(raw)
            except InvalidParams as exc:
                raise ConfigError(str(exc)) from exc
        elif key == "bath":
            kind = str(raw).strip().lower().replace("_", "-")
            if kind in ("markovian", "markov"):
                bath_kind = "markovian"
            elif kind in ("non-markovian", "nonmarkovian", "lorentzian"):
                bath_kind = "non-markovian"
            else:
                raise ConfigError(f"unknown bath type {raw!r}")
        else:
            changes[key] = str(raw)
    try:
        out = params.replace(**changes)
        for key, (value, unit) in relative.items():
            out = out.replace(**{key: value * _unit_scale(unit, out, key)})
        out = _apply_bath(out, bath_kind, bath_fields)
    except (TypeError, InvalidParams) as exc:
        raise ConfigError(str(exc)) from exc
    return out


def _apply_bath(params: PhysParams, kind, fields) -> PhysParams:
    if kind is None and not fields:
        return params
    if kind == "markovian":
        if fields:
            raise ConfigError("lambda_1/mu given together with a Markovian bath")
        return params.replace(bath=Markovian())
    current = params.bath if isinstance(params.bath, NonMarkovian) else None
    values = {}
    for key in ("lambda_1", "mu"):
        if key in fields:
            value, unit = fields[key]
            if math.isinf(value) and key == "lambda_1":
                # infinite spectral width is the Markovian limit; mu is moot there
                return params.replace(bath=Markovian())
            values[key] = value * _unit_scale(unit, params, key)
        elif current is not None:
            values[key] = getattr(current, key)
    if "lambda_1" not in values:
        raise ConfigError("a non-Markovian bath needs lambda_1")
    consistent = fields.get("memory_consistent", current.memory_consistent if current else False)
    return params.replace(bath=NonMarkovian(lambda_1=values["lambda_1"], mu=values.get("mu", 0.0),
                                            memory_consistent=consistent))


def resolve_params(config_overrides: Mapping[str, Any] | None = None,
                   cli_overrides: Mapping[str, Any] | None = None,
                   base: PhysParams | None = None) -> PhysParams:
    """Built-in reference device < config file < command-line flags."""
    params = paper_default() if base is None else base
    if config_overrides:
        params = apply_overrides(params, config_overrides)
    if cli_overrides:
        params = apply_overrides(params, cli_overrides)
    try:
        params.validate()
    except InvalidParams as exc:
        raise ConfigError(str(exc)) from exc
    return params


def params_to_dict(params: PhysParams) -> Dict[str, Any]:
    """Flat, serialisable echo of every parameter (bath fields spelled out)."""
    d = derive(params)
    out: Dict[str, Any] = {}
    for f in dataclasses.fields(PhysParams):
        value = getattr(params, f.name)
        if f.name == "bath":
            continue
        if f.name == "kappa_a":
            value = d.kappa_a
        elif f.name == "kappa_ex":
            value = d.kappa_ex
        elif isinstance(value, PumpMode):
            value = value.value
        out[f.name] = value
    bath = params.bath
    out["bath"] = bath.name
    out["lambda_1"] = bath.lambda_1 if isinstance(bath, NonMarkovian) else None
    out["mu"] = bath.mu if isinstance(bath, NonMarkovian) else None
    out["memory_consistent"] = bath.memory_consistent if isinstance(bath, NonMarkovian) else None
    return out
