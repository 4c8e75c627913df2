"""Command-line interface.

Exit codes: 0 on success, 1 on configuration errors, 2 when ``validate``
finds failing criteria.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
from typing import Any, Dict, List, Optional

import numpy as np

from . import __version__
from .config import load_config, parse_bath_spec, resolve_params
from .errors import ConfigError, InvalidParams, SpinOmitError, UnknownPreset
from .presets import figure_preset, list_presets
from .sweep import OBSERVABLES, Axis, SweepSpec, parse_axis, render, resolve_workers, run_sweep, spec_from_mapping

EXIT_OK, EXIT_CONFIG, EXIT_VALIDATION = 0, 1, 2


def _param_flags(parser: argparse.ArgumentParser) -> None:
    g = parser.add_argument_group("parameters")
    g.add_argument("--config", help="YAML config file (overrides the built-in reference device)")
    g.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override any parameter, e.g. --set Q=3e7 (repeatable)")
    g.add_argument("--omega-spin", metavar="RAD_S", help="spin angular velocity Omega")
    g.add_argument("--opa-gain", metavar="G", help="OPA gain, e.g. 0.2kappa")
    g.add_argument("--opa-phase", metavar="THETA", help="OPA phase, e.g. 1.5pi")
    g.add_argument("--pump-mode", choices=["SumFreq", "DoubleControl"])
    g.add_argument("--bath", metavar="SPEC", help="'markovian' or 'lambda1=200wm,mu=0[,consistent=true]'")
    g.add_argument("--control-power", metavar="W", help="control power P_l")
    g.add_argument("--probe-power", metavar="W", help="probe power P_p")
    g.add_argument("--detuning", metavar="RAD_S", help="control detuning Delta_0, e.g. 1wm")
    g.add_argument("--chi-form", choices=["shifted", "literal"])
    g.add_argument("--centrifugal-detuning", action=argparse.BooleanOptionalAction, default=None,
                   help="let the rotation-induced displacement shift the cavity")


def _output_flags(parser: argparse.ArgumentParser, formats=True) -> None:
    if formats:
        parser.add_argument("--format", choices=["csv", "jsonl"], default="csv")
    parser.add_argument("-o", "--output", help="write to this file instead of stdout")
    parser.add_argument("--workers", type=int, help="worker processes (default: $SPINOMIT_WORKERS or 1)")


def _cli_overrides(args) -> Dict[str, Any]:
    out: Dict[str, Any] = {}
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        out[key.strip()] = value.strip()
    named = {
        "omega_spin": "Omega", "opa_gain": "G", "opa_phase": "theta", "pump_mode": "pump_mode",
        "control_power": "P_l", "probe_power": "P_p", "detuning": "Delta_0", "chi_form": "chi_form",
        "centrifugal_detuning": "centrifugal_detuning",
    }
    for attr, key in named.items():
        value = getattr(args, attr, None)
        if value is not None:
            out[key] = value
    if getattr(args, "bath", None):
        out.update(parse_bath_spec(args.bath))
    return out


def _load(args):
    config, sweep_doc = ({}, None)
    if getattr(args, "config", None):
        config, sweep_doc = load_config(args.config)
    params = resolve_params(config, _cli_overrides(args))
    return params, sweep_doc


def _emit(text: str, path: Optional[str]) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _observables(text: Optional[str], default) -> tuple:
    if not text:
        return tuple(default)
    items = tuple(s.strip() for s in text.split(",") if s.strip())
    bad = [o for o in items if o not in OBSERVABLES]
    if bad:
        raise ConfigError(f"unknown observable(s): {', '.join(bad)}")
    return items


def _run(spec: SweepSpec, params, args) -> int:
    workers = resolve_workers(args.workers)
    records = list(run_sweep(spec, params, workers=workers))
    _emit(render(records, args.format), args.output)
    return EXIT_OK


def cmd_spectrum(args) -> int:
    params, _ = _load(args)
    spec = SweepSpec(axes=(Axis.linear("Delta_p", args.dp_min, args.dp_max, args.count, "wm"),),
                     observables=_observables(args.observables, ("eta1", "eta2")))
    return _run(spec, params, args)


def cmd_sweep(args) -> int:
    params, sweep_doc = _load(args)
    if args.preset:
        spec = figure_preset(args.preset)
    elif args.axis:
        spec = SweepSpec(axes=tuple(parse_axis(a) for a in args.axis),
                         observables=_observables(args.observables, ("eta1", "eta2")),
                         delta_p=args.delta_p)
    elif sweep_doc:
        spec = spec_from_mapping(sweep_doc, name="config")
    else:
        raise ConfigError("sweep needs --preset, --axis or a 'sweep' section in the config")
    if args.observables and (args.preset or sweep_doc and not args.axis):
        spec = SweepSpec(spec.axes, spec.overrides, _observables(args.observables, ()), spec.delta_p, spec.name)
    spec.validate()
    return _run(spec, params, args)


def cmd_delay(args) -> int:
    params, _ = _load(args)
    spec = SweepSpec(axes=(parse_axis(args.axis),), observables=("tau1",))
    spec.validate()
    return _run(spec, params, args)


def cmd_oracle(args) -> int:
    from .oracle import OracleControls, arbitrate, compare_point, equivalence_grid

    params, _ = _load(args)
    controls = OracleControls(rtol=args.rtol)
    ratios = [float(v) for v in args.points.split(",")] if args.points else [0.996, 1.0, 1.004]
    report: Dict[str, Any] = {"points": []}
    for r in ratios:
        try:
            report["points"].append(compare_point(params, r * params.omega_m, controls))
        except SpinOmitError as exc:
            report["points"].append({"Delta_p_over_wm": r, "error": f"{type(exc).__name__}: {exc}"})
    if not args.no_arbitrate:
        report["arbitration"] = arbitrate(params, controls)
    if args.equivalence:
        report["equivalence"] = equivalence_grid(params, controls=controls)
    _emit(json.dumps(report, indent=2, default=_json_default) + "\n", args.output)
    return EXIT_OK


def _json_default(value):
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.bool_):
        return bool(value)
    raise TypeError(f"cannot serialise {type(value).__name__}")


def cmd_validate(args) -> int:
    from .acceptance import run_all

    results = run_all(skip_oracle=args.skip_oracle)
    for r in results:
        print(r.line(), file=sys.stderr)
    report = {"passed": all(r.passed for r in results), "criteria": [r.to_dict() for r in results]}
    _emit(json.dumps(report, indent=2, default=_json_default) + "\n", args.output)
    return EXIT_OK if report["passed"] else EXIT_VALIDATION


def cmd_preset(args) -> int:
    if args.action == "list":
        for name, description in list_presets():
            print(f"{name:16s} {description}")
        return EXIT_OK
    if not args.name:
        raise ConfigError("preset show needs a preset name")
    spec = figure_preset(args.name)
    doc = {
        "name": spec.name, "description": spec.description,
        "axes": [{"name": a.name, "unit": a.unit, "count": len(a.values),
                  "min": min(a.values), "max": max(a.values)} for a in spec.axes],
        "overrides": dict(spec.overrides), "observables": list(spec.observables),
    }
    print(json.dumps(doc, indent=2, default=str))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spinomit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="efficiencies along a probe-detuning grid")
    _param_flags(p)
    p.add_argument("--dp-min", type=float, default=0.98, help="lowest Delta_p / omega_m")
    p.add_argument("--dp-max", type=float, default=1.02, help="highest Delta_p / omega_m")
    p.add_argument("--count", type=int, default=2001)
    p.add_argument("--observables", help=f"comma list from {', '.join(OBSERVABLES)}")
    _output_flags(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("sweep", help="general one- or two-axis sweep")
    _param_flags(p)
    p.add_argument("--preset", help="figure preset name (see 'preset list')")
    p.add_argument("--axis", action="append", help="name=lo:hi:count[:unit] or name=v1,v2,..[:unit]")
    p.add_argument("--delta-p", type=float, default=1.0, help="Delta_p / omega_m when not swept")
    p.add_argument("--observables", help=f"comma list from {', '.join(OBSERVABLES)}")
    _output_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("delay", help="group delay tau1 along one parameter axis")
    _param_flags(p)
    p.add_argument("--axis", required=True, help="e.g. Omega=-1.5e5:1.5e5:301 or P_l=0:0.01:201")
    _output_flags(p)
    p.set_defaults(func=cmd_delay)

    p = sub.add_parser("oracle", help="time-domain cross-check, JSON report")
    _param_flags(p)
    p.add_argument("--points", help="comma list of Delta_p / omega_m (default 0.996,1.0,1.004)")
    p.add_argument("--rtol", type=float, default=1e-10)
    p.add_argument("--equivalence", action="store_true", help="also run the 12-configuration equivalence grid")
    p.add_argument("--no-arbitrate", action="store_true", help="skip the formula-variant verdicts")
    _output_flags(p, formats=False)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("validate", help="run the acceptance suite, JSON report")
    p.add_argument("--skip-oracle", action="store_true", help="leave out the time-domain block")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("preset", help="list or show figure presets")
    p.add_argument("action", choices=["list", "show"])
    p.add_argument("name", nargs="?")
    p.set_defaults(func=cmd_preset)
    return parser


_NEGATIVE = re.compile(r"^-(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?\s*(wm|kappa|pi)?$")


def _attach_negative_values(parser: argparse.ArgumentParser, argv: List[str]) -> List[str]:
    """Turn ``--omega-spin -2e4`` into ``--omega-spin=-2e4``.

    argparse only recognises plain negative integers and decimals as values,
    so exponents and unit suffixes would otherwise be taken for options.
    """
    takes_value = set()
    for sub in _subparsers(parser):
        for action in sub._actions:
            if action.option_strings and action.nargs is None and not isinstance(
                    action, (argparse._StoreTrueAction, argparse.BooleanOptionalAction)):
                takes_value.update(action.option_strings)
    out: List[str] = []
    i = 0
    while i < len(argv):
        token = argv[i]
        if token in takes_value and i + 1 < len(argv) and _NEGATIVE.match(argv[i + 1]):
            out.append(f"{token}={argv[i + 1]}")
            i += 2
            continue
        out.append(token)
        i += 1
    return out


def _subparsers(parser: argparse.ArgumentParser):
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            yield from action.choices.values()


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parser.parse_args(_attach_negative_values(parser, argv))
    try:
        return args.func(args)
    except (ConfigError, UnknownPreset, InvalidParams) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SpinOmitError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BrokenPipeError:
        # downstream pager or head closed the pipe; not an error for us
        sys.stderr.close()
        return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
