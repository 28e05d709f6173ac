"""Command-line front end: ``afcecho {point,figure,oracle-check,thresholds,region}``.

Exit codes: 0 success, 1 I/O error, 2 invalid arguments, 3 oracle outside
tolerance, 4 simulation failure.
"""
from __future__ import annotations

import argparse
import math
import sys
from typing import Optional, Sequence

from . import __version__
from .comb import CombError, CombSpec, Sampled, Square
from .io import curves_to_csv, curves_to_json, format_float, grid_to_csv, grid_to_json, metric_point_dict
from .metrics import (
    DomainError,
    background_upper_limit,
    metric_point,
)
from .oracle import MalformedCombError, OracleConfig, oracle_metrics, simulate, write_trace_csv
from .sweep import (
    DENSE_POINTS,
    FIGURE_DEFAULTS,
    FIGURE_LEVELS,
    NoCrossingError,
    background_threshold_for_unit_gain,
    classical_limit_finesse,
    cloning_intervals,
    figure_dataset,
)

EXIT_OK, EXIT_IO, EXIT_USAGE, EXIT_TOLERANCE, EXIT_SIMULATION = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


def _chi_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.replace(",", " ").split())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _bool(text: str) -> bool:
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def _spec_args(p: argparse.ArgumentParser, chi: bool = True) -> None:
    p.add_argument("--b", type=float, help="background level, 0 <= b <= 1")
    if chi:
        p.add_argument("--chi", type=float, help="excited fraction, 0 <= chi <= 1")
    p.add_argument("--finesse", type=float, help="tooth spacing over tooth width, >= 2")
    p.add_argument("--tooth", default="square", help="'square' or a two-column CSV tooth profile")
    p.add_argument("--allow-low-finesse", action="store_true", help="admit 1 < finesse < 2 with a warning")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value file supplying defaults for any flag")
    common.add_argument("--output", default="-", help="output path, '-' for stdout")
    common.add_argument("--format", choices=("text", "csv", "json"), default=None)

    parser = argparse.ArgumentParser(prog="afcecho", description="AFC echo efficiency, SNR and fidelity.")
    parser.add_argument("--version", action="version", version=f"afcecho {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("point", parents=[common], help="metrics at one parameter point")
    _spec_args(p)

    p = sub.add_parser("figure", parents=[common], help="write a figure dataset")
    p.add_argument("id", type=int, help="figure number: 2, 3, 4 or 5")
    p.add_argument("--chi", type=float, help="excited fraction for map figures (2, 3)")
    p.add_argument("--b", type=float, help="background for curve figures (4, 5)")
    p.add_argument("--chi-list", type=_chi_list, help="comma-separated excited fractions for 4, 5")
    p.add_argument("--b-min", type=float)
    p.add_argument("--b-max", type=float)
    p.add_argument("--finesse-min", type=float)
    p.add_argument("--finesse-max", type=float)
    p.add_argument("--steps", type=int, help="grid steps per map axis")
    p.add_argument("--points", type=int, help="finesse samples per curve")
    p.add_argument("--dense", action="store_true", help=f"use {DENSE_POINTS} finesse samples per curve")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("oracle-check", parents=[common], help="compare closed forms with the ensemble simulation")
    _spec_args(p)
    p.add_argument("--m", type=int, default=32, help="comb teeth in the simulated band")
    p.add_argument("--spp", type=int, default=256, help="detuning samples per comb period")
    p.add_argument("--epsilon", type=float, default=0.01)
    p.add_argument("--n-density", type=float, default=1.0)
    p.add_argument("--time-points", type=int, default=256, help="trace samples per echo period")
    p.add_argument("--tol", type=float, default=0.02, help="relative tolerance")
    p.add_argument("--trace", help="optional CSV dump of the polarization trace")

    p = sub.add_parser("thresholds", parents=[common], help="background and finesse thresholds for chi")
    p.add_argument("--chi", type=float)
    p.add_argument("--b", type=float, default=0.0, help="background for the classical-limit crossing")
    p.add_argument("--finesse", type=float, default=2.0, help="finesse for the necessary background bound")

    p = sub.add_parser("region", parents=[common], help="finesse intervals inside the cloning region")
    p.add_argument("--b", type=float)
    p.add_argument("--chi", type=float)
    p.add_argument("--finesse-min", type=float, default=2.0)
    p.add_argument("--finesse-max", type=float, default=100.0)
    return parser


def _subparser(parser: argparse.ArgumentParser, name: str) -> argparse.ArgumentParser:
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[name]
    raise KeyError(name)


def read_config(path: str) -> dict[str, str]:
    """Flat ``key = value`` (or ``key: value``) lines; ``#`` starts a comment."""
    out: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            sep = "=" if "=" in line else ":" if ":" in line else None
            if sep is None:
                raise UsageError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split(sep, 1))
            out[key.replace("-", "_")] = value
    return out


def _apply_config(sub: argparse.ArgumentParser, values: dict[str, str]) -> None:
    actions = {
        a.dest: a for a in sub._actions
        if a.option_strings and a.dest not in ("help", "config")
    }
    defaults = {}
    for key, raw in values.items():
        if key not in actions:
            raise UsageError(f"unknown config key {key!r}; valid keys: {', '.join(sorted(actions))}")
        action = actions[key]
        try:
            if isinstance(action, argparse._StoreTrueAction):
                val = _bool(raw)
            elif action.type is not None:
                val = action.type(raw)
            else:
                val = raw
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise UsageError(f"config key {key!r}: {exc}") from None
        if action.choices is not None and val not in action.choices:
            raise UsageError(f"config key {key!r}: {val!r} not in {list(action.choices)}")
        defaults[key] = val
    sub.set_defaults(**defaults)


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    ns = parser.parse_args(argv)
    if ns.config:
        values = read_config(ns.config)
        _apply_config(_subparser(parser, ns.command), values)
        ns = parser.parse_args(argv)
    return ns


def _require(ns: argparse.Namespace, *names: str) -> None:
    missing = [n for n in names if getattr(ns, n) is None]
    if missing:
        raise UsageError("missing required " + ", ".join("--" + n.replace("_", "-") for n in missing))


def _tooth(text: str):
    if text == "square":
        return Square()
    return Sampled.from_csv(text)


def _spec(ns: argparse.Namespace) -> CombSpec:
    _require(ns, "b", "chi", "finesse")
    return CombSpec(ns.b, ns.finesse, ns.chi, _tooth(ns.tooth), allow_low_finesse=ns.allow_low_finesse)


def _emit(ns: argparse.Namespace, text: str) -> None:
    if ns.output in (None, "-"):
        sys.stdout.write(text)
        return
    with open(ns.output, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _kv(lines: list[tuple[str, str]]) -> str:
    width = max(len(k) for k, _ in lines)
    return "".join(f"{k.ljust(width)} = {v}\n" for k, v in lines)


def _value(x: Optional[float], undefined: str = "undefined") -> str:
    return undefined if x is None else format_float(x)


def cmd_point(ns: argparse.Namespace) -> int:
    spec = _spec(ns)
    mp = metric_point(spec)
    fmt = ns.format or "text"
    if fmt == "json":
        import json

        doc = {"b": spec.b, "chi": spec.chi, "finesse": spec.finesse, **metric_point_dict(mp)}
        _emit(ns, json.dumps(doc, indent=1) + "\n")
    elif fmt == "csv":
        header = "b,chi,finesse,eta,snr,fidelity,f_opt,in_region,warnings"
        row = ",".join([
            format_float(spec.b), format_float(spec.chi), format_float(spec.finesse),
            format_float(mp.eta), format_float(mp.snr), format_float(mp.fidelity), format_float(mp.f_opt),
            "true" if mp.in_cloning_region else "false", ";".join(mp.warnings),
        ])
        _emit(ns, header + "\n" + row + "\n")
    else:
        _emit(ns, _kv([
            ("b", format_float(spec.b)),
            ("chi", format_float(spec.chi)),
            ("finesse", format_float(spec.finesse)),
            ("eta", format_float(mp.eta)),
            ("snr", _value(mp.snr)),
            ("fidelity", _value(mp.fidelity)),
            ("f_opt", _value(mp.f_opt, "not defined (eta < 1)")),
            ("cloning_region", "true" if mp.in_cloning_region else "false"),
            ("warnings", ", ".join(mp.warnings) or "none"),
        ]))
    return EXIT_OK


_FIGURE_TITLES = {
    2: "readout efficiency vs background and finesse",
    3: "fidelity vs background and finesse",
    4: "fidelity vs readout efficiency, zero background",
    5: "fidelity vs readout efficiency, background 0.1",
}


def cmd_figure(ns: argparse.Namespace) -> int:
    fig = ns.id
    if fig not in FIGURE_DEFAULTS:
        raise UsageError(f"figure must be one of 2, 3, 4, 5; got {fig}")
    params = dict(FIGURE_DEFAULTS[fig])
    overrides = []
    for key in list(params):
        val = getattr(ns, key, None)
        if val is not None and val != params[key]:
            params[key] = val
            overrides.append(key)
    if fig in (4, 5) and ns.dense and params["points"] != DENSE_POINTS:
        params["points"] = DENSE_POINTS
        overrides.append("points")
    ignored = [k for k in ("chi", "b", "chi_list", "b_min", "b_max", "steps", "points")
               if k not in params and getattr(ns, k, None) is not None]
    if ignored:
        raise UsageError(f"figure {fig} does not take " + ", ".join("--" + k.replace("_", "-") for k in ignored))
    _validate_figure(fig, params)

    def show(v):
        if isinstance(v, tuple):
            return ",".join(format_float(x) for x in v)
        if isinstance(v, int):
            return str(v)
        return format_float(v)

    comments = [f"afcecho {__version__} figure {fig}: {_FIGURE_TITLES[fig]}"]
    comments += [f"param {k}={show(v)}" for k, v in params.items()]
    comments += [f"override {k}={show(params[k])}" for k in overrides]
    if fig in FIGURE_LEVELS:
        comments.append("contour levels " + ",".join(format_float(v) for v in FIGURE_LEVELS[fig]))
    meta = {
        "figure": fig,
        "title": _FIGURE_TITLES[fig],
        "version": __version__,
        "params": {k: list(v) if isinstance(v, tuple) else v for k, v in params.items()},
        "overrides": overrides,
    }
    if fig in FIGURE_LEVELS:
        meta["contour_levels"] = list(FIGURE_LEVELS[fig])

    data = figure_dataset(fig, params, workers=max(1, ns.workers))
    fmt = ns.format or "csv"
    if fmt == "text":
        raise UsageError("figure output format must be csv or json")
    if fig in (2, 3):
        text = grid_to_json(data, meta) if fmt == "json" else grid_to_csv(data, comments)
    else:
        text = curves_to_json(data, meta) if fmt == "json" else curves_to_csv(data, comments)
    _emit(ns, text)
    return EXIT_OK


def _validate_figure(fig: int, params: dict) -> None:
    # build the corner specs so every cell is known valid before the sweep starts
    if fig in (2, 3):
        if params["steps"] < 1:
            raise UsageError("--steps must be >= 1")
        if params["b_min"] > params["b_max"] or params["finesse_min"] > params["finesse_max"]:
            raise UsageError("axis minimum exceeds maximum")
        if fig == 3 and not params["chi"] > 0:
            raise UsageError("figure 3 needs chi > 0")
        for b in (params["b_min"], params["b_max"]):
            for f in (params["finesse_min"], params["finesse_max"]):
                CombSpec(b, f, params["chi"])
    else:
        if params["points"] < 2:
            raise UsageError("--points must be >= 2")
        if not 0 <= params["b"] < 1:
            raise UsageError(f"curves need 0 <= b < 1, got b={params['b']}")
        if params["finesse_min"] >= params["finesse_max"]:
            raise UsageError("finesse minimum must be below maximum")
        for chi in params["chi_list"]:
            for f in (params["finesse_min"], params["finesse_max"]):
                CombSpec(params["b"], f, chi)


def _rel(closed: Optional[float], sim: Optional[float]) -> float:
    if closed is None or sim is None:
        return math.nan
    if math.isinf(closed) or math.isinf(sim):
        return 0.0 if closed == sim else math.inf
    if closed == 0.0:
        return 0.0 if sim == 0.0 else math.inf
    return abs(sim - closed) / abs(closed)


def cmd_oracle_check(ns: argparse.Namespace) -> int:
    spec = _spec(ns)
    if ns.tol is None or not ns.tol > 0:
        raise UsageError("--tol must be positive")
    cfg = OracleConfig(spec, m_teeth=ns.m, samples_per_period=ns.spp, epsilon=ns.epsilon,
                       n_density=ns.n_density, time_points=ns.time_points)
    closed = metric_point(spec)
    trace = simulate(cfg)
    sim = oracle_metrics(cfg, trace)
    if ns.trace:
        write_trace_csv(trace, ns.trace, cfg.echo_time)
    rows = []
    ok = True
    for name in ("eta", "snr", "fidelity"):
        c, s = getattr(closed, name), getattr(sim, name)
        dev = _rel(c, s)
        passed = dev <= ns.tol
        ok &= passed
        rows.append((name, c, s, dev, passed))
    lines = ["quantity,closed_form,oracle,rel_deviation,status"]
    for name, c, s, dev, passed in rows:
        lines.append(",".join([name, _value(c), _value(s), format_float(dev), "pass" if passed else "FAIL"]))
    lines.append(f"# tolerance {format_float(ns.tol)}: {'all within tolerance' if ok else 'outside tolerance'}")
    _emit(ns, "\n".join(lines) + "\n")
    return EXIT_OK if ok else EXIT_TOLERANCE


def cmd_thresholds(ns: argparse.Namespace) -> int:
    _require(ns, "chi")
    chi = ns.chi
    CombSpec(ns.b, ns.finesse, chi)  # validates the triple
    lines = [("chi", format_float(chi)), ("b_necessary", format_float(background_upper_limit(chi, ns.finesse)))]
    lines.append(("b_actual", format_float(background_threshold_for_unit_gain(chi))))
    if chi > 0:
        try:
            lines.append(("finesse_classical", format_float(classical_limit_finesse(ns.b, chi))))
        except NoCrossingError:
            lines.append(("finesse_classical", "none in bracket [2, 100]"))
    else:
        lines.append(("finesse_classical", "none in bracket [2, 100]"))
    _emit(ns, _kv(lines))
    return EXIT_OK


def cmd_region(ns: argparse.Namespace) -> int:
    _require(ns, "b", "chi")
    lo, hi = ns.finesse_min, ns.finesse_max
    if not lo < hi:
        raise UsageError("--finesse-min must be below --finesse-max")
    CombSpec(ns.b, lo, ns.chi)
    CombSpec(ns.b, hi, ns.chi)
    intervals = cloning_intervals(ns.b, ns.chi, (lo, hi))
    lines = [("b", format_float(ns.b)), ("chi", format_float(ns.chi))]
    if not intervals:
        lines.append(("interval", f"none in bracket [{lo:g}, {hi:g}]"))
    for a, z in intervals:
        lines.append(("interval", f"{format_float(a)} {format_float(z)}"))
    _emit(ns, _kv(lines))
    return EXIT_OK


COMMANDS = {
    "point": cmd_point,
    "figure": cmd_figure,
    "oracle-check": cmd_oracle_check,
    "thresholds": cmd_thresholds,
    "region": cmd_region,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        ns = parse_args(argv)
    except SystemExit as exc:  # argparse usage errors and --help
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"afcecho: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"afcecho: cannot read config {exc.filename}: {exc.strerror}", file=sys.stderr)
        return EXIT_IO
    try:
        return COMMANDS[ns.command](ns)
    except (UsageError, CombError, DomainError) as exc:
        print(f"afcecho {ns.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MalformedCombError as exc:
        print(f"afcecho {ns.command}: simulation failed: {exc}", file=sys.stderr)
        return EXIT_SIMULATION
    except OSError as exc:
        target = exc.filename or ns.output
        print(f"afcecho {ns.command}: I/O error on {target}: {exc.strerror}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
