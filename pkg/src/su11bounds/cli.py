"""Command-line entry point: sweep, reconcile, mc and phasespace.

Exit codes: 0 success, 1 usage, 2 I/O, 3 model or scheme error.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .config import SCHEME_NAMES, ModelConfig, named_scheme
from .errors import Su11BoundsError
from .gaussian import homodyne_outcome_model, propagate_pipeline
from .measurement import (
    BOUNDS_COLUMNS,
    bound_comparison,
    estimate_and_mse,
    sample_outcomes,
    scheme_fisher_information,
    trace_inverse_fi,
)
from .reconcile import DEFAULT_G, reconcile_report

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_MODEL = 0, 1, 2, 3
SWEEP_SCHEMA = "su11bounds.sweep/1"
PHASESPACE_SCHEMA = "su11bounds.phasespace/1"
MC_SCHEMA = "su11bounds.mc/1"
PHASESPACE_COLUMNS = ("stage", "mode", "center_q", "center_p", "semi_major", "semi_minor", "angle")
MIN_MC_SHOTS = 1000

DEFAULTS = {
    "g_min": 0.0,
    "g_max": 2.0,
    "steps": 41,
    "g": 0.0,
    "g_values": None,
    "alpha": 1.0,
    "theta_alpha": 0.0,
    "theta_g": math.pi / 2,
    "kappa": 0.5,
    "scheme": "heterodyne",
    "gram": "paper",
    "shots": None,
    "seed": 0,
    "block_size": 1 << 16,
    "workers": 1,
    "theta": None,
    "out": None,
    "format": None,
}


class UsageError(Exception):
    pass


class OutputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _float_list(text: str):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="su11bounds", description="Precision bounds for the SU(1,1) displacement model.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def common(p, fmt=("csv", "json")):
        p.add_argument("--config", help="JSON file supplying any flag; explicit flags win")
        p.add_argument("--alpha", type=float)
        p.add_argument("--theta-g", type=float)
        p.add_argument("--kappa", type=float)
        p.add_argument("--out", help="output path (stdout when omitted or '-')")
        p.add_argument("--format", choices=fmt)

    p = sub.add_parser("sweep", help="bounds versus squeezing gain")
    common(p)
    p.add_argument("--g-min", type=float)
    p.add_argument("--g-max", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--scheme", choices=SCHEME_NAMES)
    p.add_argument("--gram", choices=("paper", "gaussian"))
    p.add_argument("--shots", type=int, help="also run a Monte Carlo check per row")
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)

    p = sub.add_parser("reconcile", help="engine values against the closed-form curves")
    common(p, fmt=("json",))
    p.add_argument("--g-values", type=_float_list, help="comma-separated g samples")

    p = sub.add_parser("mc", help="Monte Carlo GLS estimation")
    common(p, fmt=("json",))
    p.add_argument("--g", type=float)
    p.add_argument("--theta-alpha", type=float)
    p.add_argument("--scheme", choices=SCHEME_NAMES)
    p.add_argument("--shots", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--block-size", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--theta", type=_float_list, help="true parameter values, four comma-separated numbers")
    p.add_argument("--save-outcomes", help="also write raw outcomes (binary + JSON sidecar)")

    p = sub.add_parser("phasespace", help="per-stage 1-sigma ellipses")
    common(p)
    p.add_argument("--g", type=float)
    p.add_argument("--theta-alpha", type=float)
    p.add_argument("--theta", type=_float_list)
    return parser


def _load_config(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise OutputError(f"cannot read config {path}: {exc}")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path} is not valid JSON: {exc}")
    if not isinstance(data, dict):
        raise UsageError("config file must hold a JSON object")
    return {k.replace("-", "_"): v for k, v in data.items()}


def resolve(args: argparse.Namespace) -> dict:
    """Merge defaults < config file < explicit flags."""
    cfg = _load_config(args.config) if getattr(args, "config", None) else {}
    unknown = set(cfg) - set(DEFAULTS)
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    out = dict(DEFAULTS)
    out.update(cfg)
    for key, val in vars(args).items():
        if key in ("command", "config"):
            continue
        if val is not None:
            out[key] = val
    return out


def _model_config(o: dict, g: float) -> ModelConfig:
    return ModelConfig(alpha=float(o["alpha"]), theta_alpha=float(o["theta_alpha"]), g=float(g),
                       theta_g=float(o["theta_g"]), kappa=float(o["kappa"]))


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    return str(v)


def _csv(schema: str, columns, rows) -> str:
    buf = io.StringIO()
    buf.write(f"# {schema}\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _emit(text: str, out) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OutputError(f"cannot write {out}: {exc}")


def g_grid(g_min: float, g_max: float, steps: int):
    if steps < 1:
        raise UsageError("--steps must be >= 1")
    if g_min < 0 or g_max < g_min:
        raise UsageError("need 0 <= g-min <= g-max")
    if steps == 1:
        return [g_min]
    return [g_min + (g_max - g_min) * i / (steps - 1) for i in range(steps)]


def cmd_sweep(o: dict) -> str:
    grid = g_grid(float(o["g_min"]), float(o["g_max"]), int(o["steps"]))
    scheme = named_scheme(o["scheme"])
    shots = o["shots"]
    if shots is not None and shots < 1:
        raise UsageError("--shots must be >= 1")

    def row(g):
        _model_config(o, g)  # validates the knobs
        return bound_comparison(g, scheme, alpha=float(o["alpha"]), theta_g=float(o["theta_g"]),
                                kappa=float(o["kappa"]), gram=o["gram"], shots=shots,
                                seed=int(o["seed"]))

    workers = int(o["workers"])
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            records = list(pool.map(row, grid))
    else:
        records = [row(g) for g in grid]
    if (o["format"] or "csv") == "csv":
        return _csv(SWEEP_SCHEMA, BOUNDS_COLUMNS, [r.row() for r in records])
    return _json({
        "schema": SWEEP_SCHEMA,
        "scheme": scheme.name,
        "gram": o["gram"],
        "columns": list(BOUNDS_COLUMNS),
        "rows": [dict(zip(BOUNDS_COLUMNS, r.row()), ordering_violations=r.ordering_violations())
                 for r in records],
    })


def cmd_reconcile(o: dict) -> str:
    gs = o["g_values"] if o["g_values"] is not None else DEFAULT_G
    if any(g < 0 for g in gs):
        raise UsageError("g values must be non-negative")
    return _json(reconcile_report(gs, alpha=float(o["alpha"])))


def cmd_mc(o: dict) -> str:
    shots = o["shots"] if o["shots"] is not None else 100_000
    if shots < MIN_MC_SHOTS:
        raise UsageError(f"--shots must be >= {MIN_MC_SHOTS}")
    config = _model_config(o, o["g"])
    scheme = named_scheme(o["scheme"])
    model = homodyne_outcome_model(config, scheme)
    theta = np.zeros(model.n_params) if o["theta"] is None else np.asarray(o["theta"], dtype=float)
    if theta.shape != (model.n_params,):
        raise UsageError(f"--theta needs {model.n_params} values")
    batch = sample_outcomes(model, theta, int(shots), int(o["seed"]), int(o["block_size"]),
                            workers=int(o["workers"]))
    if o.get("save_outcomes"):
        try:
            batch.save(o["save_outcomes"])
        except OSError as exc:
            raise OutputError(f"cannot write {o['save_outcomes']}: {exc}")
    result = estimate_and_mse(batch, model, theta)
    F = scheme_fisher_information(config, scheme)
    record = bound_comparison(config.g, scheme, alpha=config.alpha, theta_g=config.theta_g,
                              kappa=config.kappa)
    record.tr_mse_mc = result.tr_mse
    return _json({
        "schema": MC_SCHEMA,
        "scheme": scheme.name,
        "config": {"g": config.g, "alpha": config.alpha, "theta_alpha": config.theta_alpha,
                   "theta_g": config.theta_g, "kappa": config.kappa},
        "block_size": int(o["block_size"]),
        "estimation": result.to_dict(),
        "fisher_information": F.tolist(),
        "tr_finv_engine": trace_inverse_fi(F),
        "bounds": dict(zip(BOUNDS_COLUMNS, record.row())),
        "ordering_violations": record.ordering_violations(),
    })


def cmd_phasespace(o: dict) -> str:
    config = _model_config(o, o["g"])
    theta = (0.0,) * 4 if o["theta"] is None else tuple(o["theta"])
    if len(theta) != 4:
        raise UsageError("--theta needs 4 values")
    _, ellipses = propagate_pipeline(config, theta)
    rows = [(e.stage, e.mode + 1, e.center[0], e.center[1], e.semi_major, e.semi_minor, e.angle)
            for e in ellipses]
    if (o["format"] or "csv") == "csv":
        return _csv(PHASESPACE_SCHEMA, PHASESPACE_COLUMNS, rows)
    return _json({"schema": PHASESPACE_SCHEMA, "rows": [dict(zip(PHASESPACE_COLUMNS, r)) for r in rows]})


COMMANDS = {"sweep": cmd_sweep, "reconcile": cmd_reconcile, "mc": cmd_mc, "phasespace": cmd_phasespace}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required: " + ", ".join(COMMANDS))
        opts = resolve(args)
        text = COMMANDS[args.command](opts)
        _emit(text, opts["out"])
    except UsageError as exc:
        print(f"su11bounds: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OutputError as exc:
        print(f"su11bounds: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except Su11BoundsError as exc:
        print(f"su11bounds: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except (ValueError, TypeError) as exc:
        print(f"su11bounds: invalid specification: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
