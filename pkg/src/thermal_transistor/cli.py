"""Command line entry point ``sim``.

Exit codes: 0 success, 2 usage error, 3 configuration error, 4 numerical error.
"""
from __future__ import annotations

import argparse
import sys

from .config import load_config
from .errors import ConfigError, TransistorError
from .plotting import KINDS, emit_plot
from .sweep import run_sweep, write_csv
from .thermo import switch_characterize

EXIT_OK = 0
EXIT_CONFIG = 3
EXIT_NUMERICAL = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sim", description="Qubit-qutrit thermal transistor simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="sweep T_M (and lambda) and write a CSV table")
    run.add_argument("--config", required=True)
    run.add_argument("--out", help="CSV path (default: config value, else stdout)")
    run.add_argument("--plot", help="SVG path (default: config value, else none)")
    run.add_argument("--plot-kind", default="currents", choices=KINDS + ("currents-by-λ",))
    run.add_argument("--workers", type=int, default=1)

    val = sub.add_parser("validate", help="check a configuration file")
    val.add_argument("--config", required=True)

    sw = sub.add_parser("switch", help="source current at the off and on modulator temperatures")
    sw.add_argument("--config", required=True)
    sw.add_argument("--t-off", type=float, default=0.25)
    sw.add_argument("--t-on", type=float, default=0.50)
    return parser


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    if args.workers < 1:
        raise ConfigError("--workers must be at least 1")
    table = run_sweep(cfg, workers=args.workers)
    out = args.out if args.out is not None else cfg.csv_path
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            write_csv(table, fh, cfg.precision)
    else:
        write_csv(table, sys.stdout, cfg.precision)
    plot = args.plot if args.plot is not None else cfg.svg_path
    if plot:
        lam = cfg.lam if cfg.mode == "direct" and cfg.lam in table.lambdas() else None
        svg = emit_plot(table, args.plot_kind, lam=lam)
        with open(plot, "w", encoding="utf-8", newline="") as fh:
            fh.write(svg)
    return EXIT_OK


def _cmd_validate(args) -> int:
    cfg = load_config(args.config)
    print(f"ok: mode={cfg.mode}, {len(cfg.devices())} device(s), {cfg.points} T_M points")
    for lam, spec in cfg.devices():
        print(
            f"  lambda={lam:.6g} omega1={spec.omega1:.6g} omega2={spec.omega2:.6g} "
            f"omega3={spec.omega3:.6g} g={spec.g:.6g} Omega={spec.Omega:.6g}"
        )
    return EXIT_OK


def _cmd_switch(args) -> int:
    cfg = load_config(args.config)
    if not (args.t_off > 0 and args.t_on > 0) or args.t_off > args.t_on:
        raise ConfigError("need 0 < t-off <= t-on")
    off, on, contrast = switch_characterize(cfg.device(), cfg.conditions(), args.t_off, args.t_on)
    p = cfg.precision
    print(f"T_off={args.t_off:g} J_S_off={off:.{p}g}")
    print(f"T_on={args.t_on:g} J_S_on={on:.{p}g}")
    print(f"contrast={contrast:.{p}g}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    handler = {"run": _cmd_run, "validate": _cmd_validate, "switch": _cmd_switch}[args.command]
    try:
        return handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TransistorError as exc:
        print(f"numerical error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
