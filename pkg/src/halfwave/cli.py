"""Command-line interface.

Subcommands: verify, smoothing, instability, approximation, bootstrap.
Flags can also come from a flat `key = value` config file (--config);
explicit flags override file values.  Exit codes: 0 pass, 1 assertion
failure, 2 invalid config.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import analysis_oracles as ao
from . import szego_family as sz
from . import verification
from .experiments import (
    ConfigError,
    DEFAULT_EPS,
    ExperimentConfig,
    run_approximation,
    run_bootstrap_diagnostic,
    run_instability,
)

EXIT_PASS = 0
EXIT_ASSERTION = 1
EXIT_CONFIG = 2

_CONFIG_KEYS = {"s", "eps", "sigma", "modes", "dt", "t-samples", "seed", "out", "force-large"}


def _parse_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("_", "-")
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r} (known: {sorted(_CONFIG_KEYS)})")
        values[key] = value
    return values


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--s", type=float, default=None, help="Sobolev index s in (1/4, 1/2)")
    p.add_argument("--eps", type=float, action="append", default=None,
                   help="eps value; repeat the flag for a sweep (descending)")
    p.add_argument("--sigma", type=float, default=None, help="auxiliary regularity")
    p.add_argument("--modes", type=int, default=None, help="mode count override (default: policy per eps)")
    p.add_argument("--dt", type=float, default=None, help="time step override (default: phase-cap policy)")
    p.add_argument("--t-samples", type=int, default=None, help="target samples per run (default 512)")
    p.add_argument("--seed", type=int, default=None, help="seed for probe inputs (default 0)")
    p.add_argument("--out", type=str, default=None, help="output directory")
    p.add_argument("--config", type=str, default=None, help="flat key = value config file")
    p.add_argument("--force-large", action="store_true", default=None,
                   help="allow eps values whose mode count exceeds the desk-scale guard")


def _merged(args: argparse.Namespace) -> dict:
    merged: dict = {}
    if args.config:
        raw = _parse_config_file(args.config)
        if "s" in raw:
            merged["s"] = float(raw["s"])
        if "eps" in raw:
            merged["eps"] = [float(x) for x in raw["eps"].replace(",", " ").split()]
        if "sigma" in raw:
            merged["sigma"] = float(raw["sigma"])
        if "modes" in raw:
            merged["modes"] = int(raw["modes"])
        if "dt" in raw:
            merged["dt"] = float(raw["dt"])
        if "t-samples" in raw:
            merged["t_samples"] = int(raw["t-samples"])
        if "seed" in raw:
            merged["seed"] = int(raw["seed"])
        if "out" in raw:
            merged["out"] = raw["out"]
        if "force-large" in raw:
            merged["force_large"] = raw["force-large"].lower() in ("1", "true", "yes", "on")
    for src, dst in [("s", "s"), ("eps", "eps"), ("sigma", "sigma"), ("modes", "modes"),
                     ("dt", "dt"), ("t_samples", "t_samples"), ("seed", "seed"),
                     ("out", "out"), ("force_large", "force_large")]:
        value = getattr(args, src, None)
        if value is not None:
            merged[dst] = value
    return merged


def _experiment_config(args: argparse.Namespace) -> ExperimentConfig:
    merged = _merged(args)
    eps = merged.get("eps", list(DEFAULT_EPS))
    return ExperimentConfig(
        s=merged.get("s", 0.4),
        eps_list=tuple(eps),
        sigma=merged.get("sigma"),
        dt=merged.get("dt"),
        max_mode=merged.get("modes"),
        t_samples=merged.get("t_samples", 512),
        out_dir=Path(merged["out"]) if "out" in merged else None,
        seed=merged.get("seed", 0),
        force_large=merged.get("force_large", False),
    )


def _cmd_verify(args: argparse.Namespace) -> int:
    only = args.only.split(",") if args.only else None
    overrides = {}
    for item in args.override_threshold or []:
        name, _, value = item.partition("=")
        if not value:
            raise ConfigError(f"--override-threshold needs name=value, got {item!r}")
        overrides[name] = float(value)
    results = verification.run_all(only=only, overrides=overrides or None)
    for line in verification.format_lines(results):
        print(line)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        verification.write_summary(results, out / "verify_summary.csv")
        print(f"summary written to {out / 'verify_summary.csv'}")
    return EXIT_PASS if all(r.passed for r in results) else EXIT_ASSERTION


def _cmd_smoothing(args: argparse.Namespace) -> int:
    merged = _merged(args)
    s = merged.get("s", 0.4)
    sigma = merged.get("sigma", 0.6)
    eps_list = merged.get("eps") or [2.0**-j for j in range(2, 15)]
    n_t = merged.get("t_samples", 512)
    t_grid = np.linspace(0.0, 1.0, n_t)
    predicted = (3.0 * s - 0.5) + sigma * (2.0 * s - 1.0)
    sups = []
    for eps in eps_list:
        params = sz.make_params(eps, s)
        sup, _ = ao.duhamel_negative_norm(params, sigma, t_grid, merged.get("modes"))
        sups.append(sup)
        phase = ao.OscPhase(t=0.0, k=0, omega=params.omega, c=params.c)
        print(f"eps={eps:g}: sup_t ||W||_Hsigma = {sup:.6g} "
              f"(reduced frequency {phase.reduced_frequency:.4f}, "
              f"resonant mode {phase.resonant_mode})")
    fit = ao.fit_scaling(eps_list, sups)
    print(f"fitted slope {fit.slope:.4f} (predicted {predicted:.4f}), r2={fit.r2:.6f}")
    if "out" in merged:
        out = Path(merged["out"])
        out.mkdir(parents=True, exist_ok=True)
        rows = [(eps, s, sigma, "duhamel_hsig_sup", sup, predicted, fit.slope, fit.r2)
                for eps, sup in zip(eps_list, sups)]
        ao.write_probe_report(out / "report.csv", rows)
        print(f"report written to {out / 'report.csv'}")
    return EXIT_PASS


def _print_report(report) -> None:
    print(",".join(report.header))
    for row in report.rows:
        print(",".join(str(c) if isinstance(c, str) else f"{c:.6g}" for c in row))
    for name, fit in report.fits.items():
        print(f"fit[{name}]: slope={fit.slope:.4f} r2={fit.r2:.6f}")


def _cmd_instability(args: argparse.Namespace) -> int:
    report = run_instability(_experiment_config(args))
    _print_report(report)
    bad = [row for row in report.row_map() if not str(row["status"]).startswith("ok")]
    return EXIT_ASSERTION if bad else EXIT_PASS


def _cmd_approximation(args: argparse.Namespace) -> int:
    report = run_approximation(_experiment_config(args))
    _print_report(report)
    bad = [row for row in report.row_map() if not str(row["status"]).startswith("ok")]
    return EXIT_ASSERTION if bad else EXIT_PASS


def _cmd_bootstrap(args: argparse.Namespace) -> int:
    cfg = _experiment_config(args)
    series = run_bootstrap_diagnostic(cfg)
    sup_h = series.sup("h")
    print(f"smallest eps={cfg.eps_list[-1]:g}: sup_t h = {sup_h:.6g}, "
          f"ratio vs eps^(s-1/4) = {sup_h / cfg.eps_list[-1] ** (cfg.s - 0.25):.6g}")
    return EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="halfwave",
        description="Spectral simulation and verification toolkit for the periodic "
                    "cubic half-wave and Szego equations.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run the acceptance checks")
    p.add_argument("--only", type=str, default=None, help="comma-separated criterion ids")
    p.add_argument("--out", type=str, default=None, help="directory for verify_summary.csv")
    p.add_argument("--override-threshold", action="append", default=None,
                   metavar="NAME=VALUE", help="replace a check threshold (testing aid)")
    p.set_defaults(fn=_cmd_verify)

    p = sub.add_parser("smoothing", help="Duhamel smoothing-estimate eps sweep")
    _add_common_flags(p)
    p.set_defaults(fn=_cmd_smoothing)

    p = sub.add_parser("instability", help="half-wave norm-separation experiment")
    _add_common_flags(p)
    p.set_defaults(fn=_cmd_instability)

    p = sub.add_parser("approximation", help="Szego-approximation error sweep")
    _add_common_flags(p)
    p.set_defaults(fn=_cmd_approximation)

    p = sub.add_parser("bootstrap", help="perturbation bootstrap diagnostic")
    _add_common_flags(p)
    p.set_defaults(fn=_cmd_bootstrap)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
