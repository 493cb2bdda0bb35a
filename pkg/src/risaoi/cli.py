"""Command-line front end.

    risaoi run     [--config FILE] [--set key=value ...] [--out DIR]
    risaoi sweep   --axis NAME --values v1,v2,... [...]
    risaoi figure  fig5 .. fig13 [...]
    risaoi selftest
"""
from __future__ import annotations

import argparse
import logging
import sys

from . import harness, output, selftest
from .config import SCHEMES, ConfigError, ExperimentConfig, load_config, parse_assignments, parse_override

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2

# name -> (axis, values, plotted metric, schemes)
FIGURES = {
    "fig5": ("a_max", [3, 5, 7, 9, 11], "mean_sum_rate", SCHEMES),
    "fig6": ("a_max", [3, 5, 7, 9, 11], "mean_system_aoi", SCHEMES),
    "fig7": ("a_max", [4, 9, 14], "mean_system_aoi", ("proposed",)),
    "fig8": ("high_requirement_count", [0, 1, 2, 3, 4, 5, 6], "mean_sum_rate", SCHEMES),
    "fig9": ("k_ues", [4, 6, 8, 10, 12, 14], "mean_sum_rate", SCHEMES),
    "fig10": ("bits", [1, 2, 3, 4, 5, 6], "mean_sum_rate", SCHEMES),
    "fig11": ("ris_elements", [36, 64, 100, 144, 196, 256], "mean_sum_rate", SCHEMES),
    "fig12": ("n_tx", [16, 32, 64, 128, 256, 512], "mean_sum_rate", SCHEMES),
    "fig13": ("t_slots", [50, 100, 150, 200, 250, 300], "mean_sum_rate", SCHEMES),
}


class UsageError(Exception):
    pass


def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value config file")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config key (repeatable, applied after --config)")
    common.add_argument("--out", default="results", help="output directory")
    common.add_argument("--seed", type=int, help="root RNG seed override")
    common.add_argument("--workers", type=int, help="parallel worker processes")
    common.add_argument("--no-svg", action="store_true", help="skip SVG plots")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="risaoi", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="all four schemes on one config")
    sw = sub.add_parser("sweep", parents=[common], help="sweep one axis")
    sw.add_argument("--axis", required=True)
    sw.add_argument("--values", required=True, help="comma-separated axis values")
    fg = sub.add_parser("figure", parents=[common], help="named figure preset")
    fg.add_argument("name", choices=sorted(FIGURES, key=lambda s: int(s[3:])))
    sub.add_parser("selftest", help="small-instance oracle suites")
    return p


def build_config(args):
    try:
        config = load_config(args.config) if args.config else ExperimentConfig()
        config = parse_assignments([parse_override(s) for s in args.set], config)
        if args.seed is not None:
            config = config.replace(seed=args.seed)
        if args.workers is not None:
            config = config.replace(workers=args.workers)
    except FileNotFoundError as exc:
        raise UsageError(f"config file not found: {exc.filename}") from exc
    except ConfigError as exc:
        raise UsageError(str(exc)) from exc
    return config


def _parse_values(text):
    try:
        return [float(v) if "." in v else int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"malformed --values {text!r}") from exc


def dispatch(args):
    if args.command == "selftest":
        return EXIT_OK if selftest.run() == 0 else EXIT_RUNTIME
    config = build_config(args)
    svg = not args.no_svg
    if args.command == "run":
        result = harness.run_all(config)
        paths = output.write_all(result, args.out, "run", svg=False)
    elif args.command == "sweep":
        values = _parse_values(args.values)
        try:
            result = harness.sweep(config, args.axis, values)
        except ConfigError as exc:
            raise UsageError(str(exc)) from exc
        paths = output.write_all(result, args.out, f"sweep_{args.axis}", svg=svg)
    else:
        axis, values, metric, schemes = FIGURES[args.name]
        result = harness.sweep(config, axis, values, schemes)
        paths = output.write_all(result, args.out, args.name, metric=metric, svg=svg)
    for kind, path in paths.items():
        print(f"wrote {kind}: {path}")
    return EXIT_OK


def main(argv=None):
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return dispatch(args)
    except UsageError as exc:
        print(f"risaoi: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001 - top-level diagnostic line
        print(f"risaoi: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
