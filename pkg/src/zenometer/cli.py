from __future__ import annotations

import argparse
import sys

from . import __version__
from .errors import ContractViolation, NumericalDiagnostic, ResourceGuardError
from .scenario import PRESETS, dump_scenario, load_scenario, preset_scenario, run_scenario

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2


def _add_grid_flags(p):
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--lambda-max", type=float, help="half-width of the lambda window")
    p.add_argument("--lambda-samples", type=int, help="number of lambda samples")
    p.add_argument("--y-samples", type=int, help="number of y samples")
    p.add_argument("--workers", type=int, help="parallel jobs over the T sweep")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="zenometer",
        description="Full statistics of finite-time von Neumann measurements of time-averaged observables.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario file")
    run.add_argument("config")
    _add_grid_flags(run)

    pre = sub.add_parser("preset", help="run a built-in figure preset")
    pre.add_argument("name", choices=sorted(PRESETS))
    _add_grid_flags(pre)
    pre.add_argument("--save-config", help="also write the preset as a scenario file")

    val = sub.add_parser("validate", help="check a scenario file without running it")
    val.add_argument("config")
    return parser


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            s = load_scenario(args.config)
            print(f"{args.config}: ok ({s.name}, dim {s.dim}, {len(s.T_values)} durations)")
            return EXIT_OK
        s = load_scenario(args.config) if args.command == "run" else preset_scenario(args.name)
        s = s.with_grids(
            lambda_max=args.lambda_max, lambda_samples=args.lambda_samples, y_samples=args.y_samples
        ).validate()
        if getattr(args, "save_config", None):
            dump_scenario(s, args.save_config)
        manifest = run_scenario(s, args.out, workers=args.workers)
    except (ContractViolation, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (NumericalDiagnostic, ResourceGuardError) as exc:
        print(f"numerical diagnostic: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    print(f"wrote {len(manifest.files)} files + manifest.json to {args.out}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
