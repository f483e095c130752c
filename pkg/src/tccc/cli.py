"""Command-line interface.

Subcommands:
  tccc fan validate <file|name>
  tccc sheaf stalk --fan F --chi <json> --point p/q,...
  tccc sheaf hom --fan F --d1 <json> --d2 <json>
  tccc verify <suite> [--range k] [--denom d] [--seed s] [--fan F] ...
  tccc render --fan F --chi <json> -o out.svg

Reports go to stdout as JSON.  Exit codes: 0 pass, 1 verification failure,
2 input error.
"""

import argparse
import json
import sys
from fractions import Fraction

from .divisors import certify_projective, divisor_from_json
from .errors import PathConstructionError, TcccError, UnknownSuiteError
from .harness import run_suite, suite_names
from .lattice_fan import is_complete, is_smooth, load_fan, wall_pairs
from .linalg import format_rational, parse_rational
from .render import render_svg
from .twisted_sheaf import stalk_P, torus_hom


def _emit(obj):
    json.dump(obj, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _parse_point(text, dim):
    parts = [p for p in text.split(",") if p.strip()]
    if len(parts) != dim:
        raise TcccError(f"point needs {dim} coordinates, got {len(parts)}")
    return tuple(parse_rational(p) for p in parts)


def _load_divisor(spec, fan):
    if spec.startswith("@"):
        with open(spec[1:]) as fh:
            return divisor_from_json(json.load(fh), fan=fan)
    return divisor_from_json(spec, fan=fan)


def _cmd_fan_validate(args):
    fan = load_fan(args.fan)
    report = {
        "name": fan.name,
        "dim": fan.dim,
        "rays": [list(r) for r in fan.rays],
        "max_cones": [list(c) for c in fan.max_cones],
        "smooth": is_smooth(fan),
        "complete": is_complete(fan),
        "walls": len(wall_pairs(fan)),
    }
    try:
        cert = certify_projective(fan)
        report["projective"] = True
        report["ample_certificate"] = [format_rational(c) for c in cert.coeffs]
    except PathConstructionError:
        report["projective"] = False
    _emit(report)
    return 0


def _cmd_sheaf_stalk(args):
    fan = load_fan(args.fan)
    D = _load_divisor(args.chi, fan)
    x = _parse_point(args.point, fan.dim)
    dims = stalk_P(D, x)
    _emit({"fan": fan.name, "coeffs": [format_rational(c) for c in D.coeffs],
           "point": [format_rational(c) for c in x],
           "graded_dims": dims.to_json()})
    return 0


def _cmd_sheaf_hom(args):
    fan = load_fan(args.fan)
    d1 = _load_divisor(args.d1, fan)
    d2 = _load_divisor(args.d2, fan)
    dims = torus_hom(d1, d2)
    _emit({"fan": fan.name,
           "d1": [format_rational(c) for c in d1.coeffs],
           "d2": [format_rational(c) for c in d2.coeffs],
           "graded_dims": dims.to_json()})
    return 0


def _cmd_verify(args):
    config = {}
    if args.range is not None:
        config["range"] = args.range
    if args.denom is not None:
        config["denom"] = args.denom
    if args.seed is not None:
        config["seed"] = args.seed
    if args.fan is not None:
        config["fan"] = args.fan
    if args.pairs is not None:
        config["pairs"] = args.pairs
    if args.count is not None:
        config["count"] = args.count
    result = run_suite(args.suite, config)
    _emit(result.to_json())
    return 0 if result.passed else 1


def _cmd_render(args):
    fan = load_fan(args.fan)
    D = _load_divisor(args.chi, fan)
    render_svg(D, path=args.output)
    _emit({"written": args.output})
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="tccc",
        description="exact computations with fans, twisted polytope sheaves, "
                    "and cellular sheaf homs")
    sub = parser.add_subparsers(dest="command", required=True)

    fan_p = sub.add_parser("fan", help="fan inspection")
    fan_sub = fan_p.add_subparsers(dest="fan_command", required=True)
    v = fan_sub.add_parser("validate", help="validate a fan file or built-in name")
    v.add_argument("fan")
    v.set_defaults(func=_cmd_fan_validate)

    sheaf_p = sub.add_parser("sheaf", help="twisted polytope sheaf queries")
    sheaf_sub = sheaf_p.add_subparsers(dest="sheaf_command", required=True)
    s = sheaf_sub.add_parser("stalk", help="graded stalk dims at a point")
    s.add_argument("--fan", required=True)
    s.add_argument("--chi", required=True, help="divisor JSON or @file")
    s.add_argument("--point", required=True, help="comma-separated rationals")
    s.set_defaults(func=_cmd_sheaf_stalk)
    h = sheaf_sub.add_parser("hom", help="torus-level hom between two divisors")
    h.add_argument("--fan", required=True)
    h.add_argument("--d1", required=True)
    h.add_argument("--d2", required=True)
    h.set_defaults(func=_cmd_sheaf_hom)

    ver = sub.add_parser("verify", help="run a verification suite")
    ver.add_argument("suite", choices=suite_names())
    ver.add_argument("--range", type=int)
    ver.add_argument("--denom", type=int)
    ver.add_argument("--seed", type=int)
    ver.add_argument("--fan")
    ver.add_argument("--pairs", type=int)
    ver.add_argument("--count", type=int)
    ver.set_defaults(func=_cmd_verify)

    ren = sub.add_parser("render", help="SVG picture of a 2-d shard complex")
    ren.add_argument("--fan", required=True)
    ren.add_argument("--chi", required=True)
    ren.add_argument("-o", "--output", required=True)
    ren.set_defaults(func=_cmd_render)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits with 2 on bad input already
        raise
    try:
        return args.func(args)
    except UnknownSuiteError as e:
        print(str(e), file=sys.stderr)
        return 2
    except TcccError as e:
        print(str(e), file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError, ValueError) as e:
        print(str(e), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
