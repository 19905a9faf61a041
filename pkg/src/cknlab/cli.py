"""Command-line interface: ``cknlab {params,regions,verify,deficit}``.

Exit codes: 0 success, 1 a verification check failed, 2 usage or
configuration error.
"""

import argparse
import json
import math
import sys
import warnings

from . import __version__
from .errors import CknError, DegenerateParams, OutsideFSWarning

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _json_default(x):
    if hasattr(x, "item"):
        return x.item()
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _finite(x):
    return x if x is None or math.isfinite(x) else str(x)


def _dump(obj, out):
    out.write(json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n")


def _d_list(text):
    try:
        vals = [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"malformed dimension list {text!r}") from exc
    if not vals or any(v < 3 for v in vals):
        raise argparse.ArgumentTypeError(f"dimensions must be integers >= 3, got {text!r}")
    return vals


# ---------------------------------------------------------------------------
# subcommands


def cmd_params(args, out):
    from .params import classify, derive

    p = derive(args.a, args.b, args.d)
    reg = classify(p)
    payload = {
        "a": p.a, "b": p.b, "d": p.d, "a_c": p.a_c, "p": p.p, "n": _finite(p.n),
        "alpha": p.alpha, "b_dgz": p.b_dgz, "rho": p.rho, "gamma0": p.gamma0,
        "regions": {k: bool(v) for k, v in vars(reg).items()},
        "fs_disagreements": reg.disagreements(),
        "notes": [],
    }
    if p.a == 0 and p.b == 0:
        payload["notes"].append("a = b = 0: alpha = 1 and the spherical model is the round sphere")
    if payload["fs_disagreements"]:
        payload["notes"].append("Felli-Schneider characterizations disagree here")
    if p.n_is_finite and p.alpha > 0 and p.n > 1:
        from .quadrature import normalization_Z
        payload["z"] = normalization_Z(p)
    _dump(payload, out)
    return EXIT_OK


def cmd_regions(args, out):
    from . import regions

    rows = regions.region_rows(args.d, args.a_min, args.a_max, args.steps)
    text = regions.to_csv(rows) if args.format == "csv" else regions.to_svg(rows, args.d)
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


def cmd_verify(args, out):
    from . import verify

    records = verify.run_suite(args.suite, args.d, args.seed)
    rep = verify.report(records, args.seed)
    if args.output:
        with open(args.output, "w") as fh:
            _dump(rep, fh)
    else:
        _dump(rep, out)
    return EXIT_OK if all(r.passed for r in records) else EXIT_FAIL


def _deficit_field(spec, params, grid):
    from . import inequalities as ineq
    from .fields import cyl_field

    kind, _, arg = spec.partition(":")
    if kind == "extremal":
        c = float(arg) if arg else 0.0
        return ineq.make_extremal(ineq.ExtremalSpec.normalized(c), params)
    if kind == "poincare-extremal":
        c = float(arg) if arg else 0.0
        return ineq.make_extremal(ineq.ExtremalSpec.normalized(c, ineq.ExtremalMode.POINCARE), params)
    if kind == "witness":
        return ineq.Witness(params.alpha)
    if kind == "constant":
        value = float(arg) if arg else 1.0
        return ineq.RadialProfile(value, 0.0, params.alpha, -1.0)
    if kind == "seeded":
        index, _, seed = arg.partition("@")
        return cyl_field(params.d, int(index), int(seed or 0))
    raise ValueError(f"unknown function spec {spec!r}")


def cmd_deficit(args, out):
    from . import inequalities as ineq
    from . import quadrature
    from .params import derive

    params = quadrature.attach_z(derive(args.a, args.b, args.d))
    grid = quadrature.build_grid(params.d, params, m=args.angular)
    try:
        field = _deficit_field(args.function, params, grid)
    except (ValueError, TypeError) as exc:
        raise _SpecParseError(str(exc)) from exc
    if args.kind == "sobolev":
        rep = ineq.sobolev_deficit(field, params, grid)
    else:
        rep = ineq.poincare_deficit(field, params, grid)
    payload = {"kind": args.kind, "function": args.function,
               "params": [params.a, params.b, params.d], **rep.as_dict()}
    _dump(payload, out)
    return EXIT_OK


class _SpecParseError(Exception):
    pass


# ---------------------------------------------------------------------------


def build_parser():
    parser = _Parser(prog="cknlab", description="Numerical checks for the CKN inequalities.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("params", help="derived parameters and region flags")
    p.add_argument("-a", type=float, required=True)
    p.add_argument("-b", type=float, required=True)
    p.add_argument("-d", type=int, required=True)
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("regions", help="Felli-Schneider and DGZ curves as CSV or SVG")
    p.add_argument("-d", type=int, required=True)
    p.add_argument("--a-min", type=float, default=-4.0)
    p.add_argument("--a-max", type=float, default=None, help="defaults to a_c - 0.01")
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--format", choices=("csv", "svg"), default="csv")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_regions)

    p = sub.add_parser("verify", help="run verification suites and emit a JSON report")
    p.add_argument("--suite", default="all",
                   choices=("params", "geometry", "gamma", "inequalities", "invariant", "all"))
    p.add_argument("--d", type=_d_list, default=[3, 4], help="comma-separated dimensions")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("deficit", help="Sobolev or Poincare deficit of a built-in function")
    p.add_argument("kind", choices=("sobolev", "poincare"))
    p.add_argument("function", help="extremal[:c] | poincare-extremal[:c] | witness | "
                                    "constant[:value] | seeded:INDEX[@SEED]")
    p.add_argument("-a", type=float, required=True)
    p.add_argument("-b", type=float, required=True)
    p.add_argument("-d", type=int, required=True)
    p.add_argument("--angular", type=int, default=10, help="nodes per polar angle")
    p.set_defaults(func=cmd_deficit)
    return parser


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "regions" and args.a_max is None:
        from .params import critical_a
        args.a_max = critical_a(args.d) - 0.01
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", OutsideFSWarning)
            return args.func(args, out)
    except (DegenerateParams, _SpecParseError, CknError, ValueError) as exc:
        print(f"cknlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
