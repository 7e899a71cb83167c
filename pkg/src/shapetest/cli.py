"""``shapetest`` command line.

Exit codes: 0 success (including a rejected null), 2 bad input or
parameters, 3 focal point, 4 numerical breakdown.
"""
import argparse
import os
import sys

from . import montecarlo as mc
from . import report
from .errors import FocalPoint, InputError, NumericalError, DomainError
from .estimators import Location, Sample, extrinsic_estimate
from .landmarks import Format, parse_landmarks
from .report import icon, representative
from .shapes import to_shape
from .svg import write_svg
from .twosample import Policy, Pooling, two_sample_test

EXIT_OK, EXIT_INPUT, EXIT_FOCAL, EXIT_NUMERICAL = 0, 2, 3, 4
SEED_ENV = "SHAPETEST_SEED"


def _load(path, fmt):
    lf = parse_landmarks(path, fmt)
    shapes = [to_shape(c) for c in lf.configurations]
    return Sample.from_shapes(shapes), lf.warnings


def _emit(doc, out):
    text = report.dumps(doc)
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_estimate(args):
    s, warnings = _load(args.input, args.format)
    est = extrinsic_estimate(s, args.location)
    result = report.estimate_to_json(est)
    _emit(report.document("estimate", result, [args.input], warnings), args.out)
    if args.plot:
        write_svg(args.plot, [(f"{est.kind.value} (n={s.n})", result["icon"])])
    return EXIT_OK


def cmd_two_sample(args):
    sa, wa = _load(args.a, args.format)
    sb, wb = _load(args.b, args.format)
    policy = Policy.PINV if args.pseudo_inverse else Policy.STRICT
    pooling = Pooling(args.pooling) if args.pooling else None
    rep = two_sample_test(sa, sb, args.location, args.alpha, args.method, policy, pooling)
    result = report.two_sample_to_json(rep)
    warnings = [f"a: {w}" for w in wa] + [f"b: {w}" for w in wb]
    if rep.pseudo_inverse_used:
        warnings.append(
            f"covariance was rank deficient; Moore-Penrose inverse used with df={rep.df}, "
            "outside the asymptotic chi-square theory"
        )
    _emit(report.document("two-sample", result, [args.a, args.b], warnings), args.out)
    if args.plot:
        ga, gb = rep.group_estimates
        write_svg(args.plot, [
            (f"group a (n={rep.n})", icon(representative(ga.point))),
            (f"group b (n={rep.m})", icon(representative(gb.point))),
            ("pooled", result["pooled"]["icon"]),
        ])
    return EXIT_OK


def resolve_seed(flag, environ=None):
    """The ``--seed`` flag wins over ``SHAPETEST_SEED``; the default is 0."""
    if flag is not None:
        return flag
    value = (os.environ if environ is None else environ).get(SEED_ENV)
    if value is None or value == "":
        return 0
    try:
        return int(value)
    except ValueError:
        raise DomainError(f"{SEED_ENV}={value!r} is not an integer") from None


def _spec(args, seed, center=None):
    return mc.SamplerSpec.projected_gaussian_cp(args.k, center, args.concentration, seed,
                                                args.scales)


def cmd_simulate(args):
    seed = resolve_seed(args.seed)
    if args.replicates < 1 or args.n < 2 or args.m < 2:
        raise DomainError("need --replicates >= 1 and --n, --m >= 2")
    if not 0.0 < args.alpha < 1.0:
        raise DomainError("--alpha must lie in (0, 1)")
    pooling = Pooling(args.pooling) if args.pooling else None
    if args.experiment == "level":
        res = mc.run_level_experiment(_spec(args, seed), args.n, args.m, args.replicates,
                                      args.alpha, args.location, args.method, pooling,
                                      args.workers)
        result = report.experiment_to_json(res)
    elif args.experiment == "one-sample":
        res = mc.run_one_sample_experiment(_spec(args, seed), args.n, args.replicates,
                                           args.alpha, args.location, workers=args.workers)
        result = report.experiment_to_json(res)
    elif args.experiment == "power":
        if args.k != 3:
            raise DomainError("power runs with --separation are defined for --k 3")
        ca, cb = mc.separated_centers(args.separation, args.k)
        res = mc.run_power_experiment(_spec(args, seed, ca), _spec(args, seed, cb), args.n,
                                      args.m, args.replicates, args.alpha, args.location,
                                      args.method, pooling, args.workers)
        res.parameters["separation"] = args.separation
        result = report.experiment_to_json(res)
    else:
        if args.seeds < 1 or any(n < 1 for n in args.n_grid):
            raise DomainError("need --seeds >= 1 and positive --n-grid entries")
        res = mc.run_consistency_experiment(_spec(args, seed), args.n_grid, args.seeds,
                                            args.location)
        result = report.consistency_to_json(res)
    _emit(report.document("simulate", result), args.out)
    return EXIT_OK


def _int_list(text):
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text):
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser():
    p = argparse.ArgumentParser(
        prog="shapetest",
        description="Extrinsic means/antimeans and two-sample tests on planar shape space.",
    )
    sub = p.add_subparsers(dest="command", required=True)
    loc = dict(choices=[x.value for x in Location], default="antimean",
               help="location to estimate or test (default: antimean)")
    fmt = dict(choices=[f.value for f in Format], default=None,
               help="landmark file format (default: detect from the first line)")

    e = sub.add_parser("estimate", help="extrinsic sample mean or antimean of one file")
    e.add_argument("--input", required=True)
    e.add_argument("--location", **loc)
    e.add_argument("--format", **fmt)
    e.add_argument("--out", help="write the JSON report here instead of stdout")
    e.add_argument("--plot", help="write an SVG icon of the estimate")
    e.set_defaults(func=cmd_estimate)

    t = sub.add_parser("two-sample", help="chi-square test for a common mean or antimean")
    t.add_argument("--a", required=True)
    t.add_argument("--b", required=True)
    t.add_argument("--location", **loc)
    t.add_argument("--alpha", type=float, default=0.05)
    t.add_argument("--method", choices=["vw", "generic"], default="vw")
    t.add_argument("--pooling", choices=[x.value for x in Pooling], default=None,
                   help="pooled estimate (default: ambient for vw, projection for generic)")
    t.add_argument("--pseudo-inverse", action="store_true",
                   help="use a Moore-Penrose inverse when a covariance is singular")
    t.add_argument("--format", **fmt)
    t.add_argument("--out")
    t.add_argument("--plot", help="write SVG icons of both groups and the pooled estimate")
    t.set_defaults(func=cmd_two_sample)

    s = sub.add_parser("simulate", help="Monte-Carlo level, power and consistency runs")
    s.add_argument("experiment", choices=["level", "power", "consistency", "one-sample"])
    s.add_argument("--k", type=int, default=3)
    s.add_argument("--n", type=int, default=200)
    s.add_argument("--m", type=int, default=200)
    s.add_argument("--replicates", type=int, default=2000)
    s.add_argument("--alpha", type=float, default=0.05)
    s.add_argument("--seed", type=int, default=None,
                   help=f"base seed; falls back to ${SEED_ENV}, then 0")
    s.add_argument("--location", **loc)
    s.add_argument("--method", choices=["vw", "generic"], default="vw")
    s.add_argument("--pooling", choices=[x.value for x in Pooling], default=None)
    s.add_argument("--concentration", type=float, default=2.0)
    s.add_argument("--scales", type=_float_list, default=None,
                   help="comma-separated noise scales, one per coordinate of C^(k-1)")
    s.add_argument("--separation", type=float, default=0.4,
                   help="chord distance between the two locations (power, k=3)")
    s.add_argument("--n-grid", type=_int_list, default=(100, 1000, 10000))
    s.add_argument("--seeds", type=int, default=100)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--out")
    s.set_defaults(func=cmd_simulate)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FocalPoint as exc:
        print(f"shapetest: focal point: {exc}", file=sys.stderr)
        return EXIT_FOCAL
    except NumericalError as exc:
        print(f"shapetest: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (InputError, OSError) as exc:
        print(f"shapetest: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
