"""Command-line front end: integration, gap/HH bounds, expectations, divergences.

Exit codes: 0 success, 1 usage error (bad flags, unparseable input), 2
hypothesis failure (non-convex function, invalid density or distribution).
JSON reports are deterministic and expose enclosure endpoints verbatim
(``integral.lo``, ``integral.hi``, ``remainder.lo``, ``remainder.hi``,
``cells``, ``certified``); no computation happens in the rendering layer.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import divergence as div
from . import expr, pointwise, probability, quadrature
from .funcs import ConvexFunction, DomainError, Interval, NonConvexityError, check_convexity


class UsageError(Exception):
    pass


class HypothesisError(Exception):
    pass


class DistributionLoadError(UsageError):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; the CLI contract reserves 2
    # for hypothesis failures, so route usage problems through UsageError.
    def error(self, message):
        raise UsageError(message)


def load_distribution(path, fmt: Optional[str] = None, normalize: bool = False) -> div.DiscreteDistribution:
    """Read a distribution from CSV (one weight per line) or a JSON array.

    ``fmt`` defaults to the file extension.  Weights must sum to 1 within
    1e-9 unless ``normalize`` is set, in which case they are rescaled.
    """
    path = Path(path)
    if fmt is None:
        suffix = path.suffix.lower()
        if suffix == ".csv":
            fmt = "csv"
        elif suffix == ".json":
            fmt = "json"
        else:
            raise DistributionLoadError(
                f"{path}: cannot infer format from suffix {suffix!r}; pass csv or json"
            )
    try:
        text = path.read_text()
    except OSError as exc:
        raise DistributionLoadError(f"{path}: {exc}") from exc

    if fmt == "csv":
        weights = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line:
                continue
            try:
                weights.append(float(line))
            except ValueError:
                raise DistributionLoadError(
                    f"{path}: line {lineno}: not a number: {line!r}"
                ) from None
    elif fmt == "json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DistributionLoadError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
        if not isinstance(data, list) or not all(isinstance(x, (int, float)) for x in data):
            raise DistributionLoadError(f"{path}: expected a JSON array of numbers")
        weights = [float(x) for x in data]
    else:
        raise DistributionLoadError(f"unknown distribution format {fmt!r}")

    if not weights:
        raise DistributionLoadError(f"{path}: no weights found")
    total = math.fsum(weights)
    if abs(total - 1.0) > 1e-9:
        if not normalize:
            raise HypothesisError(
                f"{path}: weights sum to {total!r}, not 1 (pass --normalize to rescale)"
            )
        weights = [w / total for w in weights]
    try:
        return div.DiscreteDistribution(tuple(weights))
    except ValueError as exc:
        raise HypothesisError(f"{path}: {exc}") from exc


def _jsonable(obj):
    if isinstance(obj, float):
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        if math.isnan(obj):
            return "nan"
        return obj
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _render(report: dict, output_format: str) -> str:
    if output_format == "json":
        return json.dumps(_jsonable(report), indent=2)
    lines = []

    def walk(prefix, value):
        if isinstance(value, dict):
            for k, v in value.items():
                walk(f"{prefix}.{k}" if prefix else k, v)
        else:
            lines.append(f"{prefix} = {_jsonable(value)!r}")

    walk("", report)
    return "\n".join(lines)


def _build_function(args) -> ConvexFunction:
    iv = Interval(args.interval[0], args.interval[1])
    try:
        f = expr.to_convex_function(args.fn, iv, args.var)
    except expr.ParseError as exc:
        raise UsageError(f"--fn: {exc}") from exc
    report = check_convexity(f, gridpoints=101)
    if not report.passed and not getattr(args, "allow_nonconvex", False):
        raise HypothesisError(
            f"{args.fn!r} failed the convexity check on [{iv.a}, {iv.b}]: "
            f"worst secant violation {report.worst_violation:.3e} at {report.witness}; "
            "pass --allow-nonconvex to proceed without certification"
        )
    setattr(args, "_certified", report.passed)
    return f


def _enclosure_dict(enc) -> dict:
    return {"lo": enc.lo, "hi": enc.hi}


def _cmd_integrate(args) -> dict:
    f = _build_function(args)
    if args.n is not None:
        partition = quadrature.uniform_partition(f.domain, args.n, args.xi_rule)
        result = quadrature.integrate(f, partition)
    else:
        result = quadrature.adaptive_integrate(f, eps=args.eps, max_cells=args.max_cells)
    return {
        "command": "integrate",
        "fn": args.fn,
        "interval": [f.domain.a, f.domain.b],
        "gn": result.gn,
        "integral": _enclosure_dict(result.integral),
        "remainder": _enclosure_dict(result.remainder),
        "width": result.integral.width,
        "cells": result.cells,
        "converged": result.converged,
        "certified": args._certified,
    }


def _cmd_gap(args) -> dict:
    f = _build_function(args)
    query = pointwise.GapQuery(f, args.x)
    enclosure = pointwise.gap_enclosure(query)
    return {
        "command": "gap",
        "fn": args.fn,
        "interval": [f.domain.a, f.domain.b],
        "x": args.x,
        "lower": enclosure.lo,
        "upper": enclosure.hi,
        "gap": pointwise.gap(query),
        "certified": args._certified,
    }


def _cmd_hh(args) -> dict:
    f = _build_function(args)
    enclosure = pointwise.hh_bounds(f)
    a, b = f.domain.a, f.domain.b
    reference = 0.5 * (f(a) + f(b)) - pointwise._reference_integral(f, a, b) / (b - a)
    return {
        "command": "hh",
        "fn": args.fn,
        "interval": [a, b],
        "lower": enclosure.lo,
        "upper": enclosure.hi,
        "difference": reference,
        "certified": args._certified,
    }


def _build_density(args) -> probability.MonotoneDensity:
    iv = Interval(args.interval[0], args.interval[1])
    try:
        tree = expr.parse(args.density, args.var)
    except expr.ParseError as exc:
        raise UsageError(f"--density: {exc}") from exc
    pdf = lambda t: expr.eval_expr(tree, t)
    return probability.continuous_density(iv, pdf, label=args.density)


def _cmd_expectation(args) -> dict:
    d = _build_density(args)
    report = probability.validate_density(d)
    if not report.valid:
        raise HypothesisError(
            f"{args.density!r} is not a valid nondecreasing density on "
            f"[{d.domain.a}, {d.domain.b}]: " + "; ".join(report.messages)
        )
    if args.x is not None:
        enclosure = probability.expectation_enclosure(d, args.x)
    else:
        enclosure = probability.midpoint_expectation_enclosure(d)
    return {
        "command": "expectation",
        "density": args.density,
        "interval": [d.domain.a, d.domain.b],
        "expectation": {"lo": enclosure.lo, "hi": enclosure.hi},
        "x_used": enclosure.x_used,
        "mass_bracket": list(report.normalization),
    }


def _cmd_divergence(args) -> dict:
    generator = div.generator_catalog(args.generator)
    p = load_distribution(args.p, args.p_format, args.normalize)
    q = load_distribution(args.q, args.q_format, args.normalize)
    sandwich = div.sandwich_report(generator, p, q, eps=args.eps)
    gap = div.gap_enclosure(generator, p, q)
    return {
        "command": "divergence",
        "generator": generator.label,
        "n": len(p),
        "csiszar": 2.0 * sandwich.half_csiszar,
        "lin_wong": sandwich.lin_wong,
        "hh": _enclosure_dict(sandwich.hh),
        "half_csiszar": sandwich.half_csiszar,
        "sandwich_holds": sandwich.holds,
        "gap": _enclosure_dict(gap),
    }


def _cmd_check(args) -> dict:
    report: dict = {"command": "check"}
    failed = False
    if args.fn is not None:
        if args.interval is None:
            raise UsageError("--fn requires --interval")
        iv = Interval(args.interval[0], args.interval[1])
        try:
            f = expr.to_convex_function(args.fn, iv, args.var)
        except expr.ParseError as exc:
            raise UsageError(f"--fn: {exc}") from exc
        conv = check_convexity(f, gridpoints=101)
        report["convexity"] = {
            "fn": args.fn,
            "passed": conv.passed,
            "worst_violation": conv.worst_violation,
            "witness": list(conv.witness) if conv.witness else None,
        }
        failed = failed or not conv.passed
    if args.density is not None:
        if args.interval is None:
            raise UsageError("--density requires --interval")
        d = _build_density(args)
        dens = probability.validate_density(d)
        report["density"] = {
            "density": args.density,
            "valid": dens.valid,
            "nonnegative": dens.nonnegative,
            "nondecreasing": dens.nondecreasing,
            "mass_bracket": list(dens.normalization),
            "messages": list(dens.messages),
        }
        failed = failed or not dens.valid
    if args.dist is not None:
        dist = load_distribution(args.dist, normalize=args.normalize)
        report["distribution"] = {
            "path": str(args.dist),
            "n": len(dist),
            "valid": True,
        }
    if not ("convexity" in report or "density" in report or "distribution" in report):
        raise UsageError("check needs at least one of --fn, --density, --dist")
    report["passed"] = not failed
    if failed:
        raise HypothesisError(_render(report, "json"))
    return report


def _add_common(parser, fn_flag: bool = True):
    if fn_flag:
        parser.add_argument("--fn", required=True, help="function as expression text")
    parser.add_argument(
        "--interval", nargs=2, type=float, required=True, metavar=("A", "B")
    )
    parser.add_argument("--var", default="x", help="name of the free variable")
    parser.add_argument("--format", dest="output_format", choices=("json", "table"), default="json")
    parser.add_argument("--allow-nonconvex", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="trapbound",
        description="Verified integration and divergence bounds for convex functions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_int = sub.add_parser("integrate", help="integrate with a certified enclosure")
    _add_common(p_int)
    p_int.add_argument("--eps", type=float, default=1e-6, help="target enclosure width")
    p_int.add_argument("--max-cells", type=int, default=10_000)
    p_int.add_argument("--n", type=int, default=None, help="fixed uniform partition size")
    p_int.add_argument("--xi-rule", choices=("midpoint", "left", "right"), default="midpoint")

    p_gap = sub.add_parser("gap", help="generalized trapezoid gap bounds at a split point")
    _add_common(p_gap)
    p_gap.add_argument("--x", type=float, required=True)

    p_hh = sub.add_parser("hh", help="Hermite-Hadamard defect bounds")
    _add_common(p_hh)

    p_exp = sub.add_parser("expectation", help="expectation bounds for a monotone density")
    p_exp.add_argument("--density", required=True, help="density as expression text")
    p_exp.add_argument("--interval", nargs=2, type=float, required=True, metavar=("A", "B"))
    p_exp.add_argument("--x", type=float, default=None, help="split point (default midpoint)")
    p_exp.add_argument("--var", default="x")
    p_exp.add_argument("--format", dest="output_format", choices=("json", "table"), default="json")

    p_div = sub.add_parser("divergence", help="Csiszar / Lin-Wong / HH divergences")
    p_div.add_argument("--generator", required=True, choices=("chi2", "chi_squared", "kl", "tv", "total_variation", "hellinger"))
    p_div.add_argument("--p", required=True, help="path to the first distribution")
    p_div.add_argument("--q", required=True, help="path to the second distribution")
    p_div.add_argument("--p-format", choices=("csv", "json"), default=None)
    p_div.add_argument("--q-format", choices=("csv", "json"), default=None)
    p_div.add_argument("--normalize", action="store_true")
    p_div.add_argument("--eps", type=float, default=1e-9)
    p_div.add_argument("--format", dest="output_format", choices=("json", "table"), default="json")

    p_chk = sub.add_parser("check", help="validate hypotheses without computing bounds")
    p_chk.add_argument("--fn", default=None)
    p_chk.add_argument("--density", default=None)
    p_chk.add_argument("--dist", default=None)
    p_chk.add_argument("--interval", nargs=2, type=float, default=None, metavar=("A", "B"))
    p_chk.add_argument("--var", default="x")
    p_chk.add_argument("--normalize", action="store_true")
    p_chk.add_argument("--format", dest="output_format", choices=("json", "table"), default="json")

    return parser


_HANDLERS = {
    "integrate": _cmd_integrate,
    "gap": _cmd_gap,
    "hh": _cmd_hh,
    "expectation": _cmd_expectation,
    "divergence": _cmd_divergence,
    "check": _cmd_check,
}


def run(args) -> dict:
    """Execute a parsed command; raises UsageError / HypothesisError."""
    return _HANDLERS[args.command](args)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        report = run(args)
    except UsageError as exc:
        print(f"trapbound: error: {exc}", file=sys.stderr)
        return 1
    except (expr.ParseError, DomainError, ValueError) as exc:
        print(f"trapbound: error: {exc}", file=sys.stderr)
        return 1
    except (HypothesisError, NonConvexityError) as exc:
        print(f"trapbound: hypothesis failure: {exc}", file=sys.stderr)
        return 2
    print(_render(report, args.output_format))
    return 0


if __name__ == "__main__":
    sys.exit(main())
