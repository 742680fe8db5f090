"""Command-line front end: ``free-products <verb> [options]``.

Data goes to stdout (or ``--out``) as compact, key-sorted JSON, CSV or one
partition per line. Logs and errors go to stderr; an error is one line of JSON
and exit code 1, a usage error exits with 2.
"""

import argparse
import json
import logging
import sys
from fractions import Fraction
from typing import Any, List, Optional, Sequence, TextIO

from pydantic import ValidationError

from free_products.__version__ import __version__
from free_products.bounds import certify, edge_table_csv, estimate_support_edge
from free_products.convolution import (
    MeasureSpec,
    Strategy,
    boxplus_k,
    boxtimes_k,
    boxtimes_k_boolean,
    boxtimes_power,
)
from free_products.enumeration import (
    Family,
    count_family,
    iter_k_divisible,
    iter_k_equal,
    iter_nc,
    iter_nc21,
)
from free_products.exceptions import FreeProductsError, ResourceLimitError
from free_products.measures import (
    LawKind,
    NamedLaw,
    eventual_positivity_scan,
    sakuma_limit_scan,
)
from free_products.models import format_decimal, format_rational, parse_rational
from free_products.partitions import (
    TypeVector,
    decompose_kreweras,
    format_partition,
    kreweras,
    parse_partition,
)
from free_products.selftest import run_selftest
from free_products.settings import ApplicationSettings

_logger = logging.getLogger(__name__)

LOG_FORMAT = "%(levelname)s: [%(filename)s:%(lineno)s] %(message)s"


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that raises instead of exiting, so ``run`` owns the exit code."""

    def error(self, message: str) -> Any:
        raise _UsageError(f"{self.prog}: error: {message}")


def _int_list(text: str) -> List[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'") from e


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from e


def _rational_list(text: str) -> List[Fraction]:
    return [_rational(x) for x in text.split(",")]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="free-products", description="Exact combinatorics of products of free random variables.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "--unsafe-ceiling",
        type=int,
        default=None,
        help="Override every enumeration ceiling for this run",
    )
    parser.add_argument("--log-level", type=str, default=None, help="Log level, overriding the configured one")
    verbs = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    count = verbs.add_parser("count", help="Closed-form partition counts")
    count.add_argument("--family", choices=[f.value for f in Family], required=True)
    count.add_argument("--k", type=int, default=1)
    count.add_argument("--n", type=int, default=None)
    count.add_argument("--type", type=_int_list, default=None, help="Multiplicities r1,r2,...,rn")
    count.add_argument("--kr-type", type=_int_list, default=None, help="Kreweras multiplicities b1,...,bn")

    enumerate_ = verbs.add_parser("enumerate", help="Stream partitions, one per line")
    enumerate_.add_argument(
        "--family", choices=[Family.NC.value, Family.K_EQUAL.value, Family.K_DIVISIBLE.value, Family.NC21.value]
    )
    enumerate_.add_argument("--n", type=int, required=True)
    enumerate_.add_argument("--k", type=int, default=1)
    enumerate_.add_argument("--first-block", type=_int_list, default=None, help="Only the shard with this block of 1")
    enumerate_.add_argument("--format", choices=["text", "json"], default="text")

    kr = verbs.add_parser("kreweras", help="Kreweras complement of a partition")
    kr.add_argument("--in", dest="partition", required=True, help="Partition literal, or '-' for stdin")
    kr.add_argument("--decompose", type=int, default=None, metavar="K", help="Also split Kr by residue mod K")
    kr.add_argument("--format", choices=["text", "json"], default="text")

    convolve = verbs.add_parser("convolve", help="Convolve measure specs")
    convolve.add_argument("--op", choices=["boxtimes", "boxplus", "boolean"], required=True)
    convolve.add_argument("--order", type=int, required=True)
    convolve.add_argument("--strategy", choices=[s.value for s in Strategy], default=None)
    convolve.add_argument("--out", default=None, help="Output path (default stdout)")
    convolve.add_argument("specs", nargs="+", help="MeasureSpec JSON files, '-' for stdin")

    bounds = verbs.add_parser("bounds", help="Certified support-edge bounds")
    bounds.add_argument("--k", type=int, required=True)
    bounds.add_argument("--L", dest="support_bound", type=_rational, required=True)
    bounds.add_argument("--sigma2", type=_rational, required=True)
    bounds.add_argument("--nonneg", action="store_true", help="All free cumulants are non-negative")
    bounds.add_argument("--spec", default=None, help="MeasureSpec whose k-th free power is estimated")
    bounds.add_argument("--order", type=int, default=12)
    bounds.add_argument("--csv", default=None, help="Write the (n, m_n^{1/n}) table to this path")

    laws = [LawKind.FREE_POISSON.value, LawKind.TWO_POINT.value, LawKind.SHIFTED_SEMICIRCLE.value]
    for name, help_text in (("limits", "Limit theorem checks on a k grid"), ("positivity", "Eventual positivity")):
        sub = verbs.add_parser(name, help=help_text)
        sub.add_argument("--law", choices=laws, required=True)
        sub.add_argument("--n", type=int, required=True)
        sub.add_argument("--sigma2", type=_rational, default=None)
        sub.add_argument("--atoms", type=_rational_list, default=None)
        if name == "limits":
            sub.add_argument("--kgrid", type=_int_list, required=True)
            sub.add_argument("--boolean", action="store_true")
            sub.add_argument("--format", choices=["json", "csv"], default="json")
        else:
            sub.add_argument("--k-max", type=int, required=True)

    verbs.add_parser("selftest", help="Run the cross-engine oracle suite")
    return parser


def _dumps(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r") as f:
        return f.read()


def _spec_json(spec: MeasureSpec) -> Any:
    return spec.model_dump(mode="json", by_alias=True, exclude_none=True)


class _Context:
    def __init__(self, args: argparse.Namespace, settings: ApplicationSettings, out: TextIO) -> None:
        self.args = args
        self.settings = settings
        self.out = out
        override = args.unsafe_ceiling
        engine = settings.engine
        self.stream_ceiling = engine.stream_ceiling if override is None else override
        self.enumeration_ceiling = engine.enumeration_ceiling if override is None else override
        self.direct_ceiling = min(engine.direct_ceiling, self.enumeration_ceiling) if override is None else override
        self.precision = settings.report.precision

    def emit(self, text: str) -> None:
        self.out.write(text + "\n")


def _count(ctx: _Context) -> None:
    args = ctx.args
    family = Family(args.family)
    type_vector = None if args.type is None else TypeVector(n=len(args.type), r=tuple(args.type))
    kr_type = None if args.kr_type is None else TypeVector(n=len(args.kr_type), r=tuple(args.kr_type))
    if args.n is None and type_vector is None:
        raise _UsageError(f"count --family {family.value} needs --n")
    table = count_family(family, n=args.n or 0, k=args.k, type_vector=type_vector, kreweras_type=kr_type)
    ctx.emit(_dumps({"count": str(table.count)}))


def _enumerate(ctx: _Context) -> None:
    args = ctx.args
    family = Family(args.family or Family.NC.value)
    size = args.n if family is Family.NC else args.k * args.n
    if size > ctx.stream_ceiling:
        raise ResourceLimitError(
            f"streaming partitions of [{size}] exceeds the stream ceiling {ctx.stream_ceiling}; use --unsafe-ceiling"
        )
    ceiling = ctx.enumeration_ceiling
    if family is Family.NC:
        stream = iter_nc(args.n, args.first_block, ceiling)
    elif family is Family.K_EQUAL:
        stream = iter_k_equal(args.k, args.n, args.first_block, ceiling)
    elif family is Family.K_DIVISIBLE:
        stream = iter_k_divisible(args.k, args.n, args.first_block, ceiling)
    else:
        stream = iter_nc21(args.k, args.n, args.first_block, ceiling)
    for p in stream:
        ctx.emit(format_partition(p, args.format))


def _kreweras(ctx: _Context) -> None:
    args = ctx.args
    p = parse_partition(_read(args.partition) if args.partition == "-" else args.partition)
    complement = kreweras(p)
    parts = [] if args.decompose is None else decompose_kreweras(p, args.decompose)
    if args.format == "json":
        payload: Any = {"kreweras": complement.to_json()}
        if args.decompose is not None:
            payload["parts"] = [q.to_json() for q in parts]
        ctx.emit(_dumps(payload))
        return
    ctx.emit(str(complement))
    for q in parts:
        ctx.emit(str(q))


def _convolve(ctx: _Context) -> None:
    args = ctx.args
    specs = [MeasureSpec.model_validate_json(_read(path)) for path in args.specs]
    strategy = None if args.strategy is None else Strategy(args.strategy)
    if args.op == "boxplus":
        result = boxplus_k(specs, args.order)
    elif args.op == "boolean":
        result = boxtimes_k_boolean(specs, args.order, strategy, ctx.direct_ceiling)
    else:
        result = boxtimes_k(specs, args.order, strategy, ctx.direct_ceiling)
    text = _dumps(_spec_json(result))
    if args.out is None:
        ctx.emit(text)
        return
    with open(args.out, "w") as f:
        f.write(text + "\n")
    _logger.info(f"wrote {args.op} result to {args.out}")


def _bounds(ctx: _Context) -> None:
    args = ctx.args
    certificate = certify(args.k, args.support_bound, args.sigma2, args.nonneg)
    payload: Any = {"certificate": certificate.model_dump(mode="json", by_alias=True)}
    if args.spec is not None:
        spec = MeasureSpec.model_validate_json(_read(args.spec))
        estimates = estimate_support_edge(boxtimes_power(spec, args.k, args.order), ctx.precision)
        payload["estimates"] = [format_rational(e) for e in estimates]
        if args.csv is not None:
            with open(args.csv, "w") as f:
                f.write(edge_table_csv(estimates, ctx.precision))
    ctx.emit(_dumps(payload))


def _law(args: argparse.Namespace) -> NamedLaw:
    return NamedLaw(kind=LawKind(args.law), sigma2=args.sigma2, atoms=None if args.atoms is None else tuple(args.atoms))


def _limits(ctx: _Context) -> None:
    args = ctx.args
    spec = _law(args).spec(max(args.n, 2))
    checks = sakuma_limit_scan(spec, args.n, args.kgrid, boolean=args.boolean)
    if args.format == "json":
        ctx.emit(_dumps([c.model_dump(mode="json") for c in checks]))
        return
    ctx.emit("k,n,flavor,computed,target,deviation")
    for c in checks:
        row = [str(c.k), str(c.n), c.flavor.value]
        row += [format_decimal(x, ctx.precision) for x in (c.computed, c.target, c.deviation)]
        ctx.emit(",".join(row))


def _positivity(ctx: _Context) -> None:
    args = ctx.args
    spec = _law(args).spec(max(args.n, 2))
    scan = eventual_positivity_scan(spec, args.n, args.k_max)
    ctx.emit(_dumps(scan.model_dump(mode="json")))


def _selftest(ctx: _Context) -> int:
    report = run_selftest()
    for result in report.results:
        line = f"PASS {result.name}" if result.passed else f"FAIL {result.name}: {result.detail}"
        ctx.emit(line)
    return 0 if report.passed else 1


_HANDLERS = {
    "count": _count,
    "enumerate": _enumerate,
    "kreweras": _kreweras,
    "convolve": _convolve,
    "bounds": _bounds,
    "limits": _limits,
    "positivity": _positivity,
}


def _error(stderr: TextIO, e: BaseException) -> int:
    message = " ".join(str(e).split())
    stderr.write(_dumps({"error": type(e).__name__, "message": message}) + "\n")
    return 1


def run(
    argv: Optional[Sequence[str]] = None,
    settings: Optional[ApplicationSettings] = None,
    stdout: Optional[TextIO] = None,
    stderr: Optional[TextIO] = None,
) -> int:
    """Parse ``argv``, dispatch to the engines and return the exit code."""
    out = sys.stdout if stdout is None else stdout
    err = sys.stderr if stderr is None else stderr
    try:
        args = build_parser().parse_args(argv)
    except _UsageError as e:
        err.write(f"{e}\n")
        return 2
    except SystemExit as e:
        # --help and --version
        return e.code if isinstance(e.code, int) else 0

    try:
        settings = ApplicationSettings() if settings is None else settings
        level = (args.log_level or settings.report.log_level).upper()
        logging.basicConfig(format=LOG_FORMAT, level=level, stream=err, force=True)
        if args.unsafe_ceiling is not None:
            _logger.warning(f"enumeration ceilings overridden to {args.unsafe_ceiling}")
        ctx = _Context(args, settings, out)
        if args.verb == "selftest":
            return _selftest(ctx)
        _HANDLERS[args.verb](ctx)
    except _UsageError as e:
        err.write(f"{e}\n")
        return 2
    except (FreeProductsError, ValidationError, OSError, ValueError) as e:
        return _error(err, e)
    return 0


def main() -> None:
    sys.exit(run())
