"""
twistedtorus command line

Subcommands: word, surgery, realize, enumerate, verify. Output is deterministic; exit codes
are 0 on success, 2 on invalid input, 3 when the Whitehead budget runs out and 4 when a
verification or consistency check fails.
"""

import argparse
import json
import logging
import sys
from typing import Any, Literal

from pydantic import BaseModel, Field

from . import __version__
from .classify import PsfReport, psf_report, search_sf_fibers, side_words
from .colors import Colors
from .config import MIN_WHITEHEAD_BUDGET, settings
from .exceptions import InconsistentPipelineError, SearchBudgetExceeded, VerificationFailure
from .surgery import (
    TSV_COLUMNS,
    KnotRecord,
    Variant,
    enumerate_middle_psf,
    multiplicity_triple,
    nontorus_certificate,
    realize_triple,
)
from .ttk import TtkParams, jump_pattern, ttk_word, ttk_word_outside
from .verify import SUITES, run_suites

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_BUDGET = 3
EXIT_VERIFICATION = 4

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


class CliConfig(BaseModel):
    """Validated options shared by all subcommands"""

    output_format: Literal["json", "tsv", "text"] = "json"
    whitehead_budget: int = Field(default=settings.whitehead_budget, ge=MIN_WHITEHEAD_BUDGET)
    max_p: int = Field(default=20, ge=1)
    max_q: int | None = Field(default=None, ge=1)
    max_fiber: int = Field(default=10, ge=2)


def _emit(payload: Any) -> None:
    print(json.dumps(payload, indent=2))


def _params(args: argparse.Namespace) -> TtkParams:
    return TtkParams(p=args.p, q=args.q, r=args.r, m=args.m, n=args.n)


def cmd_word(args: argparse.Namespace, config: CliConfig) -> int:
    params = _params(args)
    if args.side == "pattern":
        text = str(jump_pattern(params.p, params.q, params.r_bar))
    elif args.side == "outside":
        text = str(ttk_word_outside(params))
    else:
        text = str(ttk_word(params.p, params.q, params.r, params.m))
    if config.output_format == "json":
        _emit({"params": params.model_dump(), "side": args.side, "word": text})
    else:
        print(text)
    return EXIT_OK


def _triple_source(params: TtkParams, report: PsfReport) -> tuple[TtkParams | None, str | None]:
    """Parameters whose inside is middle-SF and outside primitive, or the reason there are none"""
    if not report.flags.is_primitive_sf:
        return None, None
    if report.flags.is_torus_degenerate:
        return None, "torus-degenerate"
    if params.m != 1 or abs(params.n) != 1:
        return None, "multiplicities need m = 1 and n = +-1"
    if report.outside.is_primitive and report.inside.middle():
        return params, None
    if report.inside.is_primitive and report.outside.middle():
        if params.n == 1:
            # K(p,q,r,m,n) = K(q,p,r,n,m)
            return TtkParams(p=params.q, q=params.p, r=params.r, m=1, n=1), None
        return None, "middle-SF side is outside and the dual form K(q,p,r,-1,1) has m < 0"
    return None, "Seifert-fibered side is hyper or end, not middle"


def _surgery_payload(params: TtkParams, max_fiber: int) -> dict[str, Any]:
    report = psf_report(params)
    payload: dict[str, Any] = report.model_dump(mode="json", by_alias=True)
    for side, word in zip(("inside", "outside"), side_words(params)):
        if not payload[side]["matches"]:
            payload[side]["sf_search"] = {
                "max_fiber": max_fiber,
                "fibers": [list(pair) for pair in search_sf_fibers(word, max_fiber)],
            }
    source, reason = _triple_source(params, report)
    payload["multiplicities"] = None
    payload["certificate"] = None
    payload["computed_on"] = None
    payload["reason"] = reason
    if source is not None:
        triple = multiplicity_triple(source)
        payload["multiplicities"] = triple.label()
        payload["certificate"] = nontorus_certificate(source, triple.slope, triple).model_dump()
        payload["computed_on"] = str(source)
    return payload


def cmd_surgery(args: argparse.Namespace, config: CliConfig) -> int:
    params = _params(args)
    payload = _surgery_payload(params, config.max_fiber)
    if config.output_format == "json":
        _emit(payload)
        return EXIT_OK
    print(f"{params}  slope {payload['slope']}")
    for side in ("inside", "outside"):
        kinds = [match["kind"] for match in payload[side]["matches"]]
        if not kinds:
            search = payload[side]["sf_search"]
            found = ", ".join(f"({a},{b})" for a, b in search["fibers"]) or "none"
            kinds = [f"not detected (fibers up to {search['max_fiber']}: {found})"]
        print(f"  {side:<8} {', '.join(kinds)}")
    flags = [name for name, value in payload["flags"].items() if value]
    print(f"  flags    {', '.join(flags) or '-'}")
    if payload["multiplicities"] is not None:
        certified = payload["certificate"]["certified"]
        status = Colors.passed("non-torus") if certified else "not certified"
        via = "" if payload["computed_on"] == str(params) else f"  via {payload['computed_on']}"
        print(f"  mu       {payload['multiplicities']}  {status}{via}")
    elif payload["reason"]:
        print(f"  mu       - ({payload['reason']})")
    return EXIT_OK


def _print_records(records: list[KnotRecord], output_format: str) -> None:
    if output_format == "json":
        _emit([record.to_row() for record in records])
    elif output_format == "tsv":
        print("\t".join(TSV_COLUMNS))
        for record in records:
            print(record.to_tsv())
    else:
        for record in records:
            row = record.to_row()
            print(f"family {record.family}  {record.params}  slope {record.slope}  mu {row['mu']}")


def cmd_realize(args: argparse.Namespace, config: CliConfig) -> int:
    variant: Variant = "positive" if args.positive else "negative"
    record = realize_triple(args.mu1, args.mu2, args.mu3, variant)
    _print_records([record], config.output_format)
    return EXIT_OK


def cmd_enumerate(args: argparse.Namespace, config: CliConfig) -> int:
    families = set(args.family) if args.family else None
    records = enumerate_middle_psf(config.max_p, config.max_q, families)
    if args.eps is not None:
        records = [record for record in records if record.params.n == args.eps]
    _print_records(records, config.output_format)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, config: CliConfig) -> int:
    results = run_suites(args.level, args.suite or None)
    for result in results:
        logger.info("Suite %s took %.2fs", result.name, result.seconds)
    if config.output_format == "json":
        _emit([result.model_dump(exclude={"seconds"}) for result in results])
    else:
        print(Colors.heading(f"{'suite':<22} {'result':<6} {'cases':>8} {'failed':>7}"))
        for result in results:
            status = Colors.passed() if result.passed else Colors.failed()
            print(f"{result.name:<22} {status:<6} {result.cases:>8} {result.failures:>7}")
            if result.first_counterexample:
                print(f"    first counterexample: {result.first_counterexample}")
            for note in result.notes:
                print(f"    note: {note}")
    failed = [result.name for result in results if not result.passed]
    if failed:
        raise VerificationFailure(f"Failed suites: {', '.join(failed)}")
    return EXIT_OK


def _parse_args(argv: list[str] | None = None) -> argparse.Namespace:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", dest="output_format", choices=("json", "tsv", "text"))
    common.add_argument("--budget", type=int, help="Whitehead search node limit")

    parser = argparse.ArgumentParser(
        prog="twistedtorus",
        description="Twisted torus knot words, classification and surgery multiplicities",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    word = sub.add_parser("word", parents=[common], help="Print a twisted torus knot word")
    surgery = sub.add_parser(
        "surgery", parents=[common], help="Classify and compute multiplicities"
    )
    for command in (word, surgery):
        for name in ("p", "q", "r", "m", "n"):
            command.add_argument(name, type=int)
    word.add_argument("--side", choices=("inside", "outside", "pattern"), default="inside")
    surgery.add_argument(
        "--max-fiber",
        dest="max_fiber",
        type=int,
        default=10,
        help="bound of the general SF search for sides with no closed-form match",
    )

    realize = sub.add_parser("realize", parents=[common], help="Realize a multiplicity triple")
    for name in ("mu1", "mu2", "mu3"):
        realize.add_argument(name, type=int)
    variant = realize.add_mutually_exclusive_group()
    variant.add_argument("--negative", action="store_true", help="negative twisting (default)")
    variant.add_argument("--positive", action="store_true", help="positive twisting")

    enumerate_ = sub.add_parser(
        "enumerate", parents=[common], help="List primitive/middle-SF knots by family"
    )
    enumerate_.add_argument("--max-p", dest="max_p", type=int, default=20)
    enumerate_.add_argument("--max-q", dest="max_q", type=int)
    enumerate_.add_argument("--family", type=int, action="append", choices=range(1, 6))
    enumerate_.add_argument("--eps", type=int, choices=(1, -1))

    verify = sub.add_parser("verify", parents=[common], help="Run the property suites")
    verify.add_argument("--level", choices=("quick", "full"), default="quick")
    verify.add_argument("--suite", action="append", choices=sorted(SUITES))

    return parser.parse_args(argv)


COMMANDS = {
    "word": cmd_word,
    "surgery": cmd_surgery,
    "realize": cmd_realize,
    "enumerate": cmd_enumerate,
    "verify": cmd_verify,
}

DEFAULT_FORMATS = {"word": "text", "verify": "text"}


def main(argv: list[str] | None = None) -> int:
    args = _parse_args(argv)
    logging.basicConfig(level=settings.log_level.upper(), format=LOG_FORMAT, stream=sys.stderr)
    try:
        config = CliConfig(
            output_format=args.output_format or DEFAULT_FORMATS.get(args.command, "json"),
            whitehead_budget=args.budget if args.budget is not None else settings.whitehead_budget,
            max_p=getattr(args, "max_p", 20),
            max_q=getattr(args, "max_q", None),
            max_fiber=getattr(args, "max_fiber", 10),
        )
        settings.whitehead_budget = config.whitehead_budget
        return COMMANDS[args.command](args, config)
    except SearchBudgetExceeded as e:
        Colors.error(str(e))
        return EXIT_BUDGET
    except (VerificationFailure, InconsistentPipelineError) as e:
        Colors.error(str(e))
        return EXIT_VERIFICATION
    except ValueError as e:
        Colors.error(f"{type(e).__name__}: {e}")
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
