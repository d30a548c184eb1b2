"""
factoriza command line front end

Subcommands:
    verify          instantiate table rows and verify them
    search-regular  regular subgroups of a named transitive group
    report          per-table coverage (and order arithmetic)

Exit codes: 0 all pass, 1 verification mismatch, 2 usage error, 3 resource cap.
"""

import argparse
import json
import logging
import sys
from typing import Optional, Sequence

from pydantic import ValidationError as PydanticValidationError

from src.factoriza.config import config
from src.factoriza.models.report import SCHEMA_VERSION
from src.factoriza.models.run_config import Command, OutputFormat, RunConfig
from src.factoriza.services import runner
from src.factoriza.services.tables_data import arithmetic_report, coverage_report
from src.factoriza.utils.exceptions import (
    BaseAppException,
    CapExceededError,
    SelectorError,
    ValidationError,
)
from src.factoriza.utils.logger import setup_logger

EXIT_PASS = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2
EXIT_CAP = 3

logger = logging.getLogger(__name__)


def _int_list(text: str) -> list[int]:
    """'2,3,5' or '2-5' -> list of ints"""
    values: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part[1:]:
            lo, hi = part.split("-", 1)
            values.extend(range(int(lo), int(hi) + 1))
        elif part:
            values.append(int(part))
    return values


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="Seed of every random walk (default: FACTORIZA_SEED)")
    common.add_argument("--format", choices=[f.value for f in OutputFormat], default=OutputFormat.HUMAN.value)
    common.add_argument("--output", default=None, help="Write the report here instead of stdout")
    common.add_argument("--log-level", default=None, help="Log level (logs go to stderr)")

    parser = argparse.ArgumentParser(prog="factoriza", description="Solvable factorizations G = HK, checked by computation.")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="Verify table rows")
    v.add_argument("--table", default=None, help="T1 .. T7")
    v.add_argument("--case", action="append", default=[], help="Row number or family name (repeatable)")
    v.add_argument("--n", type=_int_list, default=[], help="Values of n, e.g. 3 or 2,3 or 2-5")
    v.add_argument("--m", type=_int_list, default=[])
    v.add_argument("--q", type=_int_list, default=[])
    v.add_argument("--variant", default=None, help="H-shape variant of an exact row")
    v.add_argument("--outer", type=int, default=None, help="O = 1 or 2 for exact rows with an outer part")
    v.add_argument("--negative-control", action="store_true")
    v.add_argument("--all-tractable", action="store_true", help="Every verified row")
    v.add_argument("--include-sporadic", action="store_true", help="Also run the optional J2/HS rows")
    v.add_argument("--workers", type=int, default=None, help="Worker pool size (default: CPU count)")
    v.add_argument("--domain-cap", type=int, default=None)
    v.add_argument("--coset-cap", type=int, default=None)
    v.add_argument("--field-cap", type=int, default=None)

    s = sub.add_parser("search-regular", parents=[common], help="Regular subgroups of a transitive group")
    s.add_argument("--group", required=True, help=", ".join(runner.SEARCH_GROUPS))
    s.add_argument("--nilpotent-only", action="store_true")

    r = sub.add_parser("report", parents=[common], help="Coverage summary")
    r.add_argument("--arithmetic", action="store_true", help="Also run the order arithmetic on every row")
    return parser


def _run_config(args: argparse.Namespace) -> RunConfig:
    fields = {k.replace("-", "_"): v for k, v in vars(args).items() if k not in ("log_level", "arithmetic")}
    fields["command"] = Command(args.command)
    return RunConfig(**{k: v for k, v in fields.items() if v is not None})


def _emit(text: str, run: RunConfig) -> None:
    if run.output:
        with open(run.output, "w", encoding="utf-8") as fh:
            fh.write(text)
        logger.info("report written to %s", run.output)
    else:
        sys.stdout.write(text)


def cmd_verify(run: RunConfig) -> int:
    """Verify the selected instances; 0 iff every verification passes."""
    jobs = runner.select_jobs(run)
    outcomes = runner.run_jobs(jobs, run.workers or config.WORKERS, run.cap_overrides())
    runner.raise_first_error(outcomes)
    if run.format is OutputFormat.STRUCTURED:
        _emit(runner.structured_report(outcomes, run), run)
    else:
        _emit(runner.human_report(outcomes), run)
    passed = runner.all_passed(outcomes)
    logger.info("%d instance(s): %s", len(outcomes), "all pass" if passed else "mismatches")
    return EXIT_PASS if passed else EXIT_MISMATCH


def cmd_search_regular(run: RunConfig) -> int:
    result = runner.search_report(run.group or "", nilpotent_only=run.nilpotent_only)
    if run.format is OutputFormat.STRUCTURED:
        _emit(json.dumps(result, indent=2, sort_keys=True, ensure_ascii=False) + "\n", run)
    else:
        lines = [f"{result['group']} (degree {result['degree']}, order {result['order']}):"]
        for c in result["classes"]:
            tag = f" extraspecial {c['extraspecial']}" if c["extraspecial"] else ""
            lines.append(f"  {c['shape']} (order {c['order']}, up to {c['up_to']}){tag}")
        _emit("\n".join(lines) + "\n", run)
    return EXIT_PASS


def cmd_report(run: RunConfig, arithmetic: bool = False) -> int:
    """Coverage summary; with ``arithmetic``, exit 1 when a row's shapes are inconsistent."""
    lines = coverage_report()
    findings = arithmetic_report() if arithmetic else []
    bad = [f for f in findings if not f.consistent]
    if run.format is OutputFormat.STRUCTURED:
        doc = {
            "schema": SCHEMA_VERSION,
            "command": "report",
            "coverage": [line.model_dump(mode="json") for line in lines],
            "arithmetic": [f.model_dump(mode="json") for f in findings],
        }
        _emit(json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n", run)
    else:
        out = [f"{'table':6}{'rows':>6}{'verified':>10}{'order-only':>12}{'intractable':>13}"]
        for line in lines:
            out.append(
                f"{line.table.value:6}{line.rows:>6}{line.verified:>10}{line.order_only:>12}{line.intractable:>13}"
            )
        for f in bad:
            out.append(f"inconsistent: {f.key}: {f.detail}")
        _emit("\n".join(out) + "\n", run)
    return EXIT_MISMATCH if bad else EXIT_PASS


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS
    setup_logger("src.factoriza", args.log_level or config.LOG_LEVEL)
    try:
        run = _run_config(args)
        if run.seed is not None:
            config.SEED = run.seed
        for name, value in run.cap_overrides().items():
            setattr(config, name, value)
        if run.command is Command.VERIFY:
            return cmd_verify(run)
        if run.command is Command.SEARCH_REGULAR:
            return cmd_search_regular(run)
        return cmd_report(run, arithmetic=getattr(args, "arithmetic", False))
    except CapExceededError as e:
        logger.error("%s", e.message)
        return EXIT_CAP
    except (SelectorError, ValidationError) as e:
        logger.error("%s %s", e.message, e.details or "")
        return EXIT_USAGE
    except PydanticValidationError as e:
        logger.error("invalid arguments: %s", e)
        return EXIT_USAGE
    except BaseAppException as e:
        logger.error("%s: %s", e.code, e.message)
        return EXIT_MISMATCH


if __name__ == "__main__":
    sys.exit(main())
