"""Selection and execution of verification jobs, shared by the CLI and the API.

A job is a (table, row, params) triple. Jobs run in a multiprocessing pool;
records come back sorted by label so the assembled report does not depend
on completion order.
"""

import json
import logging
import multiprocessing
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable

from src.factoriza.config import config
from src.factoriza.models.report import SCHEMA_VERSION, InstanceRecord, Verdict
from src.factoriza.models.run_config import RunConfig
from src.factoriza.models.table import TableId, Tractability
from src.factoriza.services.factorization import verify_exact
from src.factoriza.services.perm_engine import PermGroup
from src.factoriza.services.regular_search import regular_subgroup_search
from src.factoriza.services.sporadic import mathieu, psp43_deg27, psu33_deg28
from src.factoriza.services.tables_data import (
    OPTIONAL_ROWS,
    Intractable,
    all_rows,
    expand,
    instantiate,
    lookup,
)
from src.factoriza.services.witnesses import projective_line, psl3_3_singer
from src.factoriza.utils.exceptions import (
    BaseAppException,
    CapExceededError,
    SelectorError,
    UnavailableGroupError,
    ValidationError,
)

logger = logging.getLogger(__name__)

# error codes that abort a run instead of failing a single instance
USAGE_CODES = ("VALIDATION_ERROR", "SELECTOR_ERROR")
CAP_CODE = "CAP_EXCEEDED"


@dataclass(frozen=True)
class Job:
    table: str
    row: str
    params: tuple[tuple[str, Any], ...] = ()

    @property
    def key(self) -> str:
        return f"{self.table}/{self.row}"

    def label(self) -> str:
        if not self.params:
            return self.key
        return self.key + "/" + ",".join(f"{k}={v}" for k, v in self.params)


@dataclass
class JobOutcome:
    """A finished job: either a record, or the code and message of an abort."""

    job: Job
    record: InstanceRecord | None = None
    error_code: str | None = None
    message: str = ""
    details: Any = field(default=None, repr=False)


def _freeze(params: dict[str, Any]) -> tuple[tuple[str, Any], ...]:
    return tuple(sorted(params.items()))


def select_jobs(run: RunConfig) -> list[Job]:
    """The jobs a RunConfig names, deduplicated and in a fixed order.

    Raises:
        SelectorError: unknown table or row, or a selection with no jobs.
    """
    extra: dict[str, Any] = {}
    if run.negative_control:
        extra["negative_control"] = True
    if run.variant is not None:
        extra["variant"] = run.variant
    if run.outer is not None:
        extra["outer"] = run.outer

    if run.all_tractable:
        rows = [r for r in all_rows(run.table) if r.tractability is Tractability.VERIFIED]
        if run.case:
            wanted = {c.strip() for c in run.case}
            rows = [r for r in rows if r.row in wanted]
    else:
        if not run.case:
            raise SelectorError(f"no case selected in {run.table}", {"table": run.table})
        rows = [lookup(run.table or "", c) for c in run.case]

    if not run.include_sporadic:
        skipped = [r.key for r in rows if r.key in OPTIONAL_ROWS]
        if skipped and run.all_tractable:
            logger.info("leaving out optional rows %s", ", ".join(skipped))
            rows = [r for r in rows if r.key not in OPTIONAL_ROWS]

    grid = run.parameter_grid()
    jobs: list[Job] = []
    for row in rows:
        if row.tractability is not Tractability.VERIFIED:
            jobs.append(Job(row.table.value, row.row))
            continue
        if row.defaults and grid != [{}]:
            choices = [{**g, **extra} for g in grid]
        elif row.table is TableId.T4 and ("variant" in extra or "outer" in extra):
            choices = [dict(extra)]
        else:
            choices = [{**p, **extra} for p in expand(row)]
        for params in choices:
            jobs.append(Job(row.table.value, row.row, _freeze(params)))
    jobs = sorted(set(jobs), key=lambda j: j.label())
    if not jobs:
        raise SelectorError("selectors resolve to no instance", {"table": run.table, "case": run.case})
    logger.info("%d instance(s) selected", len(jobs))
    return jobs


def run_job(job: Job) -> JobOutcome:
    """Instantiate and verify one job. Errors come back as data so they cross process boundaries."""
    row = lookup(job.table, job.row)
    params = dict(job.params)
    try:
        inst = instantiate(row, params)
        if isinstance(inst, Intractable):
            record = InstanceRecord(
                label=job.label(), table=job.table, row=job.row, params=params, skipped=inst.reason or row.tractability.value
            )
            return JobOutcome(job, record)
        report = verify_exact(inst)
    except UnavailableGroupError as e:
        record = InstanceRecord(label=job.label(), table=job.table, row=job.row, params=params, skipped=e.message)
        return JobOutcome(job, record)
    except BaseAppException as e:
        logger.error("%s: %s", job.label(), e.message)
        return JobOutcome(job, error_code=e.code, message=e.message, details=e.details)
    return JobOutcome(job, InstanceRecord(label=report.label, table=job.table, row=job.row, params=params, report=report))


def _init_worker(seed: int, caps: dict[str, int], level: str) -> None:
    config.SEED = seed
    for name, value in caps.items():
        setattr(config, name, value)
    logging.getLogger("src.factoriza").setLevel(level)


def run_jobs(jobs: Iterable[Job], workers: int = 1, caps: dict[str, int] | None = None) -> list[JobOutcome]:
    """Run jobs, in a pool when more than one worker is asked for; outcomes sorted by label."""
    jobs = list(jobs)
    caps = caps or {}
    workers = max(1, min(workers, len(jobs)))
    if workers == 1:
        outcomes = [run_job(j) for j in jobs]
    else:
        initargs = (config.SEED, caps, logging.getLevelName(logging.getLogger("src.factoriza").level))
        with multiprocessing.Pool(processes=workers, initializer=_init_worker, initargs=initargs) as pool:
            outcomes = pool.map(run_job, jobs, chunksize=1)
    return sorted(outcomes, key=lambda o: o.record.label if o.record else o.job.label())


def raise_first_error(outcomes: list[JobOutcome]) -> None:
    """Re-raise the first usage or cap error reported by a worker.

    Raises:
        ValidationError: a parameter violated a row's conditions.
        SelectorError: a selector resolved to nothing.
        CapExceededError: a domain or coset space was too large.
    """
    for o in outcomes:
        if o.error_code == CAP_CODE:
            d = o.details or {}
            raise CapExceededError(d.get("what", o.job.label()), d.get("size", 0), d.get("cap", 0))
        if o.error_code == "SELECTOR_ERROR":
            raise SelectorError(o.message, o.details)
        if o.error_code in USAGE_CODES:
            raise ValidationError(o.message, o.details)


def all_passed(outcomes: list[JobOutcome]) -> bool:
    for o in outcomes:
        if o.error_code is not None:
            return False
        if o.record and o.record.report and o.record.report.verdict is not Verdict.PASS:
            return False
    return True


def structured_report(outcomes: list[JobOutcome], run: RunConfig | None = None) -> str:
    """The self-describing JSON document of a run.

    Timings are left out so that identical runs give identical bytes.
    """
    records = []
    for o in outcomes:
        if o.record is not None:
            records.append(o.record.model_dump(mode="json", exclude={"report": {"elapsed"}}))
        else:
            records.append({"label": o.job.label(), "table": o.job.table, "row": o.job.row,
                            "params": dict(o.job.params), "error": {"code": o.error_code, "message": o.message}})
    document = {
        "schema": SCHEMA_VERSION,
        "seed": config.SEED,
        "command": run.command.value if run else "verify",
        "passed": all_passed(outcomes),
        "instances": records,
    }
    return json.dumps(document, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def human_report(outcomes: list[JobOutcome]) -> str:
    lines = []
    for o in outcomes:
        if o.record is None:
            lines.append(f"ERROR {o.job.label()}: {o.message}")
        elif o.record.report is None:
            lines.append(f"SKIP  {o.record.label}: {o.record.skipped}")
        else:
            r = o.record.report
            orbits = "transitive" if r.transitive else f"orbits {r.orbit_sizes}"
            lines.append(
                f"{r.verdict.value.upper():5} {r.label}: |H| = {r.H_order}, |Δ| = {r.domain_size}, "
                f"{orbits}{', exact' if r.exact else ''} ({r.elapsed:.2f}s)"
            )
            for e in r.mismatches:
                lines.append(f"      {e.key}: expected {e.expected}, computed {e.computed}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# regular-subgroup search


def _search_groups() -> dict[str, Callable[[], PermGroup]]:
    return {
        "m11": lambda: mathieu("M11"),
        "m12": lambda: mathieu("M12"),
        "m22": lambda: mathieu("M22"),
        "m23": lambda: mathieu("M23"),
        "m24": lambda: mathieu("M24"),
        "psp43-27": lambda: psp43_deg27().group,
        "psu33-28": lambda: psu33_deg28().group,
        "psl3-3": lambda: psl3_3_singer()[0],
        "pgl2-11": lambda: projective_line(11, "PGL").group,
    }


SEARCH_GROUPS = tuple(sorted(_search_groups()))


def search_group(selector: str) -> PermGroup:
    """The permutation group a search-regular selector names.

    Raises:
        SelectorError: unknown selector.
    """
    key = selector.strip().lower()
    try:
        return _search_groups()[key]()
    except KeyError:
        raise SelectorError(f"unknown group {selector}", {"known": list(SEARCH_GROUPS)}) from None


def search_report(selector: str, nilpotent_only: bool = True) -> dict[str, Any]:
    G = search_group(selector)
    classes = regular_subgroup_search(G, nilpotent_only=nilpotent_only)
    return {
        "schema": SCHEMA_VERSION,
        "seed": config.SEED,
        "command": "search-regular",
        "group": selector.strip().lower(),
        "degree": G.degree,
        "order": G.order(),
        "nilpotent_only": nilpotent_only,
        "classes": [c.to_model().model_dump(mode="json") for c in classes],
    }
