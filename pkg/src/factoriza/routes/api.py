import logging

from flask import Blueprint, jsonify, request

from src.factoriza.models.report import SCHEMA_VERSION
from src.factoriza.models.run_config import Command, RunConfig
from src.factoriza.services import runner
from src.factoriza.services.tables_data import coverage_report, lookup, order_arithmetic
from src.factoriza.utils.error_handlers import api_error_handler
from src.factoriza.utils.exceptions import APIError

# Blueprintの作成
api_bp = Blueprint("api", __name__, url_prefix="/api")

# ロガーの設定
logger = logging.getLogger(__name__)

# instances verified per request; larger runs belong on the command line
VERIFY_LIMIT = 16


@api_bp.route("/health", methods=["GET"])
@api_error_handler
def health_check():
    """
    ヘルスチェックエンドポイント

    Returns:
        dict: ヘルスステータス情報
    """
    return jsonify({"status": "healthy", "schema": SCHEMA_VERSION})


@api_bp.route("/coverage", methods=["GET"])
@api_error_handler
def coverage():
    """Per-table coverage counts."""
    lines = coverage_report()
    return jsonify({"schema": SCHEMA_VERSION, "coverage": [line.model_dump(mode="json") for line in lines]})


@api_bp.route("/tables/<table>/<row>", methods=["GET"])
@api_error_handler
def table_row(table: str, row: str):
    """One row with its ℓ at the default parameters and its order arithmetic."""
    r = lookup(table, row)
    record = r.model_dump(mode="json")
    record["ell_default"] = r.ell_at() if r.ell is not None else None
    record["arithmetic"] = [f.model_dump(mode="json") for f in order_arithmetic(r)]
    return jsonify(record)


@api_bp.route("/verify", methods=["POST"])
@api_error_handler
def verify():
    """
    Verify a selection in-process.

    Body: the verify fields of RunConfig, e.g. {"table": "T2", "case": ["1"], "n": [3], "q": [2]}.
    """
    data = request.get_json(silent=True)
    if not isinstance(data, dict):
        raise APIError("JSON object expected", 400)
    run = RunConfig(**{**data, "command": Command.VERIFY})
    jobs = runner.select_jobs(run)
    if len(jobs) > VERIFY_LIMIT:
        raise APIError(f"{len(jobs)} instances selected, the API verifies at most {VERIFY_LIMIT}", 413)
    outcomes = runner.run_jobs(jobs, workers=1)
    runner.raise_first_error(outcomes)
    logger.info("API verify: %d instance(s)", len(outcomes))
    return jsonify(
        {
            "schema": SCHEMA_VERSION,
            "passed": runner.all_passed(outcomes),
            "instances": [
                o.record.model_dump(mode="json", exclude={"report": {"elapsed"}})
                if o.record
                else {"label": o.job.label(), "error": {"code": o.error_code, "message": o.message}}
                for o in outcomes
            ],
        }
    )
