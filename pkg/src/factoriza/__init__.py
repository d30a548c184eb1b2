"""
factoriza: solvable factorizations of almost simple groups, checked by computation

The package is driven from the command line (``python -m src.factoriza``);
``create_app`` serves the same tables and reports over a small read-only API.
"""

import logging
from typing import Optional

from flask import Flask, jsonify
from flask_cors import CORS

from src.factoriza.config import BaseConfig, get_config
from src.factoriza.models.report import SCHEMA_VERSION
from src.factoriza.routes.api import api_bp
from src.factoriza.utils.error_handlers import register_error_handlers

logger = logging.getLogger(__name__)


def create_app(config: Optional[BaseConfig] = None) -> Flask:
    """アプリケーションファクトリ関数

    Args:
        config: 設定オブジェクト（オプション）

    Returns:
        Flask: 設定済みのFlaskアプリケーション
    """
    app = Flask(__name__)
    CORS(app)

    # 設定の読み込み
    if config is None:
        config = get_config()

    # 設定の適用
    app.config.update(
        DEVELOPMENT=config.DEBUG,
        TESTING=config.TESTING,
        SEED=config.SEED,
        COSET_CAP=config.COSET_CAP,
        DOMAIN_CAP=config.DOMAIN_CAP,
    )
    logging.getLogger("src.factoriza").setLevel(config.LOG_LEVEL.upper())

    # エラーハンドラの登録
    register_error_handlers(app)

    # ブループリントの登録
    app.register_blueprint(api_bp)

    @app.route("/", methods=["GET"])
    def index():
        """ルートエンドポイント"""
        return jsonify({"status": "ok", "message": "factoriza report API", "schema": SCHEMA_VERSION})

    return app
