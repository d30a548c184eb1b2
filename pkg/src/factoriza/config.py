"""Configuration settings for factoriza runs and the report API."""

import os

import psutil
from dotenv import load_dotenv
from pydantic import BaseModel, Field

load_dotenv()


def _env_int(name: str, default: int) -> int:
    """環境変数から整数を読み込む（空文字はデフォルト扱い）"""
    raw = os.getenv(name, "")
    return int(raw) if raw.strip() else default


class BaseConfig(BaseModel):
    """ベース設定モデル"""

    TESTING: bool = Field(False, description="テストモードかどうか")
    DEBUG: bool = Field(False, description="デバッグモードかどうか")
    DOMAIN_CAP: int = Field(
        default_factory=lambda: _env_int("FACTORIZA_DOMAIN_CAP", 200_000),
        gt=0,
        description="Largest geometric domain that may be enumerated",
    )
    COSET_CAP: int = Field(
        default_factory=lambda: _env_int("FACTORIZA_COSET_CAP", 20_000),
        gt=0,
        description="Largest coset action degree",
    )
    FIELD_CAP: int = Field(
        default_factory=lambda: _env_int("FACTORIZA_FIELD_CAP", 1 << 16),
        gt=1,
        description="Largest field order accepted by make_field",
    )
    SEARCH_DEGREE_CAP: int = Field(64, gt=0, description="Regular-subgroup search degree cap")
    ELEMENT_ENUMERATION_CAP: int = Field(
        10**6, gt=0, description="Largest group enumerated element by element"
    )
    SEED: int = Field(
        default_factory=lambda: _env_int("FACTORIZA_SEED", 0),
        description="Seed of every pseudo-random walk",
    )
    RANDOM_BUDGET: int = Field(4000, gt=0, description="Attempts for seeded subgroup searches")
    WORKERS: int = Field(
        default_factory=lambda: _env_int("FACTORIZA_WORKERS", psutil.cpu_count() or 1),
        gt=0,
        description="Worker pool size for verify runs",
    )
    LOG_LEVEL: str = Field(
        default_factory=lambda: os.getenv("FACTORIZA_LOG_LEVEL", "INFO"),
        description="Root log level",
    )

    model_config = {
        "env_prefix": "",  # 環境変数の接頭辞（なし）
        "validate_assignment": True,  # 代入時にバリデーションを行う
    }


class TestConfig(BaseConfig):
    """テスト環境の設定"""

    TESTING: bool = Field(True, description="テストモードかどうか")
    SEED: int = Field(0, description="Fixed seed for tests")
    WORKERS: int = Field(1, gt=0, description="Tests run in-process")
    LOG_LEVEL: str = Field("WARNING", description="Quiet logs under pytest")


class DevelopmentConfig(BaseConfig):
    """開発環境の設定"""

    DEBUG: bool = Field(True, description="デバッグモードかどうか")
    LOG_LEVEL: str = Field("DEBUG", description="Verbose logs while developing")


class ProductionConfig(BaseConfig):
    """本番環境の設定"""

    DEBUG: bool = Field(False, description="デバッグモードかどうか")


def get_config() -> BaseConfig:
    """環境に基づいた設定を取得する

    Returns:
        環境に応じた設定インスタンス
    """
    env = os.getenv("FACTORIZA_ENV", "production")

    if env == "development":
        return DevelopmentConfig()
    elif env == "testing":
        return TestConfig()
    else:
        return ProductionConfig()


config = get_config()
