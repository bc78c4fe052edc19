"""Run configuration.

Values come from (highest precedence first) explicit overrides such as CLI
flags, ``MTLAB_*`` environment variables (a ``.env`` file is honoured), and
the defaults declared on :class:`RunConfig`.
"""

from __future__ import annotations

import os
from pathlib import Path
from typing import Any, Callable, Literal, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field, field_validator

ENV_PREFIX = "MTLAB_"

DEFAULT_CURVE_DB = Path(__file__).resolve().parent / "data" / "curves.txt"


def _env_value(name: str, parse: Callable[[str], Any]) -> Any:
    raw = os.getenv(ENV_PREFIX + name)
    if raw is None or raw == "":
        return None
    try:
        return parse(raw)
    except ValueError as exc:
        raise RuntimeError(f"Invalid value for environment variable {ENV_PREFIX}{name}: {raw!r}") from exc


class RunConfig(BaseModel):
    """Settings shared by the CLI, the pipeline and the verifier."""

    precision: int = Field(default=30, description="Working precision in decimal digits.")
    p_bound: int = Field(default=97, description="Largest prime checked p-locally.")
    t_max: Optional[int] = Field(default=None, description="Filtration depth; per-query default when unset.")
    cache_dir: Optional[Path] = None
    output_format: Literal["json", "csv", "text"] = "json"
    max_group_order: int = 5000
    max_level: int = 5000
    workers: int = 1
    curve_db: Path = DEFAULT_CURVE_DB
    log_level: str = "INFO"

    model_config = {"frozen": True}

    @field_validator("precision")
    @classmethod
    def _check_precision(cls, value: int) -> int:
        if not 15 <= value <= 200:
            raise ValueError("precision must lie between 15 and 200 digits")
        return value

    @field_validator("p_bound", "max_group_order", "max_level", "workers")
    @classmethod
    def _check_positive(cls, value: int) -> int:
        if value < 1:
            raise ValueError("must be positive")
        return value

    @field_validator("t_max")
    @classmethod
    def _check_t_max(cls, value: Optional[int]) -> Optional[int]:
        if value is not None and value < 0:
            raise ValueError("t_max must be non-negative")
        return value

    @classmethod
    def from_env(cls, **overrides: Any) -> "RunConfig":
        """Build a config from the environment; ``None`` overrides are ignored."""
        load_dotenv(override=True)
        values: dict[str, Any] = {}
        env = {
            "precision": _env_value("PRECISION", int),
            "p_bound": _env_value("PBOUND", int),
            "t_max": _env_value("TMAX", int),
            "cache_dir": _env_value("CACHE", Path),
            "output_format": _env_value("FORMAT", str),
            "max_group_order": _env_value("MAX_GROUP", int),
            "workers": _env_value("WORKERS", int),
            "curve_db": _env_value("DB", Path),
            "log_level": _env_value("LOG_LEVEL", str),
        }
        values.update({k: v for k, v in env.items() if v is not None})
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)
