"""Runtime configuration.

Everything tunable lives here: provider endpoints, sampling cap, column-kind
thresholds, projection/clustering parameters, and prompt texts.  Config is
plain JSON; secrets are never stored in it, only the *names* of environment
variables that hold them (``auth_env``).
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any

logger = logging.getLogger(__name__)

DEFAULT_MAX_ROWS = 5000
DEFAULT_UPLOAD_LIMIT = 50 * 1024 * 1024  # bytes


@dataclass(frozen=True)
class EmbeddingProviderConfig:
    endpoint: str | None = None  # None = built-in hashing provider
    auth_env: str | None = None
    model: str | None = None
    dim: int = 256
    max_batch: int = 100


@dataclass(frozen=True)
class LmProviderConfig:
    endpoint: str | None = None  # None = extractive fallback only
    auth_env: str | None = None
    model: str | None = None
    context_budget: int = 4000


@dataclass(frozen=True)
class SamplingConfig:
    max_rows: int = DEFAULT_MAX_ROWS


@dataclass(frozen=True)
class SchemaThresholds:
    """Knobs for the column-kind heuristic; defaults chosen for typical
    form exports and overridable per deployment."""

    min_nonempty: int = 3          # below this a column is "Other"
    unique_ratio_open: float = 0.3  # distinct/nonempty above this suggests free text
    mean_chars_open: float = 20.0   # ...when answers are also longer than this
    mean_chars_always_open: float = 80.0  # long answers are free text regardless
    max_categorical_distinct: int = 30
    low_unique_ratio: float = 0.1
    multi_select_min_rate: float = 0.2  # share of values containing the delimiter


@dataclass(frozen=True)
class GeometryConfig:
    n_neighbors: int = 15
    min_dist: float = 0.1
    n_epochs: int = 200
    min_cluster_size: int | None = None  # None = max(5, N/50)
    min_samples: int | None = None       # None = min_cluster_size


@dataclass(frozen=True)
class PromptConfig:
    top_level: str = "Briefly, what do these responses have in common?"
    interesting: str = "What are 3 interesting responses and why?"
    cluster: str = "Briefly, what do these responses have in common?"


@dataclass(frozen=True)
class AppConfig:
    embedding_provider: EmbeddingProviderConfig = field(default_factory=EmbeddingProviderConfig)
    lm_provider: LmProviderConfig = field(default_factory=LmProviderConfig)
    sampling: SamplingConfig = field(default_factory=SamplingConfig)
    schema_thresholds: SchemaThresholds = field(default_factory=SchemaThresholds)
    geometry: GeometryConfig = field(default_factory=GeometryConfig)
    prompts: PromptConfig = field(default_factory=PromptConfig)
    persist_dir: str | None = None
    max_concurrent_requests: int = 4
    max_upload_bytes: int = DEFAULT_UPLOAD_LIMIT
    session_ttl_seconds: int = 24 * 3600
    log_prompts: bool = True  # include prompt/completion text in audit events

    def echo(self) -> dict[str, Any]:
        """JSON-safe dump of the effective config (for report auditability)."""
        out: dict[str, Any] = {}
        for f in fields(self):
            v = getattr(self, f.name)
            out[f.name] = _as_plain(v)
        return out


def _as_plain(v: Any) -> Any:
    if hasattr(v, "__dataclass_fields__"):
        return {f.name: _as_plain(getattr(v, f.name)) for f in fields(v)}
    return v


_SECTION_TYPES = {
    "embedding_provider": EmbeddingProviderConfig,
    "lm_provider": LmProviderConfig,
    "sampling": SamplingConfig,
    "schema_thresholds": SchemaThresholds,
    "geometry": GeometryConfig,
    "prompts": PromptConfig,
}


def config_from_dict(raw: dict[str, Any]) -> AppConfig:
    """Build an AppConfig from a parsed JSON object, warning on unknown keys."""
    cfg = AppConfig()
    updates: dict[str, Any] = {}
    known = {f.name for f in fields(AppConfig)}
    for key, value in raw.items():
        if key not in known:
            logger.warning("config: ignoring unknown key %r", key)
            continue
        section_type = _SECTION_TYPES.get(key)
        if section_type is None:
            updates[key] = value
            continue
        section_known = {f.name for f in fields(section_type)}
        section_args = {}
        for sk, sv in value.items():
            if sk not in section_known:
                logger.warning("config: ignoring unknown key %r.%r", key, sk)
                continue
            section_args[sk] = sv
        updates[key] = replace(getattr(cfg, key), **section_args)
    return replace(cfg, **updates)


def load_config(path: str | Path) -> AppConfig:
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, dict):
        raise ValueError("config file must contain a JSON object")
    return config_from_dict(raw)
