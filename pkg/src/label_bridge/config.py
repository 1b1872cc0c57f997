"""Pipeline configuration: defaults < JSON config file < environment < flags.

The config file is plain JSON (one object, field names below). Every field
can also be set through an environment variable named LABEL_BRIDGE_<FIELD>
(upper-cased field name), and the config file itself is located through
LABEL_BRIDGE_CONFIG when no --config flag is given. Validation reports all
problems at once, not just the first.
"""

import hashlib
import json
import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Mapping, Optional

from .errors import ConfigError
from .evaluation import Z_TABLE
from .matcher import BASELINE_IDS
from .scorers import SCORER_IDS

CONFIG_ENV_VAR = "LABEL_BRIDGE_CONFIG"
ENV_PREFIX = "LABEL_BRIDGE_"


@dataclass
class PipelineConfig:
    # inputs and artifact directory
    dump: Optional[str] = None
    workdir: str = "work"
    # language selection: explicit list wins over auto-ranking the candidates
    candidate_languages: list[str] = field(default_factory=list)
    selected_languages: list[str] = field(default_factory=list)
    language_count: int = 10
    # dataset filter thresholds
    min_languages_with_label: int = 4
    min_alias_count: int = 3
    min_languages_with_aliases: int = 3
    # scoring and matching; empty methods means "every scorer plus both baselines"
    scorers: list[str] = field(default_factory=lambda: list(SCORER_IDS))
    methods: list[str] = field(default_factory=list)
    itermax_rounds: int = 2
    # embedding provider: exactly one of file store / service URL
    vector_store: Optional[str] = None
    embed_url: Optional[str] = None
    # language-id verification: file table, service URL, or skipped entirely
    langid_file: Optional[str] = None
    langid_url: Optional[str] = None
    skip_langid: bool = False
    drop_threshold: float = 0.01
    ambiguity_threshold: float = 0.5
    # sampling
    seed: Optional[int] = None
    confidence: float = 0.95
    margin: float = 0.05
    drop_singleton_entities: bool = False

    def validate(self) -> None:
        """Raise ConfigError listing every problem found."""
        problems = []
        if self.language_count < 1:
            problems.append("language_count must be at least 1")
        if self.min_languages_with_label < 1:
            problems.append("min_languages_with_label must be at least 1")
        if self.min_alias_count < 1:
            problems.append("min_alias_count must be at least 1")
        if self.min_languages_with_aliases < 1:
            problems.append("min_languages_with_aliases must be at least 1")
        if not self.scorers:
            problems.append("scorers must not be empty")
        for scorer in self.scorers:
            if scorer not in SCORER_IDS:
                problems.append(f"unknown scorer id {scorer!r}")
        if len(set(self.scorers)) != len(self.scorers):
            problems.append("duplicate scorer ids")
        for method in self.methods:
            if method not in SCORER_IDS and method not in BASELINE_IDS:
                problems.append(f"unknown method id {method!r}")
        if self.itermax_rounds < 1:
            problems.append("itermax_rounds must be at least 1")
        if not 0.0 <= self.drop_threshold <= 1.0:
            problems.append("drop_threshold must be within [0, 1]")
        if not 0.0 <= self.ambiguity_threshold <= 1.0:
            problems.append("ambiguity_threshold must be within [0, 1]")
        if self.confidence not in Z_TABLE:
            levels = ", ".join(str(c) for c in sorted(Z_TABLE))
            problems.append(f"confidence must be one of {levels}")
        if not 0.0 < self.margin < 1.0:
            problems.append("margin must be within (0, 1)")
        if self.vector_store and self.embed_url:
            problems.append("vector_store and embed_url are mutually exclusive")
        if self.langid_file and self.langid_url:
            problems.append("langid_file and langid_url are mutually exclusive")
        for name in ("dump", "vector_store", "langid_file"):
            value = getattr(self, name)
            if value and not Path(value).exists():
                problems.append(f"{name} path does not exist: {value}")
        if problems:
            raise ConfigError(problems)

    def effective_methods(self) -> list[str]:
        return list(self.methods) if self.methods else list(self.scorers) + list(BASELINE_IDS)

    def require_seed(self, stage: str) -> int:
        """Stochastic stages refuse to run without an explicit seed."""
        if self.seed is None:
            raise ConfigError([f"a seed is required for {stage}; pass --seed or set seed"])
        return self.seed

    def hash(self) -> str:
        """Stable digest of the effective configuration, for provenance headers."""
        canonical = json.dumps(asdict(self), sort_keys=True, ensure_ascii=False)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]


_OPTIONAL_STR = {"dump", "vector_store", "embed_url", "langid_file", "langid_url"}
_LISTS = {"candidate_languages", "selected_languages", "scorers", "methods"}
_BOOLS = {"skip_langid", "drop_singleton_entities"}
_INTS = {
    "language_count",
    "min_languages_with_label",
    "min_alias_count",
    "min_languages_with_aliases",
    "itermax_rounds",
    "seed",
}
_FLOATS = {"drop_threshold", "ambiguity_threshold", "confidence", "margin"}
_FIELD_NAMES = {f.name for f in fields(PipelineConfig)}

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}

_INVALID = object()  # coercion failure marker; None is a legal value for some fields


def _coerce_json(name: str, value, problems: list[str]):
    if name in _LISTS:
        if isinstance(value, list) and all(isinstance(v, str) for v in value):
            return value
        problems.append(f"{name} must be a list of strings")
    elif name in _BOOLS:
        if isinstance(value, bool):
            return value
        problems.append(f"{name} must be a boolean")
    elif name in _INTS:
        if value is None and name == "seed":
            return None
        if isinstance(value, int) and not isinstance(value, bool):
            return value
        problems.append(f"{name} must be an integer")
    elif name in _FLOATS:
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            return float(value)
        problems.append(f"{name} must be a number")
    else:  # string-valued
        if value is None and name in _OPTIONAL_STR:
            return None
        if isinstance(value, str):
            return value
        problems.append(f"{name} must be a string")
    return _INVALID


def _coerce_env(name: str, raw: str, problems: list[str]):
    if name in _LISTS:
        return [part.strip() for part in raw.split(",") if part.strip()]
    if name in _BOOLS:
        lowered = raw.strip().lower()
        if lowered in _TRUE:
            return True
        if lowered in _FALSE:
            return False
        problems.append(f"{ENV_PREFIX}{name.upper()}: not a boolean: {raw!r}")
        return _INVALID
    if name in _INTS:
        try:
            return int(raw)
        except ValueError:
            problems.append(f"{ENV_PREFIX}{name.upper()}: not an integer: {raw!r}")
            return _INVALID
    if name in _FLOATS:
        try:
            return float(raw)
        except ValueError:
            problems.append(f"{ENV_PREFIX}{name.upper()}: not a number: {raw!r}")
            return _INVALID
    return raw or None


def load_config(
    config_path: Optional[str] = None,
    overrides: Optional[Mapping[str, object]] = None,
    env: Optional[Mapping[str, str]] = None,
) -> PipelineConfig:
    """Merge file, environment and flag values into a validated config.

    `overrides` carries already-typed flag values; None entries are ignored
    so absent flags never mask file or environment settings.
    """
    env = os.environ if env is None else env
    problems: list[str] = []
    values: dict[str, object] = {}

    path = config_path or env.get(CONFIG_ENV_VAR)
    if path:
        try:
            doc = json.loads(Path(path).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigError([f"config file not found: {path}"]) from None
        except json.JSONDecodeError as exc:
            raise ConfigError([f"config file {path} is not valid JSON: {exc}"]) from exc
        if not isinstance(doc, dict):
            raise ConfigError([f"config file {path} must hold a JSON object"])
        for name, value in sorted(doc.items()):
            if name not in _FIELD_NAMES:
                problems.append(f"unknown config field {name!r}")
                continue
            coerced = _coerce_json(name, value, problems)
            if coerced is not _INVALID:
                values[name] = coerced

    for name in sorted(_FIELD_NAMES):
        raw = env.get(ENV_PREFIX + name.upper())
        if raw is not None:
            coerced = _coerce_env(name, raw, problems)
            if coerced is not _INVALID:
                values[name] = coerced

    for name, value in (overrides or {}).items():
        if name not in _FIELD_NAMES:
            raise ValueError(f"unknown override field {name!r}")
        if value is not None:
            values[name] = value

    if problems:
        raise ConfigError(problems)
    config = PipelineConfig(**values)
    config.validate()
    return config
