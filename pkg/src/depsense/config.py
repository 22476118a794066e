"""Run configuration: defaults, key=value config files, resource loading."""

from __future__ import annotations

import os
from dataclasses import dataclass, field, fields, replace

from .compose import ADD, BACKOFF, FREQ, MULT, PPMI, STRICT
from .errors import DataFormatError
from .spaces import SpaceSet, build_ppmi_spaces, load_embeddings, load_spaceset
from .triples import DEFAULT_RELATIONS, TripleCountTable, load_counts

MODES = (MULT, ADD)
FALLBACKS = (STRICT, BACKOFF)
RELEVANCES = (FREQ, PPMI)


@dataclass
class RunConfig:
    corpus: str | None = None
    counts: str | None = None
    spaces: str | None = None
    embeddings: str | None = None  # "NOUN=path,VERB=path,..."
    dataset: str | None = None
    report: str | None = None
    mode: str = MULT
    k: int = 10
    relevance: str = FREQ
    fallback: str = STRICT
    relations: frozenset[str] = field(default_factory=lambda: DEFAULT_RELATIONS)
    min_count: int = 2
    max_dims: int = 50_000
    seed: int = 42

    def validate(self) -> None:
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.min_count < 1:
            raise ValueError(f"min_count must be >= 1, got {self.min_count}")
        if self.max_dims < 1:
            raise ValueError(f"max_dims must be >= 1, got {self.max_dims}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.fallback not in FALLBACKS:
            raise ValueError(f"fallback must be one of {FALLBACKS}, got {self.fallback!r}")
        if self.relevance not in RELEVANCES:
            raise ValueError(f"relevance must be one of {RELEVANCES}, got {self.relevance!r}")
        if not self.relations:
            raise ValueError("relation filter must not be empty")


def parse_relations(text: str) -> frozenset[str]:
    rels = frozenset(r.strip() for r in text.split(",") if r.strip())
    if not rels:
        raise ValueError(f"no relations in {text!r}")
    return rels


_INT_KEYS = {"k", "min_count", "max_dims", "seed"}
_PATH_KEYS = {"corpus", "counts", "spaces", "embeddings", "dataset", "report"}
_ENUM_KEYS = {"mode", "relevance", "fallback"}


def load_config_file(path) -> dict[str, object]:
    """Parse "key=value" lines; '#' comments and blank lines ignored."""
    known = {f.name for f in fields(RunConfig)}
    values: dict[str, object] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if not sep or key not in known:
                raise DataFormatError(f"{path}: line {line_no}: unknown setting {line!r}")
            if key in _INT_KEYS:
                try:
                    values[key] = int(value)
                except ValueError:
                    raise DataFormatError(f"{path}: line {line_no}: {key} must be an integer")
            elif key == "relations":
                values[key] = parse_relations(value)
            elif key in _ENUM_KEYS:
                values[key] = value.upper()
            else:
                values[key] = value
    return values


def config_from(path: str | None = None, **overrides) -> RunConfig:
    """Config file values overridden by keyword arguments (None = leave as is)."""
    values = load_config_file(path) if path else {}
    values.update({k: v for k, v in overrides.items() if v is not None})
    config = replace(RunConfig(), **values)
    config.validate()
    return config


def parse_embeddings_spec(spec: str) -> dict[str, str]:
    """Parse "NOUN=path,VERB=path" into {POS: path}."""
    out = {}
    for part in spec.split(","):
        pos, sep, path = part.partition("=")
        if not sep or not path:
            raise DataFormatError(f"bad embeddings spec item {part!r} (expected POS=path)")
        out[pos.strip().upper()] = path.strip()
    return out


def load_table(config: RunConfig) -> TripleCountTable:
    if not config.counts:
        raise DataFormatError("no counts file configured")
    if not os.path.exists(config.counts):
        raise DataFormatError(f"counts file not found: {config.counts}")
    return load_counts(config.counts)


def load_spaces(config: RunConfig, table: TripleCountTable | None = None) -> SpaceSet:
    """Spaces from disk, from external embeddings, or built from the table."""
    if config.embeddings:
        spaces = SpaceSet()
        for pos, path in parse_embeddings_spec(config.embeddings).items():
            if not os.path.exists(path):
                raise DataFormatError(f"embeddings file not found: {path}")
            spaces.spaces[pos] = load_embeddings(path, pos)
        return spaces
    if config.spaces and os.path.isdir(config.spaces):
        return load_spaceset(config.spaces)
    if table is not None:
        return build_ppmi_spaces(table, min_count=config.min_count, max_dims=config.max_dims)
    raise DataFormatError("no spaces directory or embeddings configured")
