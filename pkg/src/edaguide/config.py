"""Engine configuration.

One record holds every tunable threshold so CLI, service, and tests share a
single config file format: a JSON object with optional ``schema``, ``miner``
and ``recommend`` sections, e.g.

    {
      "schema": {"numeric_share": 0.9, "role_overrides": {"Year": "categorical"}},
      "miner": {"strong_r": 0.7, "min_n": 20},
      "recommend": {"panel_size": 6}
    }

Unknown keys are rejected to catch typos early.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path


@dataclass(frozen=True)
class SchemaConfig:
    """Column role inference thresholds (see dataset.infer_schema)."""

    # Minimum fraction of non-missing values that must parse as numbers for a
    # column to be treated as numeric at all.
    numeric_share: float = 0.9
    # Integer-valued numeric columns with at most this many distinct values
    # group like categories (years, cylinder counts) unless every value is
    # distinct.
    max_categorical_distinct: int = 12
    # Non-numeric columns with more distinct values than this are label/ID
    # columns, not grouping dimensions.
    identifier_distinct_cap: int = 25
    # Explicit per-column role assignments; values from dataset.Role.
    role_overrides: dict = field(default_factory=dict)


@dataclass(frozen=True)
class MinerConfig:
    """Insight mining thresholds."""

    strong_r: float = 0.7          # |r| at or above this is a strong correlation
    min_n: int = 20                # minimum complete pairs for a correlation
    fence_k: float = 1.5           # Tukey fence factor
    coverage: float = 0.5          # modal range target coverage
    bin_count: int = 10            # requested histogram bin count
    filter_value_cap: int = 30     # skip filter enumeration beyond this many distinct values
    aggregates: tuple = ("mean",)  # group aggregates to mine ("mean", "sum", "count")
    item_extremum: bool = True     # mine per-item extremums when an identifier column exists
    item_chart_limit: int = 20     # bars shown for item-level extremum charts


@dataclass(frozen=True)
class RecommenderConfig:
    panel_size: int = 6


@dataclass(frozen=True)
class EngineConfig:
    schema: SchemaConfig = field(default_factory=SchemaConfig)
    miner: MinerConfig = field(default_factory=MinerConfig)
    recommend: RecommenderConfig = field(default_factory=RecommenderConfig)

    @classmethod
    def from_dict(cls, raw: dict) -> "EngineConfig":
        sections = {}
        for name, section_cls in (("schema", SchemaConfig),
                                  ("miner", MinerConfig),
                                  ("recommend", RecommenderConfig)):
            section = raw.get(name, {})
            if not isinstance(section, dict):
                raise ValueError(f"config section {name!r} must be an object")
            known = {f.name for f in dataclasses.fields(section_cls)}
            bad = set(section) - known
            if bad:
                raise ValueError(f"unknown key(s) in config section {name!r}: {sorted(bad)}")
            if "aggregates" in section:
                section = dict(section, aggregates=tuple(section["aggregates"]))
            sections[name] = section_cls(**section)
        bad_sections = set(raw) - {"schema", "miner", "recommend"}
        if bad_sections:
            raise ValueError(f"unknown config section(s): {sorted(bad_sections)}")
        return cls(**sections)

    @classmethod
    def load(cls, path: str | Path) -> "EngineConfig":
        with open(path, encoding="utf-8") as f:
            return cls.from_dict(json.load(f))

    def to_dict(self) -> dict:
        return {
            "schema": dataclasses.asdict(self.schema),
            "miner": {**dataclasses.asdict(self.miner),
                      "aggregates": list(self.miner.aggregates)},
            "recommend": dataclasses.asdict(self.recommend),
        }


DEFAULT_CONFIG = EngineConfig()
