"""Run configuration: defaults, flat key=value config files, CLI overrides.

Precedence: built-in defaults < config file < command-line flags.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Any

from .corpus import ParseError, ValidationError


@dataclass(slots=True)
class RunConfig:
    scheme: str | None = None
    journals: str | None = None
    documents: str | None = None
    out: str = "out"
    year_min: int | None = None
    year_max: int | None = None
    theta: float = 0.8
    max_categories: int = 5
    min_references: int = 3
    citation_window: int | None = None
    citer_window: int | None = None
    bin_width: float = 100000.0
    min_link_area: float = 100000.0
    min_link_category: float = 40000.0
    edge_epsilon: float = 1e-6
    drop_last_year: bool = True
    p10: float = 0.10
    p1: float = 0.01
    level: str = "area"
    format: str = "json"
    iterations: int = 500
    step: float = 0.1
    variant: str = "node"
    seed: int = 0

    def validate(self) -> None:
        errors = []
        if self.year_min is not None and self.year_max is not None and self.year_min > self.year_max:
            errors.append(f"year_min {self.year_min} exceeds year_max {self.year_max}")
        if not (self.bin_width > 0):
            errors.append(f"bin_width must be > 0, got {self.bin_width}")
        if errors:
            raise ValidationError(errors)


def parse_config_file(path: str) -> dict[str, str]:
    """Flat key = value lines; blank lines and # comments ignored."""
    out: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ParseError(f"{path}: line {line_no}: expected key = value")
            key, _, value = line.partition("=")
            out[key.strip()] = value.strip()
    return out


def coerce_value(raw: str, annotation: Any, key: str) -> Any:
    """Convert a config-file string to the target field type."""
    text = str(annotation)
    if raw.lower() in ("none", "") and "None" in text:
        return None
    try:
        if annotation is bool or text in ("bool", "<class 'bool'>"):
            low = raw.lower()
            if low in ("true", "1"):
                return True
            if low in ("false", "0"):
                return False
            raise ValueError(raw)
        if annotation is int or "int" in text:
            return int(raw)
        if annotation is float or "float" in text:
            return float(raw)
        return raw
    except ValueError:
        raise ParseError(f"config key {key!r}: cannot parse {raw!r}") from None


def field_types(cls: type) -> dict[str, Any]:
    return {f.name: f.type for f in dataclasses.fields(cls)}


def build_config(file_map: dict[str, str], overrides: dict[str, Any]) -> RunConfig:
    """Layer a config file and CLI overrides over the defaults. Keys the
    RunConfig does not know are ignored here (other commands own them)."""
    cfg = RunConfig()
    types = field_types(RunConfig)
    for key, raw in file_map.items():
        if key not in types:
            continue
        setattr(cfg, key, coerce_value(raw, types[key], key))
    for key, value in overrides.items():
        if value is not None and key in types:
            setattr(cfg, key, value)
    cfg.validate()
    return cfg
