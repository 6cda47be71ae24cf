"""Experiment configuration: one JSON document, unknown keys rejected."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from pathlib import Path
from typing import Any

from .bounds import DEFAULT_FAMILIES
from .ffield import FieldError, field_from_order
from .grid import check_budget, grid_budget
from .quadric import make_surface


class ConfigError(ValueError):
    pass


@dataclass
class Tolerances:
    identity: float = 1e-8
    linf_ceiling: float = 2.5
    khat_ceiling: float = 2.0
    battery_ceiling: float = 4.0
    trend_factor: float = 1.5
    band_lo: float = 0.5
    band_hi: float = 2.0
    slope_lo: float = 0.1
    slope_hi: float = 0.3
    split_slack: float = 1e-9


@dataclass
class ExperimentConfig:
    q_list: list[int] = field(default_factory=lambda: [3])
    d: int = 4
    coeffs: list[int] | None = None  # default: alternating 1, -1, 1, ...
    families: list[str] = field(default_factory=lambda: list(DEFAULT_FAMILIES))
    seeds: list[int] = field(default_factory=lambda: [0])
    trials: int | None = None
    point: list[str] | None = None
    tolerances: Tolerances = field(default_factory=Tolerances)
    output_dir: str = "results"
    grid_budget: int = field(default_factory=grid_budget)

    @property
    def pattern(self) -> list[int]:
        return list(self.coeffs) if self.coeffs is not None else [(-1) ** k for k in range(self.d)]

    def exponent_point(self) -> tuple[Fraction, Fraction] | None:
        if self.point is None:
            return None
        return parse_point(",".join(str(v) for v in self.point))

    def validate(self) -> "ExperimentConfig":
        if self.d < 2:
            raise ConfigError(f"d: dimension must be >= 2, got {self.d}")
        if not self.q_list:
            raise ConfigError("q_list: empty")
        if len(self.pattern) != self.d:
            raise ConfigError(f"coeffs: expected {self.d} coefficients, got {len(self.pattern)}")
        for q in self.q_list:
            try:
                F = field_from_order(int(q))
                check_budget(F.q, self.d, self.grid_budget)
                make_surface(F, self.pattern, self.grid_budget)
            except (FieldError, ValueError) as exc:
                raise ConfigError(f"q_list: {exc}") from exc
        unknown = set(self.families) - set(DEFAULT_FAMILIES)
        if unknown:
            raise ConfigError(f"families: unknown {sorted(unknown)}")
        return self

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def parse_point(text: str) -> tuple[Fraction, Fraction]:
    parts = [s.strip() for s in text.split(",")]
    if len(parts) != 2:
        raise ConfigError(f"point: expected '1/p,1/r', got {text!r}")
    try:
        return Fraction(parts[0]), Fraction(parts[1])
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"point: {exc}") from exc


def _strict(cls, data: dict[str, Any], where: str):
    names = {f.name for f in fields(cls)}
    unknown = set(data) - names
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    return data


def config_from_dict(data: dict[str, Any]) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigError("config: top level must be an object")
    data = dict(_strict(ExperimentConfig, data, "config"))
    if "tolerances" in data:
        tol = data["tolerances"]
        if not isinstance(tol, dict):
            raise ConfigError("tolerances: must be an object")
        data["tolerances"] = Tolerances(**_strict(Tolerances, tol, "tolerances"))
    try:
        return ExperimentConfig(**data)
    except TypeError as exc:
        raise ConfigError(f"config: {exc}") from exc


def load_config(path: str | Path) -> ExperimentConfig:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"config: cannot read {path}: {exc}") from exc
    return config_from_dict(data)
