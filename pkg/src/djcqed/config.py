"""JSON run configuration with unit-suffixed field names."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional

from .dynamics import SimConfig
from .params import (
    DEFAULT_B1,
    DEFAULT_G_OVER_2PI_MHZ,
    TRANSMON_INVERSE_RATES_US,
    CouplingParams,
    NoiseParams,
)

DEFAULT_B0_SWEEP = tuple(float(b) for b in range(6, 31, 2))
DEFAULT_B0_POINT = 24.0


class ConfigError(ValueError):
    def __init__(self, problems: list[str]):
        self.problems = problems
        super().__init__("; ".join(problems))


@dataclass(frozen=True)
class NoiseConfig:
    kappa_inv_us: float = TRANSMON_INVERSE_RATES_US["kappa"]
    gamma21_inv_us: float = TRANSMON_INVERSE_RATES_US["gamma21"]
    gamma20_inv_us: float = TRANSMON_INVERSE_RATES_US["gamma20"]
    gamma10_inv_us: float = TRANSMON_INVERSE_RATES_US["gamma10"]
    gamma_phi2_inv_us: float = TRANSMON_INVERSE_RATES_US["gamma_phi2"]
    gamma_phi1_inv_us: float = TRANSMON_INVERSE_RATES_US["gamma_phi1"]

    def to_params(self) -> NoiseParams:
        return NoiseParams.from_inverse_us(**{
            f.name.removesuffix("_inv_us"): getattr(self, f.name) for f in fields(self)})


@dataclass(frozen=True)
class RunConfig:
    """``b0=None`` lets each command pick its default (one point or the full sweep)."""

    g_over_2pi_mhz: float = DEFAULT_G_OVER_2PI_MHZ
    b0: Optional[tuple[float, ...]] = None
    b1: float = DEFAULT_B1
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    photon_cutoff: int = 3
    dt_override_s: Optional[float] = None
    output_path: Optional[str] = None

    def validate(self) -> "RunConfig":
        problems = []

        def positive(name, value):
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                problems.append(f"{name}: must be a positive number, got {value!r}")

        positive("g_over_2pi_mhz", self.g_over_2pi_mhz)
        positive("b1", self.b1)
        if self.b0 is not None:
            if not self.b0:
                problems.append("b0: sweep list is empty")
            for i, b in enumerate(self.b0):
                positive(f"b0[{i}]", b)
        for f in fields(self.noise):
            positive(f"noise.{f.name}", getattr(self.noise, f.name))
        if not isinstance(self.photon_cutoff, int) or self.photon_cutoff < 3:
            problems.append(f"photon_cutoff: must be an integer >= 3, got {self.photon_cutoff!r}")
        if self.dt_override_s is not None:
            positive("dt_override_s", self.dt_override_s)
        if problems:
            raise ConfigError(problems)
        return self

    def b0_values(self, default) -> tuple[float, ...]:
        return self.b0 if self.b0 is not None else tuple(default)

    def coupling(self, b0: float) -> CouplingParams:
        return CouplingParams.transmon(self.g_over_2pi_mhz, b0, self.b1)

    def sim_config(self) -> SimConfig:
        return SimConfig(photon_cutoff=self.photon_cutoff, dt=self.dt_override_s)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["b0"] = None if self.b0 is None else list(self.b0)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError([f"{k}: unknown field" for k in sorted(unknown)])
        data = dict(data)
        if "noise" in data:
            noise = data["noise"] or {}
            bad = set(noise) - {f.name for f in fields(NoiseConfig)}
            if bad:
                raise ConfigError([f"noise.{k}: unknown field" for k in sorted(bad)])
            data["noise"] = NoiseConfig(**noise)
        if data.get("b0") is not None:
            data["b0"] = parse_b0(data["b0"])
        return cls(**data).validate()

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError([f"config: invalid JSON ({exc})"]) from exc
        if not isinstance(data, dict):
            raise ConfigError(["config: top level must be an object"])
        return cls.from_dict(data)

    @classmethod
    def load(cls, path) -> "RunConfig":
        return cls.from_json(Path(path).read_text())


def parse_b0(value) -> tuple[float, ...]:
    """Accept a number, a list of numbers, or a comma-separated string."""
    if isinstance(value, str):
        parts = [p for p in value.replace(" ", "").split(",") if p]
        try:
            return tuple(float(p) for p in parts)
        except ValueError:
            raise ConfigError([f"b0: cannot parse {value!r}"]) from None
    if isinstance(value, (int, float)):
        return (float(value),)
    try:
        return tuple(float(v) for v in value)
    except (TypeError, ValueError):
        raise ConfigError([f"b0: cannot parse {value!r}"]) from None
