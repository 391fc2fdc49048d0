"""Experiment configuration: one JSON file, optional flag overrides, one hash."""
from __future__ import annotations

import hashlib
import json
import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from . import phi as phi_mod
from .zeros import MAX_SCAN_HEIGHT

CACHE_ENV = "XI_SPECTRA_CACHE"


@dataclass
class UGridSpec:
    min: float = -6.0
    max: float = 6.0
    count: int = 1201


@dataclass
class ExperimentConfig:
    omega: float = 1.0
    family: str = "A"
    T: float = 500.0
    step_factor: float = 0.2
    prime_cutoff: int | None = None
    u_grid: UGridSpec = field(default_factory=UGridSpec)
    phi_whitelist: list[str] = field(default_factory=lambda: sorted(phi_mod.WHITELIST))
    output_dir: str = "xi_spectra_out"
    rh_mode: bool = True
    omegas: list[float] = field(default_factory=lambda: [0.2, 0.1, 0.05])
    x_step: float | None = None
    x_max: float | None = None
    tolerance: float = 0.1
    l1_tolerance: float = 0.2

    def validate(self) -> None:
        if not self.omega > 0.0:
            raise ValueError("omega must be positive")
        if self.family not in ("A", "B", "both"):
            raise ValueError("family must be A, B or both")
        if not 0.0 <= self.T <= MAX_SCAN_HEIGHT:
            raise ValueError(f"T must lie in [0, {MAX_SCAN_HEIGHT:g}]")
        if not 0.0 < self.step_factor <= 0.5:
            raise ValueError("step_factor must lie in (0, 0.5]")
        if self.prime_cutoff is not None and self.prime_cutoff < 1000:
            raise ValueError("prime_cutoff must be at least 1000")
        if self.u_grid.count < 3 or not self.u_grid.min < self.u_grid.max:
            raise ValueError("u_grid needs min < max and count >= 3")
        for name in self.phi_whitelist:
            phi_mod.get(name)

    def families(self) -> list[str]:
        return ["A", "B"] if self.family == "both" else [self.family]

    def to_dict(self) -> dict:
        return asdict(self)

    def config_hash(self) -> str:
        text = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()[:16]

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        data = dict(data)
        if "u_grid" in data and isinstance(data["u_grid"], dict):
            data["u_grid"] = UGridSpec(**data["u_grid"])
        cfg = cls(**data)
        cfg.omega = float(cfg.omega)
        cfg.T = float(cfg.T)
        cfg.family = str(cfg.family).upper() if cfg.family.lower() != "both" else "both"
        return cfg

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))


def cache_root(cfg: ExperimentConfig) -> Path:
    root = os.environ.get(CACHE_ENV)
    return Path(root) if root else Path(cfg.output_dir) / "cache"


def zero_cache_path(cfg: ExperimentConfig, family: str) -> Path:
    return cache_root(cfg) / f"zeros_{family}_omega{cfg.omega:g}_T{cfg.T:g}_sf{cfg.step_factor:g}.csv"


def table_path(cfg: ExperimentConfig) -> Path:
    pc = cfg.prime_cutoff if cfg.prime_cutoff is not None else "default"
    return cache_root(cfg) / f"mdensity_sigma{0.5 + cfg.omega:g}_P{pc}.json"
