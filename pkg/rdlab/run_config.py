# run_config.py
"""
Run configuration files.

A run config is a JSON document with a fixed schema:

    {
      "schema": "rdlab-run-config",
      "schema_version": 1,
      "command": "simulate",
      "network": "four_species",          # built-in name or network file path
      "diffusivities": [1.0, 10.0, 0.1, 5.0],
      "dim": 1, "points": 256, "extent": 1.0, "domain": "box",
      "t_end": 1.0,
      "profile": "modes", "base": 0.5, "amplitude": 1.0, "width": 0.1, "levels": null,
      "dt_init": 0.001, "dt_min": 1e-10, "dt_max": 0.01, "snapshot_stride": null,
      "seed": 20180101, "search_budget": 10000,
      "k_scale": 1.0,
      "out": "results", "snapshot_format": "csv", "write_plots": true,
      "workers": 1,
      "sweep": [{"amplitude": 2.0}, {"amplitude": 4.0}]
    }

Keys left out take the defaults below; unknown keys are rejected. "sweep" holds per-run
overrides for the sweep command; each entry may set any other key except "sweep".
"""

import json
import logging
import os
from dataclasses import dataclass, field, fields, replace
from typing import Any, Dict, List, Optional, Tuple

from rdlab.config import BENCHMARK, CHECK_SETTINGS, OUTPUT_SETTINGS, PROOF_SETTINGS, SOLVER_SETTINGS, SWEEP_SETTINGS
from rdlab.errors import ConfigError, PersistenceError, ValidationError
from rdlab.grid import Grid
from rdlab.networks import ReactionNetwork, resolve_network
from rdlab.simulator import SolverConfig, initial_profile, whole_space_extent

logger = logging.getLogger(__name__)

SCHEMA_NAME = "rdlab-run-config"
SCHEMA_VERSION = 1

COMMANDS = ("check", "simulate", "verify-proof", "verify-lemma2", "sweep")
DOMAINS = ("box", "whole_space")

_NUMERIC = ("extent", "t_end", "base", "amplitude", "width", "dt_init", "dt_min", "dt_max",
            "snapshot_stride", "k_scale")
_INTEGER = ("dim", "points", "seed", "search_budget", "workers")


@dataclass
class RunConfig:
    command: str = "simulate"
    network: str = BENCHMARK["network"]
    diffusivities: Optional[Tuple[float, ...]] = None
    dim: int = 1
    points: int = BENCHMARK["points"]
    extent: float = BENCHMARK["extent"]
    domain: str = "box"
    t_end: float = BENCHMARK["t_end"]
    profile: str = BENCHMARK["profile"]
    base: float = BENCHMARK["base"]
    amplitude: float = BENCHMARK["amplitude"]
    width: float = BENCHMARK["width"]
    levels: Optional[Tuple[float, ...]] = None
    dt_init: float = SOLVER_SETTINGS["dt_init"]
    dt_min: float = SOLVER_SETTINGS["dt_min"]
    dt_max: float = SOLVER_SETTINGS["dt_max"]
    snapshot_stride: Optional[float] = None
    seed: int = CHECK_SETTINGS["seed"]
    search_budget: int = CHECK_SETTINGS["search_budget"]
    k_scale: float = 1.0
    out: str = "results"
    snapshot_format: str = OUTPUT_SETTINGS["snapshot_format"]
    write_plots: bool = OUTPUT_SETTINGS["write_plots"]
    workers: int = SWEEP_SETTINGS["workers"]
    sweep: List[Dict[str, Any]] = field(default_factory=list)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"Unknown command {self.command!r}, expected one of {COMMANDS}")
        if self.domain not in DOMAINS:
            raise ConfigError(f"Unknown domain {self.domain!r}, expected one of {DOMAINS}")
        if self.snapshot_format not in ("csv", "npz"):
            raise ConfigError(f"snapshot_format must be 'csv' or 'npz', got {self.snapshot_format!r}")
        for name in _NUMERIC:
            value = getattr(self, name)
            if value is not None:
                if isinstance(value, bool) or not isinstance(value, (int, float)):
                    raise ConfigError(f"{name} must be a number, got {value!r}")
                setattr(self, name, float(value))
        for name in _INTEGER:
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f"{name} must be an integer, got {value!r}")
        if not isinstance(self.write_plots, bool):
            raise ConfigError(f"write_plots must be true or false, got {self.write_plots!r}")
        for name in ("diffusivities", "levels"):
            value = getattr(self, name)
            if value is not None:
                try:
                    setattr(self, name, tuple(float(v) for v in value))
                except (TypeError, ValueError) as e:
                    raise ConfigError(f"{name} must be a list of numbers") from e
        if not isinstance(self.sweep, (list, tuple)) or not all(isinstance(o, dict) for o in self.sweep):
            raise ConfigError("sweep must be a list of override objects")
        self.sweep = [dict(o) for o in self.sweep]
        for overrides in self.sweep:
            unknown = set(overrides) - _field_names() | ({"sweep"} & set(overrides))
            if unknown:
                raise ConfigError(f"Unknown sweep override keys: {sorted(unknown)}")

    # --- serialization -------------------------------------------------------------------

    def to_dict(self) -> Dict[str, Any]:
        data = {"schema": SCHEMA_NAME, "schema_version": SCHEMA_VERSION}
        for f in fields(self):
            value = getattr(self, f.name)
            data[f.name] = list(value) if isinstance(value, tuple) else value
        data["sweep"] = [dict(o) for o in self.sweep]
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunConfig":
        """Parse a config document; missing keys default, unknown keys raise ConfigError."""
        if not isinstance(data, dict):
            raise ConfigError("Run config must be a JSON object")
        data = dict(data)
        schema = data.pop("schema", SCHEMA_NAME)
        version = data.pop("schema_version", SCHEMA_VERSION)
        if schema != SCHEMA_NAME:
            raise ConfigError(f"Unexpected schema {schema!r}, expected {SCHEMA_NAME!r}")
        if version != SCHEMA_VERSION:
            raise ConfigError(f"Unsupported schema_version {version!r}")
        unknown = set(data) - _field_names()
        if unknown:
            raise ConfigError(f"Unknown run config keys: {sorted(unknown)}")
        try:
            return cls(**data)
        except ConfigError:
            raise
        except (TypeError, ValueError) as e:
            raise ConfigError(str(e)) from e

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def loads(cls, text: str) -> "RunConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"Run config is not valid JSON: {e}") from e
        return cls.from_dict(data)

    def with_overrides(self, **overrides) -> "RunConfig":
        unknown = set(overrides) - _field_names()
        if unknown:
            raise ConfigError(f"Unknown run config keys: {sorted(unknown)}")
        return replace(self, **overrides)

    def sweep_configs(self) -> List["RunConfig"]:
        """One config per sweep entry, each a copy of this one with the overrides applied."""
        base = replace(self, sweep=[])
        return [base.with_overrides(**o) for o in self.sweep]

    # --- solver --------------------------------------------------------------------------

    def resolve_network(self) -> ReactionNetwork:
        return resolve_network(self.network)

    def stride(self) -> float:
        """Explicit stride, else the denser harness stride for verify-proof, else the solver default."""
        if self.snapshot_stride is not None:
            return self.snapshot_stride
        if self.command == "verify-proof":
            return PROOF_SETTINGS["snapshot_stride"]
        return SOLVER_SETTINGS["snapshot_stride"]

    def solver_config(self, network: Optional[ReactionNetwork] = None) -> SolverConfig:
        """
        SolverConfig for this run. A whole_space domain enlarges the box to eight diffusion
        lengths and switches to compactly supported bump data of the same physical radius,
        with no background level.
        """
        net = network or self.resolve_network()
        m = net.species_count
        if m == 0:
            raise ValidationError("Network has no species")
        diffusivities = self.diffusivities
        if diffusivities is None:
            diffusivities = BENCHMARK["diffusivities"] if len(BENCHMARK["diffusivities"]) == m else (1.0,) * m
        if self.t_end <= 0:
            raise ValidationError(f"t_end must be positive, got {self.t_end}")

        extent, profile, width = self.extent, self.profile, self.width
        metadata = {"network": net.name, "domain": self.domain, "profile": profile, "seed": self.seed}
        if self.domain == "whole_space":
            extent = whole_space_extent(diffusivities, self.t_end, self.extent)
            profile = "compact"
            width = self.width * self.extent / extent
            metadata.update({"profile": profile, "extent": extent})
        grid = Grid.uniform(self.dim, extent, self.points)
        u0 = initial_profile(grid, m, profile, base=self.base, amplitude=self.amplitude, width=width,
                             levels=self.levels)
        stride = self.stride()
        return SolverConfig(network=net, diffusivities=tuple(diffusivities), grid=grid, initial_data=u0,
                            t_end=self.t_end, dt_init=self.dt_init, dt_min=self.dt_min,
                            dt_max=min(self.dt_max, stride), snapshot_stride=stride, metadata=metadata)


def _field_names() -> set:
    return {f.name for f in fields(RunConfig)}


def load_run_config(path: str) -> RunConfig:
    if not os.path.exists(path):
        raise ConfigError(f"Run config not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise PersistenceError(f"Cannot read run config {path}: {e}") from e
    return RunConfig.loads(text)


def save_run_config(config: RunConfig, path: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(config.dumps())
    except OSError as e:
        raise PersistenceError(f"Cannot write run config {path}: {e}") from e
    logger.info("Wrote run config %s", path)
