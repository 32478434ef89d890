"""Aggregated simulation configuration and TOML loading.

One ``SimConfig`` carries every module's knobs.  Scenario scripts and the
service config file override individual keys; section and key names mirror
the module defaults.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace

import tomli

from .canbus import BusConfig, IdMap
from .manual_io import EngagementConfig
from .plant import PlantConfig
from .supervisor import SupervisorConfig


@dataclass(frozen=True)
class SimConfig:
    bus: BusConfig = field(default_factory=BusConfig)
    supervisor: SupervisorConfig = field(default_factory=SupervisorConfig)
    engagement: EngagementConfig = field(default_factory=EngagementConfig)
    plant: PlantConfig = field(default_factory=PlantConfig)
    id_map: IdMap = field(default_factory=IdMap)
    telemetry_period: int = 50  # ms
    behavior: str = "session1"
    adpu: dict = field(default_factory=dict)  # behavior field overrides


_SECTIONS = ("bus", "supervisor", "engagement", "plant", "id_map")


def apply_overrides(cfg: SimConfig, overrides: dict) -> SimConfig:
    """Return a copy of ``cfg`` with nested section overrides applied."""
    updates: dict = {}
    for section, value in overrides.items():
        if section in _SECTIONS:
            current = getattr(cfg, section)
            known = {f.name for f in fields(current)}
            bad = set(value) - known
            if bad:
                raise ValueError(f"unknown keys in [{section}]: {sorted(bad)}")
            updates[section] = replace(current, **value)
        elif section == "adpu":
            merged = dict(cfg.adpu)
            merged.update(value)
            updates["adpu"] = merged
        elif section in ("telemetry_period", "behavior"):
            updates[section] = value
        else:
            raise ValueError(f"unknown config section {section!r}")
    return replace(cfg, **updates) if updates else cfg


def load_config(path) -> SimConfig:
    """Load a TOML config file whose keys mirror the module defaults."""
    with open(path, "rb") as fh:
        raw = tomli.load(fh)
    return apply_overrides(SimConfig(), raw)
