"""Flat key-value experiment configuration.

The document format is one ``section.key = value`` assignment per line with
``#`` comments.  Unknown keys fail fast with the offending field path, so a
typo cannot silently fall back to a default.  Defaults mirror the reference
operating point: eta0 = 1, t_c = 0.7, 60/40 private split, 0 dB / -6.5 dB
thresholds, cutoff 8 sqrt(eta0) with 30 nodes, 1e6 trials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace

from ..errors import ConfigError

__all__ = ["ExperimentConfig", "parse_config", "parse_config_file"]

_AXES = ("snr_db", "t_common", "t_private_1")
_SCHEMES = ("fas-rsma", "tas-rsma", "fas-noma", "tas-noma")
_STRATEGIES = ("vbc", "cbc", "tas")


@dataclass(frozen=True)
class ExperimentConfig:
    ports: tuple[int, ...] = (5, 10)
    apertures: tuple[float, ...] = (4.0, 8.0)
    mean_gain: float = 1.0

    users: int = 2
    snr_db: float = 25.0
    t_common: float = 0.7
    private_split: tuple[float, ...] = (0.6, 0.4)
    common_threshold_db: float = 0.0
    private_threshold_db: float = -6.5

    axis: str = "snr_db"
    grid: tuple[float, ...] = tuple(0.0 + 2.5 * i for i in range(17))  # 0..40 dB

    schemes: tuple[str, ...] = ("fas-rsma",)
    strategies: tuple[str, ...] = ("vbc", "cbc")
    cbc_rho: float = 0.97
    block_count: int | None = None  # None -> distance-minimising D

    quad_cutoff_scale: float = 8.0
    quad_nodes: int = 30
    quad_nodes_outer: int = 30
    quad_nodes_inner: int = 30

    mc_enabled: bool = True
    trials: int = 1_000_000
    seed: int = 42

    noma_split: tuple[float, float] = (0.6, 0.4)
    noma_stage1_threshold_db: float | None = None  # None -> common threshold

    output_dir: str = "out"

    def __post_init__(self) -> None:
        if not self.grid:
            raise ConfigError("sweep.grid: empty sweep grid")
        if self.axis not in _AXES:
            raise ConfigError(f"sweep.axis: must be one of {_AXES}, got {self.axis!r}")
        for s in self.schemes:
            if s not in _SCHEMES:
                raise ConfigError(f"schemes: unknown scheme {s!r}")
        for s in self.strategies:
            if s not in _STRATEGIES:
                raise ConfigError(f"strategies: unknown strategy {s!r}")
        if self.users != len(self.private_split):
            raise ConfigError("rsma.private_split: need one fraction per user")
        if abs(sum(self.private_split) - 1.0) > 1e-9:
            raise ConfigError(f"rsma.private_split: must sum to 1, got {self.private_split}")
        if self.axis == "t_private_1" and self.users != 2:
            raise ConfigError("sweep.axis: t_private_1 sweeps require two users")
        if any(p < 2 for p in self.ports):
            raise ConfigError(f"geometry.ports: need >= 2 ports, got {self.ports}")
        if any(w <= 0 for w in self.apertures):
            raise ConfigError(f"geometry.apertures: must be positive, got {self.apertures}")
        if self.trials < 1:
            raise ConfigError(f"mc.trials: must be >= 1, got {self.trials}")

    def canonical_text(self) -> str:
        """Deterministic echo of every field, used by the run manifest."""
        lines = []
        for f in fields(self):
            lines.append(f"{f.name} = {getattr(self, f.name)!r}")
        return "\n".join(lines) + "\n"


def _parse_bool(text: str, key: str) -> bool:
    low = text.lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {text!r}")


def _parse_grid(text: str, key: str) -> tuple[float, ...]:
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"{key}: ranges are start:stop:step, got {text!r}")
        try:
            start, stop, step = (float(p) for p in parts)
        except ValueError as exc:
            raise ConfigError(f"{key}: {exc}") from None
        if step <= 0:
            raise ConfigError(f"{key}: step must be positive, got {step}")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        if count < 1:
            raise ConfigError(f"{key}: empty range {text!r}")
        return tuple(start + i * step for i in range(count))
    return _parse_float_list(text, key)


def _parse_float_list(text: str, key: str) -> tuple[float, ...]:
    try:
        return tuple(float(p.strip()) for p in text.split(",") if p.strip())
    except ValueError as exc:
        raise ConfigError(f"{key}: {exc}") from None


def _parse_int_list(text: str, key: str) -> tuple[int, ...]:
    try:
        return tuple(int(p.strip()) for p in text.split(",") if p.strip())
    except ValueError as exc:
        raise ConfigError(f"{key}: {exc}") from None


def _parse_str_list(text: str) -> tuple[str, ...]:
    return tuple(p.strip().lower() for p in text.split(",") if p.strip())


# key -> (config field, parser)
_KEY_TABLE = {
    "geometry.ports": ("ports", _parse_int_list),
    "geometry.apertures": ("apertures", _parse_float_list),
    "geometry.mean_gain": ("mean_gain", lambda t, k: float(t)),
    "rsma.users": ("users", lambda t, k: int(t)),
    "rsma.snr_db": ("snr_db", lambda t, k: float(t)),
    "rsma.t_common": ("t_common", lambda t, k: float(t)),
    "rsma.private_split": ("private_split", _parse_float_list),
    "rsma.common_threshold_db": ("common_threshold_db", lambda t, k: float(t)),
    "rsma.private_threshold_db": ("private_threshold_db", lambda t, k: float(t)),
    "sweep.axis": ("axis", lambda t, k: t.strip().lower()),
    "sweep.grid": ("grid", _parse_grid),
    "schemes": ("schemes", lambda t, k: _parse_str_list(t)),
    "strategies": ("strategies", lambda t, k: _parse_str_list(t)),
    "cbc.rho": ("cbc_rho", lambda t, k: float(t)),
    "blocks.count": ("block_count", lambda t, k: None if t.strip().lower() == "auto" else int(t)),
    "quadrature.cutoff_scale": ("quad_cutoff_scale", lambda t, k: float(t)),
    "quadrature.nodes": ("quad_nodes", lambda t, k: int(t)),
    "quadrature.nodes_outer": ("quad_nodes_outer", lambda t, k: int(t)),
    "quadrature.nodes_inner": ("quad_nodes_inner", lambda t, k: int(t)),
    "mc.enabled": ("mc_enabled", _parse_bool),
    "mc.trials": ("trials", lambda t, k: int(t)),
    "mc.seed": ("seed", lambda t, k: int(t)),
    "noma.split": ("noma_split", lambda t, k: tuple(_parse_float_list(t, k))),
    "noma.stage1_threshold_db": (
        "noma_stage1_threshold_db",
        lambda t, k: None if t.strip().lower() == "common" else float(t),
    ),
    "output.dir": ("output_dir", lambda t, k: t.strip()),
}


def parse_config(text: str) -> ExperimentConfig:
    """Parse a config document; unknown keys raise ConfigError with the path."""
    overrides = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _KEY_TABLE:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        field_name, parser = _KEY_TABLE[key]
        try:
            overrides[field_name] = parser(value, key)
        except ConfigError:
            raise
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"{key}: {exc}") from None
    # post-init validation runs through the dataclass constructor
    try:
        return replace(ExperimentConfig(), **overrides)
    except ConfigError:
        raise


def parse_config_file(path: str) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())
