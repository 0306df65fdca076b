"""Experiment configuration, receiver specs, presets and the flat file format.

The on-disk format is one ``key = value`` pair per line with JSON values,
keys named exactly like the :class:`ExperimentConfig` fields::

    num_users = 7
    receivers = ["jio_mber:auto(3,20)", "jio_mber:8", "full_rank_lms"]
"""

from __future__ import annotations

import dataclasses
import json
import math
import re
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

from jiomber.channel import ChannelConfig
from jiomber.rank import CRITERIA, DD_REFERENCES

SWEEPS = ("symbols", "snr", "users", "doppler")
#: "element": every h_{k,f} has unit variance; "vector": E||h_k||^2 = 1.
NORMALIZATIONS = ("element", "vector")
ALGORITHMS = ("jio_mber", "full_rank_lms", "full_rank_mber", "jio_lms", "mwf_lms", "mwf_mber", "eig")
FULL_RANK = ("full_rank_lms", "full_rank_mber")


class ConfigError(ValueError):
    """Invalid configuration key or value."""


class ReceiverSpec(NamedTuple):
    algorithm: str
    rank: Optional[int] = None
    d_min: Optional[int] = None
    d_max: Optional[int] = None

    @property
    def auto(self) -> bool:
        return self.d_min is not None

    @property
    def tag(self) -> str:
        if self.auto:
            return f"{self.algorithm}:auto({self.d_min},{self.d_max})"
        if self.rank is not None:
            return f"{self.algorithm}:{self.rank}"
        return self.algorithm


_SPEC_RE = re.compile(r"^(?P<alg>[a-z_]+)(?::(?:(?P<rank>\d+)|auto\((?P<lo>\d+),\s*(?P<hi>\d+)\)))?$")


def parse_receiver(text: str) -> ReceiverSpec:
    """Parse ``name``, ``name:D`` or ``name:auto(Dmin,Dmax)``."""
    m = _SPEC_RE.match(str(text).strip())
    if not m or m["alg"] not in ALGORITHMS:
        raise ConfigError(f"receivers: cannot parse receiver spec {text!r}")
    alg = m["alg"]
    if m["lo"] is not None:
        if alg != "jio_mber":
            raise ConfigError(f"receivers: automatic rank is only available for jio_mber, got {text!r}")
        lo, hi = int(m["lo"]), int(m["hi"])
        if not 1 <= lo <= hi:
            raise ConfigError(f"receivers: need 1 <= Dmin <= Dmax in {text!r}")
        return ReceiverSpec(alg, d_min=lo, d_max=hi)
    if alg in FULL_RANK:
        if m["rank"] is not None:
            raise ConfigError(f"receivers: {alg} takes no rank, got {text!r}")
        return ReceiverSpec(alg)
    if m["rank"] is None or int(m["rank"]) < 1:
        raise ConfigError(f"receivers: {alg} needs a positive rank, e.g. '{alg}:8', got {text!r}")
    return ReceiverSpec(alg, rank=int(m["rank"]))


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce one experiment.

    `snr_db`, `num_users` and `normalized_doppler` describe the channel at
    every grid point except along the swept axis, where `grid` supplies the
    values.  Kernel radius is ``kernel_radius_factor * sigma``.
    """

    num_antennas: int = 32
    num_users: int = 7
    snr_db: float = 15.0
    normalized_doppler: float = 1e-5
    receivers: tuple = ("jio_mber:auto(3,20)", "jio_mber:8", "full_rank_mber", "mwf_mber:8", "full_rank_lms")
    training_symbols: int = 250
    data_symbols: int = 1500
    monte_carlo_runs: int = 100
    sweep: str = "symbols"
    grid: tuple = ()
    base_seed: int = 1
    step_w: float = 0.01
    step_s: float = 0.025
    lms_step: float = 0.085
    mber_step: float = 0.05
    reduced_rank_step: float = 0.035
    kernel_radius_factor: float = 2.0
    window: int = 200
    forgetting: float = 0.998
    lms_normalized: bool = False
    rank_criterion: str = "truncated"
    rank_reference: str = "max"
    channel_normalization: str = "vector"
    workers: int = 1
    name: str = "custom"

    def __post_init__(self):
        object.__setattr__(self, "receivers", tuple(self.receivers))
        object.__setattr__(self, "grid", tuple(self.grid))
        self.validate()

    def validate(self):
        def need(cond, key, msg):
            if not cond:
                raise ConfigError(f"{key} = {getattr(self, key)!r}: {msg}")

        need(self.num_antennas >= 1, "num_antennas", "must be >= 1")
        need(1 <= self.num_users <= self.num_antennas, "num_users", "need 1 <= K <= M")
        need(self.training_symbols >= 0, "training_symbols", "must be >= 0")
        need(self.data_symbols >= 1, "data_symbols", "must be >= 1")
        need(self.monte_carlo_runs >= 1, "monte_carlo_runs", "must be >= 1")
        need(self.window >= 1, "window", "must be >= 1")
        need(self.workers >= 1, "workers", "must be >= 1")
        need(0 < self.forgetting <= 1, "forgetting", "must lie in (0, 1]")
        need(self.kernel_radius_factor > 0, "kernel_radius_factor", "must be positive")
        need(self.normalized_doppler >= 0, "normalized_doppler", "must be >= 0")
        need(
            self.channel_normalization in NORMALIZATIONS,
            "channel_normalization",
            f"must be one of {', '.join(NORMALIZATIONS)}",
        )
        need(self.rank_criterion in CRITERIA, "rank_criterion", f"must be one of {', '.join(CRITERIA)}")
        need(self.rank_reference in DD_REFERENCES, "rank_reference", f"must be one of {', '.join(DD_REFERENCES)}")
        need(self.sweep in SWEEPS, "sweep", f"must be one of {', '.join(SWEEPS)}")
        need(len(self.receivers) >= 1, "receivers", "need at least one receiver")
        specs = [parse_receiver(r) for r in self.receivers]
        tags = [s.tag for s in specs]
        need(len(set(tags)) == len(tags), "receivers", "duplicate receiver")
        if self.sweep == "symbols":
            need(len(self.grid) == 0, "grid", "must be empty for the symbols sweep")
        else:
            need(len(self.grid) >= 1, "grid", "must be non-empty")
            need(list(self.grid) == sorted(self.grid), "grid", "must be sorted")
        for cfg in self.channel_configs():
            for s in specs:
                top = s.d_max if s.auto else s.rank
                if top is not None and top > cfg.num_antennas:
                    raise ConfigError(f"receivers = {s.tag!r}: rank exceeds M={cfg.num_antennas}")

    @property
    def receiver_specs(self) -> list:
        return [parse_receiver(r) for r in self.receivers]

    @property
    def total_symbols(self) -> int:
        return self.training_symbols + self.data_symbols

    @property
    def x_name(self) -> str:
        return {"symbols": "symbol", "snr": "snr_db", "users": "num_users", "doppler": "fd_ts"}[self.sweep]

    def channel_config(self, value=None, seed: int = 0) -> ChannelConfig:
        k, snr, fd = self.num_users, self.snr_db, self.normalized_doppler
        if self.sweep == "snr":
            snr = float(value)
        elif self.sweep == "users":
            k = int(value)
        elif self.sweep == "doppler":
            fd = float(value)
        power = 1.0 if self.channel_normalization == "element" else 1.0 / self.num_antennas
        try:
            return ChannelConfig.from_snr(
                k, self.num_antennas, snr, normalized_doppler=fd, seed=seed, fading_power=power
            )
        except ValueError as exc:
            raise ConfigError(f"grid value {value!r}: {exc}") from None

    def channel_configs(self) -> list:
        if self.sweep == "symbols":
            return [self.channel_config()]
        return [self.channel_config(v) for v in self.grid]

    def kernel_radius(self, channel: ChannelConfig) -> float:
        return self.kernel_radius_factor * math.sqrt(channel.noise_variance)

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["receivers"] = list(self.receivers)
        d["grid"] = list(self.grid)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name: f for f in dataclasses.fields(cls)}
        kwargs = {}
        for key, value in data.items():
            if key not in known:
                raise ConfigError(f"unknown config key {key!r}")
            kwargs[key] = _coerce(key, value, known[key].default)
        return cls(**kwargs)


def _coerce(key, value, default):
    try:
        if isinstance(default, bool):
            if not isinstance(value, bool):
                raise TypeError
            return value
        if isinstance(default, int):
            if isinstance(value, bool) or not float(value).is_integer():
                raise TypeError
            return int(value)
        if isinstance(default, float):
            if isinstance(value, bool):
                raise TypeError
            return float(value)
        if isinstance(default, tuple):
            if not isinstance(value, (list, tuple)):
                raise TypeError
            return tuple(value)
        if isinstance(default, str):
            if not isinstance(value, str):
                raise TypeError
            return value
    except (TypeError, ValueError):
        raise ConfigError(f"{key} = {value!r}: expected {type(default).__name__}") from None
    return value


def dumps(config: ExperimentConfig) -> str:
    lines = [f"{k} = {json.dumps(v)}" for k, v in config.to_dict().items()]
    return "\n".join(lines) + "\n"


def parse_value(text: str):
    """JSON value, falling back to the bare string."""
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text.strip()


def loads(text: str) -> dict:
    """Parse the flat format into a raw ``{key: value}`` mapping."""
    data = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        data[key.strip()] = parse_value(value.strip())
    return data


def apply_overrides(config: ExperimentConfig, overrides) -> ExperimentConfig:
    """Apply ``KEY=VALUE`` strings on top of `config`."""
    data = config.to_dict()
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r}: expected KEY=VALUE")
        key, _, value = item.partition("=")
        key = key.strip()
        if key not in data:
            raise ConfigError(f"override {item!r}: unknown config key {key!r}")
        data[key] = parse_value(value)
    return ExperimentConfig.from_dict(data)


STANDARD_RECEIVERS = ("jio_mber:auto(3,20)", "jio_mber:8", "full_rank_mber", "mwf_mber:8", "full_rank_lms")

_PRESETS = {
    "fig2": dict(num_users=7, sweep="symbols", receivers=STANDARD_RECEIVERS + ("eig:8",)),
    "fig3": dict(num_users=17, sweep="symbols", receivers=STANDARD_RECEIVERS + ("eig:8",)),
    "fig4": dict(num_users=10, sweep="snr", grid=(0.0, 4.0, 8.0, 12.0, 16.0, 20.0)),
    "fig5": dict(sweep="users", grid=(4, 8, 12, 16, 20, 24, 28)),
    "fig6": dict(num_users=17, sweep="doppler", grid=(1e-6, 1e-5, 1e-4, 1e-3)),
    # desk-scale stand-ins used by the acceptance suite
    "ci": dict(
        num_antennas=16,
        num_users=8,
        monte_carlo_runs=30,
        receivers=("jio_mber:auto(3,10)", "jio_mber:8", "full_rank_mber", "mwf_mber:8", "full_rank_lms"),
    ),
    "highload": dict(num_users=17, monte_carlo_runs=20, receivers=("jio_mber:8", "full_rank_mber")),
}

PRESET_NAMES = tuple(_PRESETS)


def preset(name: str) -> ExperimentConfig:
    """Named experiment configuration."""
    if name not in _PRESETS:
        raise ConfigError(f"unknown preset {name!r}; valid presets: {', '.join(PRESET_NAMES)}")
    return ExperimentConfig(name=name, **_PRESETS[name])
