"""Experiment configuration, reproducible random streams and channel draws."""

from __future__ import annotations

import dataclasses
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

UNBOUNDED = math.inf

# Independent substreams per (seed, trial); the stream id keeps channel,
# symbol and noise draws decoupled from one another.
STREAM_CHANNELS = 0
STREAM_SYMBOLS = 1
STREAM_NOISE = 2


class DegenerateChannelError(ValueError):
    """A channel vector is zero (or numerically so) where a direction is needed."""


def substream(seed: int, stream: int, *key: int) -> np.random.Generator:
    """Counter-style generator keyed by ``(seed, stream, *key)``.

    Two calls with the same key return generators producing identical draws,
    regardless of what other streams were consumed in between.
    """
    ss = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=(stream, *key))
    return np.random.Generator(np.random.PCG64(ss))


def db_to_linear(value_db):
    return 10.0 ** (np.asarray(value_db, dtype=float) / 10.0)


def linear_to_db(value):
    return 10.0 * np.log10(np.asarray(value, dtype=float))


@dataclass(frozen=True)
class ScenarioConfig:
    """All dimensions, variances, targets and limits of one experiment.

    Values are linear (watts / power ratios). ``interference_limit`` may be
    ``UNBOUNDED`` (``math.inf``); ``0`` selects the strict null-space regime.
    """

    num_tx_antennas: int = 3
    num_users: int = 2
    num_primary_antennas: int = 2
    noise_power: float = 1.0
    channel_gain_ss: float = 1.0
    channel_gain_sp: float = 1.0
    channel_gain_ps: float = 1.0
    channel_gain_pp: float = 1.0
    modulation_order: int = 4
    snr_targets: tuple[float, ...] = field(default=(3.0,))
    interference_limit: float = UNBOUNDED
    primary_power: float = 1.0
    seed: int = 0
    # None -> same order as the cognitive system
    primary_modulation_order: int | None = None

    def __post_init__(self):
        targets = np.atleast_1d(np.asarray(self.snr_targets, dtype=float))
        if targets.size == 1 and self.num_users > 1:
            targets = np.repeat(targets, self.num_users)
        object.__setattr__(self, "snr_targets", tuple(float(t) for t in targets))
        object.__setattr__(self, "interference_limit", float(self.interference_limit))
        self._validate()

    def _validate(self):
        M, K, Np = self.num_tx_antennas, self.num_users, self.num_primary_antennas
        if min(M, K, Np) < 1:
            raise ValueError("antenna and user counts must be positive")
        if K > M - 1:
            raise ValueError(f"need num_users <= num_tx_antennas - 1, got K={K}, M={M}")
        for name in ("noise_power", "channel_gain_ss", "channel_gain_sp",
                     "channel_gain_ps", "channel_gain_pp"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be finite and > 0, got {value}")
        for order in (self.modulation_order, self.primary_order):
            if order < 2 or order & (order - 1):
                raise ValueError(f"modulation order must be a power of two >= 2, got {order}")
        if len(self.snr_targets) != K:
            raise ValueError(f"expected {K} snr targets, got {len(self.snr_targets)}")
        if not all(t > 0 and math.isfinite(t) for t in self.snr_targets):
            raise ValueError("snr targets must be finite and > 0")
        if not self.interference_limit >= 0:
            raise ValueError("interference_limit must be >= 0")
        if not (self.primary_power >= 0 and math.isfinite(self.primary_power)):
            raise ValueError("primary_power must be finite and >= 0")

    @property
    def primary_order(self) -> int:
        return self.primary_modulation_order or self.modulation_order

    @property
    def zeta(self) -> np.ndarray:
        return np.asarray(self.snr_targets)

    @property
    def is_strict(self) -> bool:
        return self.interference_limit == 0

    def replace(self, **changes) -> "ScenarioConfig":
        if "num_users" in changes and "snr_targets" not in changes:
            changes["snr_targets"] = (self.snr_targets[0],)
        return dataclasses.replace(self, **changes)

    def with_channel_gain(self, gain: float) -> "ScenarioConfig":
        """Apply one variance to all four links (the worst-case equal-gain setting)."""
        return self.replace(channel_gain_ss=gain, channel_gain_sp=gain,
                            channel_gain_ps=gain, channel_gain_pp=gain)


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ChannelSet:
    """One realization of every link plus the primary beamformer.

    Row vectors are stored as 1-D arrays: ``h_ss`` is ``(K, M)``, ``h_sp`` is
    ``(K, Np)``, ``h_ps`` is ``(M,)``, ``h_pp`` and ``g`` are ``(Np,)``.
    """

    h_ss: np.ndarray
    h_sp: np.ndarray
    h_ps: np.ndarray
    h_pp: np.ndarray
    g: np.ndarray
    psi: np.ndarray

    def __post_init__(self):
        for name in ("h_ss", "h_sp", "h_ps", "h_pp", "g"):
            object.__setattr__(self, name, _readonly(np.asarray(getattr(self, name), dtype=complex)))
        object.__setattr__(self, "psi", _readonly(np.asarray(self.psi, dtype=float)))
        K, M = self.h_ss.shape
        if self.h_ps.shape != (M,):
            raise ValueError("h_ps must have one entry per transmit antenna")
        if self.h_sp.shape[0] != K or self.psi.shape != (K,):
            raise ValueError("h_sp / psi must have one row per user")
        if self.g.shape != self.h_pp.shape or self.h_sp.shape[1] != self.g.shape[0]:
            raise ValueError("primary channel and beamformer sizes disagree")

    @classmethod
    def from_links(cls, h_ss, h_sp, h_ps, h_pp, g, noise_power: float) -> "ChannelSet":
        h_sp = np.atleast_2d(np.asarray(h_sp, dtype=complex))
        g = np.asarray(g, dtype=complex)
        psi = noise_power + np.abs(h_sp @ g) ** 2
        return cls(h_ss=np.atleast_2d(h_ss), h_sp=h_sp, h_ps=h_ps, h_pp=h_pp, g=g, psi=psi)

    @property
    def num_users(self) -> int:
        return self.h_ss.shape[0]

    @property
    def num_tx_antennas(self) -> int:
        return self.h_ss.shape[1]

    def digest(self) -> bytes:
        parts = (self.h_ss, self.h_sp, self.h_ps, self.h_pp, self.g, self.psi)
        return b"".join(np.ascontiguousarray(p).tobytes() for p in parts)


def make_primary_beamformer(h_pp, p_p: float) -> np.ndarray:
    """Maximum-ratio beamformer toward the primary user, with ``||g||^2 = p_p``."""
    h_pp = np.asarray(h_pp, dtype=complex)
    if p_p == 0:
        return np.zeros_like(h_pp)
    norm = np.linalg.norm(h_pp)
    if norm == 0:
        raise DegenerateChannelError("zero primary channel with nonzero primary power")
    return math.sqrt(p_p) * h_pp.conj() / norm


def _cn(rng: np.random.Generator, variance: float, shape) -> np.ndarray:
    # circularly-symmetric, variance split evenly over real and imaginary parts
    scale = math.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def generate_channels(config: ScenarioConfig, trial_index: int) -> ChannelSet:
    rng = substream(config.seed, STREAM_CHANNELS, trial_index)
    M, K, Np = config.num_tx_antennas, config.num_users, config.num_primary_antennas
    # draw order is part of the reproducibility contract
    h_ss = _cn(rng, config.channel_gain_ss, (K, M))
    h_sp = _cn(rng, config.channel_gain_sp, (K, Np))
    h_ps = _cn(rng, config.channel_gain_ps, (M,))
    h_pp = _cn(rng, config.channel_gain_pp, (Np,))
    g = make_primary_beamformer(h_pp, config.primary_power)
    return ChannelSet.from_links(h_ss, h_sp, h_ps, h_pp, g, config.noise_power)


# --- config files -----------------------------------------------------------

_CONFIG_FIELDS = {f.name for f in dataclasses.fields(ScenarioConfig)}
_GAIN_FIELDS = ("channel_gain_ss", "channel_gain_sp", "channel_gain_ps", "channel_gain_pp")


def _parse_limit(value) -> float:
    if isinstance(value, str):
        if value.strip().lower() in ("unbounded", "inf", "infinity", "none"):
            return UNBOUNDED
        return float(value)
    return float(value)


def config_from_mapping(raw: Mapping[str, Any]) -> tuple[ScenarioConfig, dict[str, Any]]:
    """Build a config from flat key/value pairs.

    Keys ending in ``_db`` are converted to linear. ``channel_gain`` (or
    ``channel_gain_db``) sets all four link variances. Keys that are not
    config fields are returned untouched for the caller (sweep settings).
    """
    values: dict[str, Any] = {}
    extra: dict[str, Any] = {}
    for raw_key, value in raw.items():
        key = raw_key
        if key.endswith("_db") and (key[:-3] in _CONFIG_FIELDS or key == "channel_gain_db"):
            key = key[:-3]
            value = db_to_linear(value).tolist()
        if key == "channel_gain":
            for name in _GAIN_FIELDS:
                values.setdefault(name, value)
        elif key == "interference_limit":
            values[key] = _parse_limit(value)
        elif key in _CONFIG_FIELDS:
            values[key] = tuple(value) if isinstance(value, list) else value
        else:
            extra[raw_key] = value
    return ScenarioConfig(**values), extra


def load_config(path: str | Path) -> tuple[ScenarioConfig, dict[str, Any]]:
    with open(path, "rb") as fh:
        raw = tomllib.load(fh)
    return config_from_mapping(raw)


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return f'"{value}"'
    if isinstance(value, float):
        if math.isinf(value):
            return '"unbounded"'
        return repr(value)
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_format_value(v) for v in value) + "]"
    return str(value)


def dump_config(config: ScenarioConfig, extra: Mapping[str, Any] | None = None) -> str:
    """Flat ``key = value`` text that :func:`load_config` reads back exactly."""
    lines = []
    for f in dataclasses.fields(config):
        value = getattr(config, f.name)
        if value is None:
            continue
        lines.append(f"{f.name} = {_format_value(value)}")
    for key, value in (extra or {}).items():
        lines.append(f"{key} = {_format_value(value)}")
    return "\n".join(lines) + "\n"
