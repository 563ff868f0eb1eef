"""Monte-Carlo sweeps over channel strength, target rate or interference limit."""

from __future__ import annotations

import csv
import enum
import hashlib
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .baselines import CCIZF_LABEL, solve_ccizf, solve_multicast_bound
from .ci_precoder import precode, solve_ccipm_strict
from .constellation import draw_symbols
from .evaluation import (
    MetricRecord,
    audit_solution,
    energy_efficiency,
    noise_seed,
    rate_to_modulation,
    simulate_slot,
    user_rates,
)
from .scenario import ScenarioConfig, db_to_linear, dump_config, generate_channels

SCHEMES = ("ccipm", "ccipm_strict", CCIZF_LABEL, "multicast_bound", "multicast_bound_strict")
BOUND_FOR = {
    "ccipm": "multicast_bound",
    "ccipm_strict": "multicast_bound_strict",
    CCIZF_LABEL: "multicast_bound_strict",
    "multicast_bound": "multicast_bound",
    "multicast_bound_strict": "multicast_bound_strict",
}
CSV_HEADER = ("sweep_variable", "sweep_point", "scheme", "mean_power", "energy_efficiency", "ser",
              "feasibility_rate", "mean_bound_power", "trials", "degenerate", "seed")
DEFAULT_TRIALS = 2000


class SweepVariable(str, enum.Enum):
    CHANNEL_STRENGTH_DB = "channel_strength_db"
    TARGET_RATE = "target_rate"
    INTERFERENCE_LIMIT = "interference_limit"


@dataclass(frozen=True)
class SweepSpec:
    sweep_variable: SweepVariable
    sweep_points: tuple[float, ...]
    trials_per_point: int = DEFAULT_TRIALS
    schemes: tuple[str, ...] = ("ccipm", "ccipm_strict", CCIZF_LABEL)
    base_config: ScenarioConfig = field(default_factory=ScenarioConfig)

    def __post_init__(self):
        object.__setattr__(self, "sweep_variable", SweepVariable(self.sweep_variable))
        points = tuple(float(p) for p in self.sweep_points)
        object.__setattr__(self, "sweep_points", points)
        object.__setattr__(self, "schemes", tuple(self.schemes))
        if not points:
            raise ValueError("sweep_points must be nonempty")
        diffs = np.diff(points)
        if not (np.all(diffs > 0) or np.all(diffs < 0)):
            raise ValueError("sweep_points must be strictly monotone")
        if self.trials_per_point < 1:
            raise ValueError("trials_per_point must be >= 1")
        unknown = set(self.schemes) - set(SCHEMES)
        if unknown or not self.schemes:
            raise ValueError(f"unknown schemes {sorted(unknown)}; choose from {SCHEMES}")

    def config_at(self, point: float) -> ScenarioConfig:
        base = self.base_config
        if self.sweep_variable is SweepVariable.CHANNEL_STRENGTH_DB:
            return base.with_channel_gain(float(db_to_linear(point)))
        if self.sweep_variable is SweepVariable.TARGET_RATE:
            order, zeta = rate_to_modulation(point)
            primary = base.primary_modulation_order
            return base.replace(modulation_order=order, snr_targets=(zeta,) * base.num_users,
                                primary_modulation_order=primary)
        return base.replace(interference_limit=point)

    def extras(self) -> dict:
        return {"sweep_variable": self.sweep_variable.value,
                "sweep_points": list(self.sweep_points),
                "trials_per_point": self.trials_per_point,
                "schemes": list(self.schemes)}


@dataclass(frozen=True)
class TrialOutcome:
    ok: bool
    power: float = math.nan
    efficiency: float = math.nan
    symbol_errors: int = 0


@dataclass(frozen=True)
class SweepRow:
    sweep_point: float
    scheme: str
    metrics: MetricRecord
    trials: int
    degenerate: int

    @property
    def empty(self) -> bool:
        return self.trials == 0


@dataclass(frozen=True)
class SweepResult:
    sweep_variable: SweepVariable
    rows: tuple[SweepRow, ...]
    seed: int
    config_digest: str
    code_version: str = __version__

    def empty_points(self) -> list[float]:
        """Sweep points at which every scheme failed on every trial."""
        points = sorted({r.sweep_point for r in self.rows})
        return [p for p in points if all(r.empty for r in self.rows if r.sweep_point == p)]


def run_trial(config: ScenarioConfig, schemes: Sequence[str], trial_index: int) -> dict[str, TrialOutcome]:
    """Run every scheme on the same channels and symbols for one trial."""
    channels = generate_channels(config, trial_index)
    symbols = draw_symbols(config, trial_index)
    rates = user_rates(config.zeta)
    strict_config = config.replace(interference_limit=0.0)
    seed = noise_seed(config.seed, trial_index)
    out = {}
    for scheme in schemes:
        if scheme.startswith("multicast_bound"):
            cfg = strict_config if scheme.endswith("strict") else config
            bound = solve_multicast_bound(channels, cfg)
            if bound.ok and bound.power > 0:
                out[scheme] = TrialOutcome(True, bound.power, energy_efficiency(rates, bound.power))
            else:
                out[scheme] = TrialOutcome(False)
            continue
        if scheme == "ccipm":
            cfg, sol = config, precode(channels, symbols, config)
        elif scheme == "ccipm_strict":
            cfg, sol = strict_config, solve_ccipm_strict(channels, symbols, strict_config)
        else:
            cfg, sol = strict_config, solve_ccizf(channels, symbols, strict_config)
        if not sol.ok or not audit_solution(channels, sol.x, symbols, cfg).passed:
            out[scheme] = TrialOutcome(False)
            continue
        slot = simulate_slot(channels, sol.x, symbols, config, seed)
        out[scheme] = TrialOutcome(True, sol.power, energy_efficiency(rates, sol.power),
                                   int(slot.errors.sum()))
    return out


def _run_chunk(task):
    config, schemes, start, stop = task
    return [run_trial(config, schemes, t) for t in range(start, stop)]


def _chunks(n: int, parts: int) -> list[tuple[int, int]]:
    parts = max(1, min(parts, n))
    edges = np.linspace(0, n, parts + 1).round().astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def _aggregate(point: float, config: ScenarioConfig, schemes: Sequence[str],
               trials: list[dict[str, TrialOutcome]]) -> list[SweepRow]:
    rows = []
    K = config.num_users
    n = len(trials)
    for scheme in schemes:
        ok = [t for t in trials if t[scheme].ok]
        bound_name = BOUND_FOR[scheme]
        count = len(ok)
        if count:
            mean_power = math.fsum(t[scheme].power for t in ok) / count
            efficiency = math.fsum(t[scheme].efficiency for t in ok) / count
            if scheme.startswith("multicast_bound"):
                ser = math.nan
            else:
                ser = sum(t[scheme].symbol_errors for t in ok) / (K * count)
            if bound_name in schemes:
                paired = [t[bound_name].power for t in ok if t[bound_name].ok]
                bound = math.fsum(paired) / len(paired) if paired else math.nan
            else:
                bound = math.nan
        else:
            mean_power = efficiency = ser = bound = math.nan
        metrics = MetricRecord(mean_power, efficiency, ser, count / n, bound, scheme)
        rows.append(SweepRow(point, scheme, metrics, count, n - count))
    return rows


def config_digest(spec: SweepSpec) -> str:
    return hashlib.sha256(dump_config(spec.base_config, spec.extras()).encode()).hexdigest()


def run_sweep(spec: SweepSpec, workers: int = 1) -> SweepResult:
    """Evaluate every scheme at every sweep point.

    Trials are pure functions of ``(seed, trial_index)`` and are reduced in
    trial order, so the result does not depend on ``workers``.
    """
    tasks = []
    for point in spec.sweep_points:
        config = spec.config_at(point)
        for start, stop in _chunks(spec.trials_per_point, 4 * workers):
            tasks.append((point, (config, spec.schemes, start, stop)))

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_chunk, [t for _, t in tasks]))
    else:
        results = [_run_chunk(t) for _, t in tasks]

    per_point: dict[float, list] = {p: [] for p in spec.sweep_points}
    for (point, _), chunk in zip(tasks, results):
        per_point[point].extend(chunk)

    rows = []
    for point in spec.sweep_points:
        rows.extend(_aggregate(point, spec.config_at(point), spec.schemes, per_point[point]))
    rows.sort(key=lambda r: (r.sweep_point, r.scheme))
    return SweepResult(spec.sweep_variable, tuple(rows), spec.base_config.seed, config_digest(spec))


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return f"{float(value):.12g}"


def write_csv(result: SweepResult, path: str | Path, spec: SweepSpec | None = None) -> None:
    """Write one row per (sweep point, scheme) plus a sidecar with the resolved config."""
    path = Path(path)
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_HEADER)
            for row in sorted(result.rows, key=lambda r: (r.sweep_point, r.scheme)):
                m = row.metrics
                writer.writerow([
                    result.sweep_variable.value, _fmt(row.sweep_point), row.scheme,
                    _fmt(m.mean_power), _fmt(m.energy_efficiency), _fmt(m.ser),
                    _fmt(m.feasibility_rate), _fmt(m.mean_bound_power),
                    row.trials, row.degenerate, result.seed,
                ])
        if spec is not None:
            header = (f"# code_version = {result.code_version}\n"
                      f"# config_digest = {result.config_digest}\n")
            sidecar_path(path).write_text(header + dump_config(spec.base_config, spec.extras()))
    except OSError as exc:
        raise OSError(f"could not write sweep results to {path}: {exc}") from exc


def sidecar_path(path: str | Path) -> Path:
    return Path(path).with_suffix(".config.toml")


def read_csv(path: str | Path) -> list[dict]:
    """Parse a sweep CSV back into typed rows."""
    ints = {"trials", "degenerate", "seed"}
    strings = {"sweep_variable", "scheme"}
    out = []
    with open(path, newline="") as fh:
        for raw in csv.DictReader(fh):
            out.append({k: v if k in strings else int(v) if k in ints else float(v)
                        for k, v in raw.items()})
    return out


def spec_from_extras(config: ScenarioConfig, extras: dict, *, trials: int | None = None,
                     schemes: Iterable[str] | None = None) -> SweepSpec:
    """Build a sweep spec from the non-scenario keys of a config file."""
    unknown = set(extras) - {"sweep_variable", "sweep_points", "trials_per_point", "schemes"}
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return SweepSpec(
        sweep_variable=extras.get("sweep_variable", SweepVariable.CHANNEL_STRENGTH_DB.value),
        sweep_points=tuple(extras.get("sweep_points", (0.0, 5.0, 10.0, 15.0, 20.0))),
        trials_per_point=trials or int(extras.get("trials_per_point", DEFAULT_TRIALS)),
        schemes=tuple(schemes or extras.get("schemes", ("ccipm", "ccipm_strict", CCIZF_LABEL))),
        base_config=config,
    )
