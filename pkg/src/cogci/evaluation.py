"""Link simulation, constraint audits and scalar metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import erfc

from .constellation import PskAlphabet, SymbolVector, angular_distance, detect
from .scenario import STREAM_NOISE, ChannelSet, ScenarioConfig, substream


@dataclass(frozen=True, eq=False)
class SlotOutcome:
    y_users: np.ndarray
    y_primary: complex
    tx_power: float
    interference_at_pu: float
    detected: np.ndarray
    errors: np.ndarray


@dataclass(frozen=True)
class MetricRecord:
    mean_power: float
    energy_efficiency: float
    ser: float
    feasibility_rate: float
    mean_bound_power: float
    scheme_label: str


def noise_seed(seed: int, trial_index: int, slot_index: int = 0) -> int:
    """Integer seed for the noise of one slot, derived from the experiment seed."""
    rng = substream(seed, STREAM_NOISE, trial_index, slot_index)
    return int(rng.integers(0, 2**63 - 1))


def simulate_slot(channels: ChannelSet, x, symbols: SymbolVector, config: ScenarioConfig,
                  noise_seed: int) -> SlotOutcome:
    """Pass one transmit vector through the cognitive and primary links.

    Each cognitive user sees its precoded signal, the primary transmission
    ``h_sp g d_p`` and CN(0, sigma^2) noise, and detects with a perfect phase
    reference.
    """
    x = np.asarray(x, dtype=complex)
    rng = np.random.default_rng(noise_seed)
    K = channels.num_users
    sigma = math.sqrt(config.noise_power / 2)
    n_users = sigma * (rng.standard_normal(K) + 1j * rng.standard_normal(K))
    n_pu = sigma * complex(rng.standard_normal(), rng.standard_normal())

    d_p = symbols.d_p
    y_users = channels.h_ss @ x + (channels.h_sp @ channels.g) * d_p + n_users
    y_primary = complex(channels.h_pp @ channels.g * d_p + channels.h_ps @ x + n_pu)
    detected = detect(y_users, PskAlphabet(symbols.order))
    errors = detected != np.asarray(symbols.indices)
    return SlotOutcome(
        y_users=y_users,
        y_primary=y_primary,
        tx_power=float(np.vdot(x, x).real),
        interference_at_pu=float(abs(channels.h_ps @ x) ** 2),
        detected=np.asarray(detected),
        errors=np.asarray(errors),
    )


def user_rates(zeta) -> np.ndarray:
    """Per-user rate ``log2(1 + zeta_j)`` in bits/s/Hz."""
    return np.log2(1.0 + np.asarray(zeta, dtype=float))


def energy_efficiency(rates, tx_power: float) -> float:
    if not tx_power > 0:
        raise ValueError("energy efficiency is undefined for non-positive transmit power")
    return float(np.sum(rates)) / tx_power


def rate_to_modulation(target_rate) -> tuple[int, float]:
    """Map an integer spectral efficiency to ``(psk_order, snr_target)``.

    ``order = 2**R`` and ``zeta = 2**R - 1``, so rate 2 gives QPSK at 3
    (4.7712 dB).
    """
    rate = float(target_rate)
    if not rate.is_integer() or rate < 1:
        raise ValueError(f"target rate must be a positive integer number of bits, got {target_rate}")
    bits = int(rate)
    return 2**bits, float(2**bits - 1)


def psk_symbol_error_rate(order: int, snr: float) -> float:
    """Exact M-PSK symbol error probability in AWGN at symbol SNR ``snr``."""
    if order == 2:
        return float(0.5 * erfc(math.sqrt(snr)))
    s2 = math.sin(math.pi / order) ** 2
    upper = (order - 1) * math.pi / order
    value, _ = integrate.quad(lambda t: math.exp(-snr * s2 / math.sin(t) ** 2), 0.0, upper,
                              epsabs=1e-300, epsrel=1e-10, limit=200)
    return value / math.pi


@dataclass(frozen=True)
class AuditReport:
    phase_error: np.ndarray
    snr: np.ndarray
    snr_margin: np.ndarray
    interference: float
    interference_limit: float
    phase_ok: bool
    snr_ok: bool
    interference_ok: bool
    delivery_residual: np.ndarray

    @property
    def passed(self) -> bool:
        return self.phase_ok and self.snr_ok and self.interference_ok

    @property
    def interference_margin(self) -> float:
        return self.interference_limit - self.interference


def audit_solution(channels: ChannelSet, x, symbols: SymbolVector, config: ScenarioConfig, *,
                   phase_tol: float = 1e-6, snr_tol: float = 1e-6,
                   interference_tol: float = 1e-9) -> AuditReport:
    """Recheck the phase, SNR and interference constraints from ``x`` alone.

    ``snr_margin`` is delivered SNR over target (1 means exactly met). With a
    zero interference limit the residual leakage must be below
    ``1e-10 ||h_ps|| ||x||`` in amplitude.
    """
    x = np.asarray(x, dtype=complex)
    received = channels.h_ss @ x
    d = symbols.d
    phase_error = angular_distance(received, d)
    snr = np.abs(received) ** 2 / channels.psi
    margin = snr / config.zeta
    interference = float(abs(channels.h_ps @ x) ** 2)
    limit = config.interference_limit
    if limit > 0:
        allowance = limit * (1 + interference_tol)
    else:
        allowance = (1e-10 * np.linalg.norm(channels.h_ps) * np.linalg.norm(x)) ** 2
    target = np.sqrt(channels.psi * config.zeta) * d
    return AuditReport(
        phase_error=phase_error,
        snr=snr,
        snr_margin=margin,
        interference=interference,
        interference_limit=limit,
        phase_ok=bool(np.all(phase_error <= phase_tol)),
        snr_ok=bool(np.all(margin >= 1 - snr_tol)),
        interference_ok=bool(interference <= allowance),
        delivery_residual=np.abs(received - target) / np.abs(target),
    )
