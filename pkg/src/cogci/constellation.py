"""M-PSK alphabets, detection, and the constructive-interference test."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .scenario import STREAM_SYMBOLS, ScenarioConfig, substream

_ZERO_COMPONENT = 1e-12


class DegenerateInputError(ValueError):
    """Zero-norm vector passed where a normalized correlation is needed."""


def _wrap(angle):
    return (np.asarray(angle) + np.pi) % (2 * np.pi) - np.pi


@lru_cache(maxsize=None)
def _psk_points(order: int) -> np.ndarray:
    phase = 2 * np.pi * np.arange(order) / order
    re, im = np.cos(phase), np.sin(phase)
    # snap axis points so that e.g. QPSK's Re{i} is exactly 0
    re[np.abs(re) < _ZERO_COMPONENT] = 0.0
    im[np.abs(im) < _ZERO_COMPONENT] = 0.0
    points = re + 1j * im
    points.setflags(write=False)
    return points


@dataclass(frozen=True)
class PskAlphabet:
    """Unit-modulus M-PSK points ``exp(2j*pi*k/order)``."""

    order: int

    def __post_init__(self):
        if self.order < 2 or self.order & (self.order - 1):
            raise ValueError(f"PSK order must be a power of two >= 2, got {self.order}")

    @property
    def points(self) -> np.ndarray:
        return _psk_points(self.order)

    def __getitem__(self, index):
        return self.points[index]

    def __len__(self):
        return self.order


@dataclass(frozen=True, eq=False)
class SymbolVector:
    """Cognitive symbols for one slot (indices into an alphabet) plus the primary symbol."""

    indices: tuple[int, ...]
    order: int
    primary_index: int = 0
    primary_order: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))
        if any(not 0 <= i < self.order for i in self.indices):
            raise ValueError(f"symbol index out of range for {self.order}-PSK")

    @property
    def d(self) -> np.ndarray:
        return PskAlphabet(self.order).points[list(self.indices)]

    @property
    def d_p(self) -> complex:
        return complex(PskAlphabet(self.primary_order or self.order)[self.primary_index])

    @property
    def num_users(self) -> int:
        return len(self.indices)


def draw_symbols(config: ScenarioConfig, trial_index: int, slot_index: int = 0) -> SymbolVector:
    """Uniform i.i.d. symbols for every cognitive user and the primary user."""
    rng = substream(config.seed, STREAM_SYMBOLS, trial_index, slot_index)
    indices = rng.integers(config.modulation_order, size=config.num_users)
    primary = int(rng.integers(config.primary_order))
    return SymbolVector(tuple(indices.tolist()), config.modulation_order, primary,
                        config.primary_order)


@dataclass(frozen=True)
class CrossCorrelation:
    rho: complex
    source_user: int | None = None
    target_user: int | None = None


def cross_correlation(h_j, w_k, source_user: int | None = None,
                      target_user: int | None = None) -> CrossCorrelation:
    """Normalized correlation ``h_j w_k / (||h_j|| ||w_k||)`` of stream k seen at user j."""
    h_j = np.asarray(h_j, dtype=complex).ravel()
    w_k = np.asarray(w_k, dtype=complex).ravel()
    nh, nw = np.linalg.norm(h_j), np.linalg.norm(w_k)
    if nh == 0 or nw == 0:
        raise DegenerateInputError("cross-correlation of a zero vector")
    return CrossCorrelation(complex(h_j @ w_k / (nh * nw)), source_user, target_user)


def is_constructive(rho: complex, d_k: complex, d_j: complex, order: int) -> bool:
    """Whether interference between symbols ``d_k`` and ``d_j`` through ``rho`` is constructive.

    Both conditions must hold:

    (a) ``angle(rho*d_k)`` lies within ``+-pi/order`` of ``angle(d_j)``
        (closed interval, shortest arc);
    (b) ``Re{d_k} Re{rho d_j} > 0`` and ``Im{d_k} Im{rho d_j} > 0``.

    A clause of (b) whose ``d_k`` component is exactly zero carries no sign
    information and is skipped; for BPSK this drops the imaginary clause,
    for the axis points of QPSK it drops one of the two.
    """
    rho, d_k, d_j = complex(rho), complex(d_k), complex(d_j)
    deviation = abs(float(_wrap(np.angle(rho * d_k) - np.angle(d_j))))
    if deviation > math.pi / order + 1e-15:
        return False
    z = rho * d_j
    for dk_part, z_part in ((d_k.real, z.real), (d_k.imag, z.imag)):
        if abs(dk_part) < _ZERO_COMPONENT:
            continue
        if not dk_part * z_part > 0:
            return False
    return True


def angular_distance(a, b):
    return np.abs(_wrap(np.angle(a) - np.angle(b)))


def detect(y, alphabet: PskAlphabet, return_ambiguous: bool = False):
    """Nearest-phase M-PSK decision.

    Accepts a scalar or an array of received samples. Ties go to the smaller
    index. A zero sample decodes to index 0 and is flagged ambiguous.
    """
    y = np.asarray(y, dtype=complex)
    dist = angular_distance(y[..., None], alphabet.points)
    index = np.argmin(dist, axis=-1)
    ambiguous = y == 0
    index = np.where(ambiguous, 0, index)
    if index.ndim == 0:
        index, ambiguous = int(index), bool(ambiguous)
    if return_ambiguous:
        return index, ambiguous
    return index
