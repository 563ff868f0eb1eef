"""Symbol-level power-minimizing precoders for the cognitive downlink.

Both solvers return the transmit vector ``x`` directly (one symbol slot).
The per-user constraints are held with equality, ``h_ss[j] @ x = sqrt(psi_j
zeta_j) d_j``, which fixes the received phase at the symbol phase and the
received SNR at the target.

Relaxed mode (``0 < I_th``): stationarity of the Lagrangian gives

    x(lam) = (I + lam h_ps^H h_ps)^{-1} H^H c,   c_j = (alpha_j + 1j*mu_j) / 2

and for fixed ``lam`` the equality constraints are linear in ``c``. The
interference ``|h_ps x(lam)|^2`` is non-increasing in ``lam``, so ``lam`` is
located by a bracketed scalar root search when the unconstrained solution
violates the interference limit.

Strict mode (``I_th = 0``): ``x`` is restricted to the null space of
``h_ps`` through the orthogonal projector.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .constellation import SymbolVector
from .scenario import ChannelSet, DegenerateChannelError, ScenarioConfig

COND_LIMIT = 1e12
RESIDUAL_TOL = 1e-6
INTERFERENCE_TOL = 1e-9
MAX_ITER = 200
_MAX_EXPANSIONS = 80


class Status(str, enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    DEGENERATE = "Degenerate"
    MAX_ITER = "MaxIter"


class StrictModeError(ValueError):
    """Raised when the relaxed solver is asked for a zero interference limit."""


@dataclass(frozen=True, eq=False)
class PrecodeSolution:
    x: np.ndarray
    power: float
    lam: float | None
    mu: np.ndarray
    alpha: np.ndarray
    residual_phase: np.ndarray
    interference: float
    residual_interference: float
    iterations: int
    status: Status
    scheme: str = "ccipm"
    search_trace: tuple[tuple[float, float], ...] = ()
    info: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status is Status.OPTIMAL

    @property
    def multipliers(self) -> np.ndarray:
        """Complex multipliers ``c_j = (alpha_j + 1j mu_j) / 2``."""
        return 0.5 * (self.alpha + 1j * self.mu)


@dataclass(frozen=True)
class NullSpaceProjector:
    pi: np.ndarray

    def __matmul__(self, other):
        return self.pi @ other


def make_projector(h_ps) -> NullSpaceProjector:
    """``I - h^H h / ||h||^2``: orthogonal projector onto the null space of ``h_ps``."""
    h = np.asarray(h_ps, dtype=complex).ravel()
    norm2 = float(np.vdot(h, h).real)
    if norm2 == 0:
        raise DegenerateChannelError("zero CBS-to-PU channel has no null space")
    pi = np.eye(h.size, dtype=complex) - np.outer(h.conj(), h) / norm2
    pi.setflags(write=False)
    return NullSpaceProjector(pi)


def delivery_targets(channels: ChannelSet, symbols: SymbolVector, config: ScenarioConfig) -> np.ndarray:
    """Required received samples ``sqrt(psi_j zeta_j) d_j``."""
    if symbols.num_users != channels.num_users or len(config.snr_targets) != channels.num_users:
        raise ValueError("channels, symbols and config disagree on the number of users")
    return np.sqrt(channels.psi * config.zeta) * symbols.d


def _coefficients(A: np.ndarray, b: np.ndarray) -> np.ndarray | None:
    """Solve the K x K Gram system, or None if it is too ill-conditioned."""
    if not np.all(np.isfinite(A)) or np.linalg.cond(A) > COND_LIMIT:
        return None
    return np.linalg.solve(A, b)


def _finish(x, c, b, channels, limit, *, lam, iterations, scheme, trace=(), status=None, info=None):
    x = np.asarray(x)
    residual = np.abs(channels.h_ss @ x - b) / np.abs(b)
    interference = float(abs(channels.h_ps @ x) ** 2)
    if status is None:
        allowance = limit * (1 + INTERFERENCE_TOL) if limit > 0 else (
            1e-20 * float(np.vdot(channels.h_ps, channels.h_ps).real) * float(np.vdot(x, x).real))
        feasible = residual.max() <= RESIDUAL_TOL and interference <= allowance
        status = Status.OPTIMAL if feasible else Status.DEGENERATE
    x.setflags(write=False)
    return PrecodeSolution(
        x=x,
        power=float(np.vdot(x, x).real),
        lam=lam,
        mu=2 * c.imag,
        alpha=2 * c.real,
        residual_phase=residual,
        interference=interference,
        residual_interference=interference - limit,
        iterations=iterations,
        status=status,
        scheme=scheme,
        search_trace=tuple(trace),
        info=info or {},
    )


def _degenerate(channels, scheme, reason, limit, status=Status.DEGENERATE, trace=()):
    K, M = channels.h_ss.shape
    nan = np.full(K, np.nan)
    return PrecodeSolution(
        x=np.full(M, np.nan, dtype=complex), power=math.nan, lam=None, mu=nan, alpha=nan.copy(),
        residual_phase=nan.copy(), interference=math.nan, residual_interference=math.nan,
        iterations=len(trace), status=status, scheme=scheme, search_trace=tuple(trace),
        info={"reason": reason},
    )


class _RelaxedFamily:
    """``x(lam)`` and its interference for one (channels, targets) instance.

    ``(I + lam h^H h)^{-1} = (I - u u^H) + u u^H / (1 + lam ||h||^2)`` with
    ``u = h^H/||h||``. Keeping the null-space part and the scaled ``u``
    component separate avoids cancellation when ``lam`` is large.
    """

    def __init__(self, channels: ChannelSet, b: np.ndarray):
        self.H = channels.h_ss
        self.h = channels.h_ps
        self.b = b
        self.hnorm2 = float(np.vdot(self.h, self.h).real)
        self.u = self.h.conj() / math.sqrt(self.hnorm2)
        G = self.H.conj().T
        self.uG = self.u.conj() @ G
        self.G_perp = G - np.outer(self.u, self.uG)
        self.trace: list[tuple[float, float]] = []

    def solve(self, lam: float):
        along = 1.0 / (1.0 + lam * self.hnorm2)
        BG = self.G_perp + along * np.outer(self.u, self.uG)
        c = _coefficients(self.H @ BG, self.b)
        if c is None:
            return None, None, math.inf
        interference = self.hnorm2 * along**2 * abs(self.uG @ c) ** 2
        return BG @ c, c, float(interference)

    def interference(self, lam: float) -> float:
        value = self.solve(lam)[2]
        self.trace.append((lam, value))
        return value


def solve_ccipm(channels: ChannelSet, symbols: SymbolVector, config: ScenarioConfig) -> PrecodeSolution:
    """Minimum-power transmit vector under a finite or unbounded interference limit."""
    limit = config.interference_limit
    if limit == 0:
        raise StrictModeError("interference_limit = 0: use solve_ccipm_strict (or precode)")
    b = delivery_targets(channels, symbols, config)
    if not np.any(channels.h_ps):
        # no path to the PU: the constraint is vacuous
        family = None
    else:
        family = _RelaxedFamily(channels, b)

    if family is None:
        G = channels.h_ss.conj().T
        c = _coefficients(channels.h_ss @ G, b)
        if c is None:
            return _degenerate(channels, "ccipm", "rank-deficient user channels", limit)
        return _finish(G @ c, c, b, channels, limit, lam=0.0, iterations=1, scheme="ccipm")

    x0, c0, i0 = family.solve(0.0)
    if x0 is None:
        return _degenerate(channels, "ccipm", "rank-deficient user channels", limit)
    family.trace.append((0.0, i0))
    if i0 <= limit:
        # slack constraint: complementary slackness forces lam = 0
        return _finish(x0, c0, b, channels, limit, lam=0.0, iterations=1, scheme="ccipm",
                       trace=family.trace)

    def excess(lam):
        return family.interference(lam) - limit

    # geometric bracket expansion; excess(0) > 0 is known
    lo, hi = 0.0, 1.0 / family.hnorm2
    for _ in range(_MAX_EXPANSIONS):
        f_hi = excess(hi)
        if f_hi <= 0:
            break
        lo, hi = hi, hi * 10.0
    else:
        return _degenerate(channels, "ccipm", "root search failed to bracket the interference limit",
                           limit, status=Status.INFEASIBLE, trace=family.trace)

    lam = hi
    if f_hi < 0:
        try:
            lam = brentq(excess, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=MAX_ITER)
        except RuntimeError:
            return _degenerate(channels, "ccipm", "root search hit the iteration cap", limit,
                               status=Status.MAX_ITER, trace=family.trace)
    # settle on the feasible side: the smallest evaluated lam at or above the
    # root whose interference does not exceed the limit (hi always qualifies)
    lam = min(l for l, v in family.trace if v <= limit and l >= lam * (1 - 1e-12))
    x, c, _ = family.solve(lam)
    if x is None:
        return _degenerate(channels, "ccipm", "rank-deficient system at the root", limit,
                           trace=family.trace)
    return _finish(x, c, b, channels, limit, lam=float(lam), iterations=len(family.trace),
                   scheme="ccipm", trace=family.trace)


def solve_ccipm_strict(channels: ChannelSet, symbols: SymbolVector, config: ScenarioConfig) -> PrecodeSolution:
    """Minimum-power transmit vector confined to the null space of ``h_ps``."""
    b = delivery_targets(channels, symbols, config)
    proj = make_projector(channels.h_ps)
    G = proj.pi @ channels.h_ss.conj().T
    c = _coefficients(channels.h_ss @ G, b)
    if c is None:
        return _degenerate(channels, "ccipm_strict",
                           "projected user channels are rank deficient", 0.0)
    return _finish(G @ c, c, b, channels, 0.0, lam=None, iterations=1, scheme="ccipm_strict")


def precode(channels: ChannelSet, symbols: SymbolVector, config: ScenarioConfig) -> PrecodeSolution:
    """Dispatch on the interference limit: zero goes to the strict solver."""
    if config.is_strict:
        return solve_ccipm_strict(channels, symbols, config)
    return solve_ccipm(channels, symbols, config)
