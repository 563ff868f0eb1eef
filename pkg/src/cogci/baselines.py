"""Comparison schemes: null-space zero forcing and the phase-relaxed power bound."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import cvxpy as cp
import numpy as np
from scipy.linalg import null_space

from .ci_precoder import (
    PrecodeSolution,
    Status,
    _coefficients,
    _degenerate,
    _finish,
    delivery_targets,
    make_projector,
)
from .constellation import SymbolVector
from .scenario import ChannelSet, ScenarioConfig

PRIMAL_TOL = 1e-7
DUAL_TOL = 1e-6
CCIZF_LABEL = "ccizf_standin"


@dataclass(frozen=True)
class CcizfConfig:
    power_budget: float = math.inf
    scale_tolerance: float = 1e-9

    def __post_init__(self):
        if not self.power_budget > 0:
            raise ValueError("power_budget must be > 0")


def solve_ccizf(channels: ChannelSet, symbols: SymbolVector, config: ScenarioConfig,
                baseline_cfg: CcizfConfig | None = None) -> PrecodeSolution:
    """Zero-forcing stand-in for the constructive-interference ZF comparison scheme.

    Inverts the user channels inside the null space of ``h_ps`` so each user
    receives exactly ``sqrt(psi_j zeta_j) d_j`` and the PU receives nothing,
    then scales by the smallest factor >= 1 that meets every SNR target.
    The result is infeasible when its power exceeds ``power_budget``.
    """
    baseline_cfg = baseline_cfg or CcizfConfig()
    u = delivery_targets(channels, symbols, config)
    pi = make_projector(channels.h_ps).pi
    H_p = channels.h_ss @ pi
    coeffs = _coefficients(H_p @ H_p.conj().T, u)
    if coeffs is None:
        return _degenerate(channels, CCIZF_LABEL, "projected user channels are rank deficient", 0.0)
    x = pi @ H_p.conj().T @ coeffs

    delivered = np.abs(channels.h_ss @ x)
    need = float(np.max(np.abs(u) / delivered))
    scale = 1.0 if need <= 1 + baseline_cfg.scale_tolerance else need
    x = scale * x
    info = {"scale": scale}
    status = None
    if float(np.vdot(x, x).real) > baseline_cfg.power_budget:
        status = Status.INFEASIBLE
        info["reason"] = "power budget exceeded"
    return _finish(x, scale * coeffs, u, channels, 0.0, lam=None, iterations=1,
                   scheme=CCIZF_LABEL, status=status, info=info)


@dataclass(frozen=True, eq=False)
class BoundSolution:
    Q: np.ndarray
    power: float
    rank: int
    kkt_residual: float
    status: Status
    strict: bool = False
    residuals: dict = field(default_factory=dict)
    duals: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status is Status.OPTIMAL


def _numerical_rank(Q: np.ndarray, rtol: float = 1e-6) -> int:
    w = np.linalg.eigvalsh(Q)
    return int(np.sum(w > rtol * max(w.max(), 0.0))) if w.size else 0


def _psd_part(Q: np.ndarray) -> np.ndarray:
    Q = 0.5 * (Q + Q.conj().T)
    w, V = np.linalg.eigh(Q)
    return (V * np.clip(w, 0.0, None)) @ V.conj().T


def _quad(h, Q):
    return float(np.real(h @ Q @ h.conj()))


def solve_multicast_bound(channels: ChannelSet, config: ScenarioConfig, *,
                          snr_equality: bool = True) -> BoundSolution:
    """Trace-minimizing input covariance with the phase constraints dropped.

    Solves ``min tr(Q)`` over Hermitian PSD ``Q`` with
    ``h_j Q h_j^H = psi_j zeta_j`` (or ``>=`` when ``snr_equality`` is false)
    and ``h_ps Q h_ps^H <= I_th``. The limit is dropped when unbounded. In
    strict mode (``I_th = 0``) ``Q`` is parametrized on an orthonormal basis of
    the null space of ``h_ps``, which keeps the program strictly feasible.
    """
    H = channels.h_ss
    h_ps = channels.h_ps
    K, M = H.shape
    targets = channels.psi * config.zeta
    limit = config.interference_limit
    strict = config.is_strict

    if strict:
        basis = null_space(h_ps[None, :]) if np.any(h_ps) else np.eye(M, dtype=complex)
    else:
        basis = np.eye(M, dtype=complex)
    Hr = H @ basis
    n = basis.shape[1]

    R = cp.Variable((n, n), hermitian=True)
    user_cons = []
    for j in range(K):
        quad = cp.real(cp.trace(np.outer(Hr[j].conj(), Hr[j]) @ R))
        user_cons.append(quad == targets[j] if snr_equality else quad >= targets[j])
    constraints = [R >> 0, *user_cons]
    interference_con = None
    if not strict and math.isfinite(limit):
        hr = h_ps @ basis
        interference_con = cp.real(cp.trace(np.outer(hr.conj(), hr) @ R)) <= limit
        constraints.append(interference_con)
    problem = cp.Problem(cp.Minimize(cp.real(cp.trace(R))), constraints)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        try:
            problem.solve(solver=cp.CLARABEL, tol_gap_abs=1e-11, tol_gap_rel=1e-11,
                          tol_feas=1e-11, max_iter=200)
        except cp.error.SolverError:
            problem.solve(solver=cp.SCS, eps=1e-9, max_iters=200000)

    if problem.status in (cp.INFEASIBLE, cp.INFEASIBLE_INACCURATE):
        nanQ = np.full((M, M), np.nan, dtype=complex)
        return BoundSolution(nanQ, math.nan, 0, math.nan, Status.INFEASIBLE, strict)
    if R.value is None:
        nanQ = np.full((M, M), np.nan, dtype=complex)
        return BoundSolution(nanQ, math.nan, 0, math.nan, Status.MAX_ITER, strict)

    nu0 = np.array([float(np.real(c.dual_value)) for c in user_cons])
    if not snr_equality:
        nu0 = -nu0
    z0 = float(np.real(interference_con.dual_value)) if interference_con is not None else 0.0
    hr = h_ps @ basis
    C_users = [np.outer(Hr[j].conj(), Hr[j]) for j in range(K)]
    C_int = np.outer(hr.conj(), hr) if interference_con is not None else None
    kkt = _KKT(C_users, targets, C_int, limit, snr_equality)

    R0 = _psd_part(R.value)
    best = kkt.evaluate(R0, nu0, z0)
    polished = kkt.polish(R0, nu0, z0)
    if polished is not None and polished["kkt"] < best["kkt"]:
        best = polished

    Q = basis @ best["R"] @ basis.conj().T
    Q = 0.5 * (Q + Q.conj().T)
    power = float(np.trace(Q).real)
    residuals = {k: best[k] for k in ("primal", "dual", "complementarity")}
    if strict:
        residuals["primal_interference"] = _quad(h_ps, Q) / max(power, 1e-300)
    kkt_residual = max(residuals.values())
    good = (max(residuals["primal"], residuals.get("primal_interference", 0.0)) <= PRIMAL_TOL
            and residuals["dual"] <= DUAL_TOL and residuals["complementarity"] <= DUAL_TOL)
    status = Status.OPTIMAL if good else Status.MAX_ITER
    Q.setflags(write=False)
    return BoundSolution(Q=Q, power=power, rank=_numerical_rank(Q), kkt_residual=kkt_residual,
                         status=status, strict=strict, residuals=residuals,
                         duals={"user": best["nu"], "interference": best["z"]})


class _KKT:
    """Optimality conditions of the trace-minimization program in one coordinate frame.

    With cvxpy's sign convention (L = f0 + sum nu_j g_j, g_j = <C_j, R> - t_j)
    the dual slack is ``Z = I + sum nu_j C_j + z C_int`` and must be PSD with
    ``Z R = 0``.
    """

    def __init__(self, C_users, targets, C_int, limit, snr_equality):
        self.C = C_users
        self.t = np.asarray(targets, dtype=float)
        self.C_int = C_int
        self.limit = limit
        self.eq = snr_equality
        self.n = C_users[0].shape[0]

    def slack(self, nu, z):
        Z = np.eye(self.n, dtype=complex) + sum(v * C for v, C in zip(nu, self.C))
        if self.C_int is not None:
            Z = Z + z * self.C_int
        return 0.5 * (Z + Z.conj().T)

    def evaluate(self, R, nu, z):
        R = 0.5 * (R + R.conj().T)
        delivered = np.array([np.real(np.vdot(C, R)) for C in self.C])
        gap = (delivered - self.t) / self.t
        primal = float(np.max(np.abs(gap) if self.eq else np.clip(-gap, 0, None)))
        slack_terms = []
        if not self.eq:
            # inequality multipliers are nonpositive in this convention
            primal_dual = max(0.0, float(np.max(nu)))
            slack_terms.append(float(np.max(np.abs(nu * gap * self.t))) / max(1.0, self.t.max()))
        else:
            primal_dual = 0.0
        if self.C_int is not None:
            interference = float(np.real(np.vdot(self.C_int, R)))
            primal = max(primal, max(0.0, interference - self.limit) / max(self.limit, 1e-300))
            primal_dual = max(primal_dual, max(0.0, -z))
            slack_terms.append(abs(z * (interference - self.limit)) / max(self.limit, 1.0))
        Z = self.slack(nu, z)
        dual = max(primal_dual, -float(np.linalg.eigvalsh(Z).min()))
        power = float(np.trace(R).real)
        slack_terms.append(abs(float(np.real(np.vdot(Z, R)))) / max(power, 1.0))
        comp = max(slack_terms)
        return {"R": R, "nu": np.asarray(nu, dtype=float), "z": float(z), "primal": primal,
                "dual": dual, "complementarity": comp, "kkt": max(primal, dual, comp)}

    @staticmethod
    def _gauge_rows(Y, ncols):
        """Linear rows pinning the anti-Hermitian part of ``Y^H dY`` to zero."""
        n, r = Y.shape
        nr = n * r
        rows = []
        for k in range(2 * nr):
            e = np.zeros(2 * nr)
            e[k] = 1.0
            dY = (e[:nr] + 1j * e[nr:]).reshape((n, r), order="F")
            S = Y.conj().T @ dY
            A = S - S.conj().T
            iu = np.triu_indices(r)
            rows.append(np.concatenate([A[iu].real, A[iu].imag]))
        G = np.array(rows).T
        return np.hstack([G, np.zeros((G.shape[0], ncols - 2 * nr))])

    def polish(self, R0, nu0, z0, iterations: int = 8):
        """Gauss-Newton on the optimality system with ``R = Y Y^H``.

        Unknowns are ``Y`` (n x r, r the numerical rank of ``R0``) and the
        multipliers of the active constraints; residuals are ``Z Y = 0`` and
        the active constraint equalities. The unitary gauge ``Y -> Y U``
        makes the Jacobian singular, which least squares absorbs.
        """
        w, V = np.linalg.eigh(R0)
        r = int(np.sum(w > 1e-6 * max(w.max(), 1e-300)))
        if r == 0:
            return None
        Y = V[:, -r:] * np.sqrt(w[-r:])
        n, K = self.n, len(self.C)
        delivered = np.array([np.real(np.vdot(C, R0)) for C in self.C])
        active = [j for j in range(K) if self.eq or abs(delivered[j] - self.t[j]) <= 1e-4 * self.t[j]]
        use_int = False
        if self.C_int is not None:
            interference = float(np.real(np.vdot(self.C_int, R0)))
            use_int = abs(interference - self.limit) <= 1e-4 * max(self.limit, 1e-300) or z0 > 1e-8
        nu = np.where(np.isin(np.arange(K), active), nu0, 0.0)
        z = z0 if use_int else 0.0
        cons = [(self.C[j], self.t[j]) for j in active]
        if use_int:
            cons.append((self.C_int, self.limit))
        nr = n * r
        for _ in range(iterations):
            Z = self.slack(nu, z)
            F1 = (Z @ Y).ravel(order="F")
            F2 = np.array([np.real(np.vdot(Y, C @ Y)) - t for C, t in cons])
            F = np.concatenate([F1.real, F1.imag, F2])
            if np.max(np.abs(F)) < 1e-15 * max(1.0, self.t.max()):
                break
            Kz = np.kron(np.eye(r), Z)
            mult_cols = [(C @ Y).ravel(order="F") for C, _ in cons]
            J = np.zeros((2 * nr + len(cons), 2 * nr + len(cons)))
            J[:nr, :nr], J[:nr, nr:2 * nr] = Kz.real, -Kz.imag
            J[nr:2 * nr, :nr], J[nr:2 * nr, nr:2 * nr] = Kz.imag, Kz.real
            for i, g in enumerate(mult_cols):
                J[:nr, 2 * nr + i] = g.real
                J[nr:2 * nr, 2 * nr + i] = g.imag
                J[2 * nr + i, :nr] = 2 * g.real
                J[2 * nr + i, nr:2 * nr] = 2 * g.imag
            J = np.vstack([J, self._gauge_rows(Y, J.shape[1])])
            F = np.concatenate([F, np.zeros(J.shape[0] - F.size)])
            step = np.linalg.lstsq(J, -F, rcond=None)[0]
            Y = Y + (step[:nr] + 1j * step[nr:2 * nr]).reshape((n, r), order="F")
            dm = step[2 * nr:]
            for i, j in enumerate(active):
                nu[j] += dm[i]
            if use_int:
                z += dm[-1]
        if not np.all(np.isfinite(Y)):
            return None
        return self.evaluate(Y @ Y.conj().T, nu, z)
