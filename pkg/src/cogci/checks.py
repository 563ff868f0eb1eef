"""Invariant checks shared by the ``selftest`` command and the acceptance tests.

Each check takes its sample sizes as arguments and returns a
:class:`CheckResult`; the acceptance suite runs them at full size, the CLI at
reduced size. The oracles here only use numpy and never call into solver
internals.
"""

from __future__ import annotations

import math
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .baselines import solve_ccizf, solve_multicast_bound
from .ci_precoder import make_projector, precode, solve_ccipm, solve_ccipm_strict
from .constellation import PskAlphabet, draw_symbols, is_constructive
from .evaluation import audit_solution, energy_efficiency, user_rates
from .harness import SweepSpec, run_sweep, write_csv
from .scenario import UNBOUNDED, ScenarioConfig, generate_channels

# Operating point of the energy-efficiency experiment: 3 antennas, 2 users, QPSK at 4.7712 dB.
OPERATING_POINT = ScenarioConfig(num_tx_antennas=3, num_users=2, modulation_order=4, snr_targets=(3.0,))
MODES = (0.0, 0.1, 1.0, 10.0, UNBOUNDED)
LADDER = (0.0, 0.01, 0.1, 1.0, 10.0, UNBOUNDED)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


def _instance(config: ScenarioConfig, i: int):
    return generate_channels(config, i), draw_symbols(config, i)


def constraint_satisfaction(n: int = 1000, time_limit: float = 10.0, seed: int = 1) -> CheckResult:
    base = OPERATING_POINT.replace(seed=seed)
    failures, optimal, total = 0, 0, 0
    start = time.perf_counter()
    for limit in MODES:
        config = base.replace(interference_limit=limit)
        for i in range(n):
            channels, symbols = _instance(config, i)
            sol = precode(channels, symbols, config)
            total += 1
            if not sol.ok:
                continue
            optimal += 1
            audit = audit_solution(channels, sol.x, symbols, config,
                                   phase_tol=1e-6, snr_tol=1e-6, interference_tol=1e-9)
            failures += not audit.passed
    elapsed = time.perf_counter() - start
    passed = failures == 0 and optimal >= 0.99 * total and elapsed <= time_limit
    return CheckResult("constraint satisfaction", passed,
                       f"{optimal}/{total} optimal, {failures} audit failures, {elapsed:.2f}s")


def matched_filter(n: int = 100, seed: int = 2) -> CheckResult:
    config = ScenarioConfig(num_users=1, num_tx_antennas=3, seed=seed, snr_targets=(3.0,))
    worst = 0.0
    for i in range(n):
        channels, symbols = _instance(config, i)
        sol = solve_ccipm(channels, symbols, config)
        h = channels.h_ss[0]
        expected = math.sqrt(channels.psi[0] * config.zeta[0]) * symbols.d[0] * h.conj() / np.vdot(h, h).real
        worst = max(worst, float(np.linalg.norm(sol.x - expected) / np.linalg.norm(expected)))
    return CheckResult("matched-filter closed form", worst <= 1e-9, f"max relative error {worst:.2e}")


def random_search_min_power(x, H, h_ps, limit, rng, samples: int) -> float:
    """Least power found by perturbing ``x`` inside the affine set ``H x' = H x``.

    Perturbations are drawn in the null space of ``H`` at log-uniform scales
    and kept when ``|h_ps x'|^2 <= limit``.
    """
    _, _, vh = np.linalg.svd(H)
    basis = vh[H.shape[0]:].conj().T
    dim = basis.shape[1]
    scale = np.linalg.norm(x) * 10.0 ** rng.uniform(-6, 1, size=(samples, 1))
    z = (rng.standard_normal((samples, dim)) + 1j * rng.standard_normal((samples, dim))) * scale
    cand = x[None, :] + z @ basis.T
    keep = np.abs(cand @ h_ps) ** 2 <= limit
    if not keep.any():
        return math.inf
    return float(np.min(np.sum(np.abs(cand[keep]) ** 2, axis=1)))


def oracle_optimality(n: int = 50, samples: int = 100_000, seed: int = 3) -> CheckResult:
    base = OPERATING_POINT.replace(seed=seed)
    rng = np.random.default_rng(seed)
    beaten, checked = 0, 0
    worst = math.inf
    for i in range(n):
        channels, symbols = _instance(base, i)
        free = solve_ccipm(channels, symbols, base)
        # half the unconstrained leakage, so the limit binds
        config = base.replace(interference_limit=0.5 * free.interference)
        sol = solve_ccipm(channels, symbols, config)
        if not sol.ok:
            continue
        checked += 1
        best = random_search_min_power(sol.x, channels.h_ss, channels.h_ps,
                                       config.interference_limit, rng, samples)
        worst = min(worst, best / sol.power)
        beaten += best < sol.power * (1 - 1e-6)
    return CheckResult("random-search oracle optimality", beaten == 0 and checked == n,
                       f"{checked} instances, oracle wins {beaten}, min oracle/solver power {worst:.9f}")


def bound_ordering(n: int = 1000, n_single: int = 100, seed: int = 4) -> CheckResult:
    base = OPERATING_POINT.replace(seed=seed)
    violations, skipped = 0, 0
    for i in range(n):
        config = base.replace(interference_limit=MODES[i % len(MODES)])
        channels, symbols = _instance(config, i)
        sol = precode(channels, symbols, config)
        bound = solve_multicast_bound(channels, config)
        if not (sol.ok and bound.ok):
            skipped += 1
            continue
        violations += bound.power > sol.power + 1e-6 * sol.power
    single = ScenarioConfig(num_users=1, num_tx_antennas=3, seed=seed, snr_targets=(3.0,))
    worst_gap = 0.0
    for i in range(n_single):
        channels, symbols = _instance(single, i)
        sol = solve_ccipm(channels, symbols, single)
        bound = solve_multicast_bound(channels, single)
        worst_gap = max(worst_gap, abs(sol.power - bound.power) / sol.power)
    passed = violations == 0 and skipped <= 0.01 * n and worst_gap <= 1e-6
    return CheckResult("bound ordering", passed,
                       f"{violations} violations, {skipped} skipped, K=1 max gap {worst_gap:.2e}")


def scheme_ordering(n: int = 1000, trials: int = 2000, workers: int = 1, seed: int = 5) -> CheckResult:
    config = OPERATING_POINT.replace(seed=seed, interference_limit=0.0)
    violations = 0
    for i in range(n):
        channels, symbols = _instance(config, i)
        strict = solve_ccipm_strict(channels, symbols, config)
        zf = solve_ccizf(channels, symbols, config)
        violations += strict.ok and zf.ok and strict.power > zf.power + 1e-9
    spec = fig1_spec(trials, seed=seed, schemes=("ccipm_strict", "ccizf_standin"))
    result = run_sweep(spec, workers=workers)
    eta = {(r.sweep_point, r.scheme): r.metrics.energy_efficiency for r in result.rows}
    # identical algebra on both sides, so allow only rounding-level slack
    bad_points = [p for p in spec.sweep_points
                  if not eta[(p, "ccipm_strict")] >= eta[(p, "ccizf_standin")] * (1 - 1e-12)]
    return CheckResult("scheme ordering", violations == 0 and not bad_points,
                       f"{violations} per-instance violations, η dominance fails at {bad_points}")


def monotonicity(n: int = 1000, seed: int = 6) -> CheckResult:
    base = OPERATING_POINT.replace(seed=seed)
    violations, incomplete = 0, 0
    for i in range(n):
        channels, symbols = _instance(base, i)
        powers = []
        for limit in LADDER:
            sol = precode(channels, symbols, base.replace(interference_limit=limit))
            powers.append(sol.power if sol.ok else math.nan)
        if any(math.isnan(p) for p in powers):
            incomplete += 1
            continue
        violations += any(b > a * (1 + 1e-12) for a, b in zip(powers, powers[1:]))
    return CheckResult("monotonicity in interference limit", violations == 0 and incomplete <= 0.01 * n,
                       f"{violations} violations over {n - incomplete} complete ladders")


def complementary_slackness(n: int = 1000, seed: int = 7) -> CheckResult:
    base = OPERATING_POINT.replace(seed=seed)
    worst, lam_errors, count = 0.0, 0, 0
    for i in range(n):
        channels, symbols = _instance(base, i)
        free = solve_ccipm(channels, symbols, base)
        for limit in (0.01, 0.1, 1.0, 10.0):
            config = base.replace(interference_limit=limit)
            sol = solve_ccipm(channels, symbols, config)
            if not sol.ok:
                continue
            count += 1
            worst = max(worst, abs(sol.lam * (sol.interference - limit)) / max(1.0, limit))
            if free.interference <= limit and sol.lam != 0.0:
                lam_errors += 1
    return CheckResult("complementary slackness", worst <= 1e-6 and lam_errors == 0,
                       f"{count} solutions, max |λ·slack| {worst:.2e}, λ≠0 when slack: {lam_errors}")


def mutuality(order: int = 4, draws: int = 10_000, seed: int = 8) -> CheckResult:
    rng = np.random.default_rng(seed)
    rho = np.sqrt(rng.uniform(0, 1, draws)) * np.exp(1j * rng.uniform(-np.pi, np.pi, draws))
    points = PskAlphabet(order).points
    counter, positives = 0, 0
    for d_k in points:
        for d_j in points:
            for r in rho:
                a = is_constructive(r, d_k, d_j, order)
                counter += a != is_constructive(r, d_j, d_k, order)
                positives += a
    return CheckResult(f"constructive-interference mutuality ({order}-PSK)", counter == 0,
                       f"{counter} counterexamples, {positives} constructive cases")


def projector_algebra(n: int = 10_000, M: int = 3, seed: int = 9) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        scale = 10.0 ** rng.uniform(-3, 3)
        h = scale * (rng.standard_normal(M) + 1j * rng.standard_normal(M))
        v = rng.standard_normal(M) + 1j * rng.standard_normal(M)
        pi = make_projector(h).pi
        errs = (
            np.linalg.norm(pi @ pi - pi),
            np.linalg.norm(pi - pi.conj().T),
            np.linalg.norm(pi @ h.conj()) / np.linalg.norm(h),
            abs(np.linalg.norm(pi @ v) ** 2 + abs(h @ v) ** 2 / np.vdot(h, h).real
                - np.linalg.norm(v) ** 2) / np.linalg.norm(v) ** 2,
        )
        worst = max(worst, *errs)
    return CheckResult("projector algebra", worst <= 1e-10, f"max error {worst:.2e} over {n} channels")


def fig1_spec(trials: int = 2000, seed: int = 0, schemes=("ccipm_strict", "ccizf_standin")) -> SweepSpec:
    return SweepSpec(
        sweep_variable="channel_strength_db",
        sweep_points=(0.0, 5.0, 10.0, 15.0, 20.0),
        trials_per_point=trials,
        schemes=schemes,
        base_config=OPERATING_POINT.replace(seed=seed, interference_limit=0.0),
    )


def determinism(trials: int = 2000, workers: tuple[int, int] = (1, 8), seed: int = 10) -> CheckResult:
    spec = fig1_spec(trials, seed=seed)
    blobs = []
    with tempfile.TemporaryDirectory() as tmp:
        for w in workers:
            path = Path(tmp) / f"w{w}.csv"
            write_csv(run_sweep(spec, workers=w), path, spec)
            blobs.append(path.read_bytes())
    same = all(b == blobs[0] for b in blobs)
    return CheckResult("determinism across worker counts", same,
                       f"workers {workers}: {'identical' if same else 'different'} CSV bytes")


def energy_efficiency_anchor() -> CheckResult:
    eta = energy_efficiency(user_rates([3.0, 3.0]), 2.0)
    return CheckResult("energy efficiency anchor", abs(eta - 2.0) <= 1e-12, f"η = {eta}")


def run_all(quick: bool = True) -> list[CheckResult]:
    if quick:
        return [
            constraint_satisfaction(n=100),
            matched_filter(n=20),
            oracle_optimality(n=5, samples=20_000),
            bound_ordering(n=40, n_single=10),
            scheme_ordering(n=100, trials=100),
            monotonicity(n=100),
            complementary_slackness(n=100),
            mutuality(draws=500),
            projector_algebra(n=1000),
            determinism(trials=50, workers=(1, 2)),
            energy_efficiency_anchor(),
        ]
    return [
        constraint_satisfaction(),
        matched_filter(),
        oracle_optimality(),
        bound_ordering(),
        scheme_ordering(),
        monotonicity(),
        complementary_slackness(),
        mutuality(),
        projector_algebra(),
        determinism(),
        energy_efficiency_anchor(),
    ]
