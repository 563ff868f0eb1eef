import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cogci.baselines import CCIZF_LABEL, CcizfConfig, solve_ccizf, solve_multicast_bound
from cogci.ci_precoder import Status, solve_ccipm, solve_ccipm_strict
from cogci.constellation import SymbolVector
from cogci.evaluation import audit_solution
from cogci.scenario import UNBOUNDED, ScenarioConfig

from .strategies import instance, links, seeds, trial_indices


def test_single_user_bound_is_matched_filter():
    h = np.array([1 + 1j, 2, -0.5j])
    ch = links(h, [0.3, 1, 1], psi=2.0)
    cfg = ScenarioConfig(num_tx_antennas=3, num_users=1, snr_targets=(3.0,))
    bound = solve_multicast_bound(ch, cfg)
    assert bound.ok and bound.rank == 1
    n2 = np.vdot(h, h).real
    assert bound.power == pytest.approx(6.0 / n2, rel=1e-7)
    x = math.sqrt(6.0) * h.conj() / n2
    np.testing.assert_allclose(bound.Q, np.outer(x, x.conj()), atol=1e-7)
    assert bound.kkt_residual <= 1e-6


@pytest.mark.parametrize("trial", range(10))
def test_single_user_bound_is_tight(trial):
    cfg = ScenarioConfig(num_users=1, interference_limit=1e6, seed=77)
    ch, sv = instance(cfg, trial)
    bound = solve_multicast_bound(ch, cfg)
    sol = solve_ccipm(ch, sv, cfg)
    assert sol.lam == 0
    assert bound.power == pytest.approx(sol.power, rel=1e-6)


def test_identical_user_and_primary_channel_is_infeasible():
    ch = links([[1, 0]], [1, 0])
    cfg = ScenarioConfig(num_tx_antennas=2, num_users=1, snr_targets=(1.0,), interference_limit=0.5)
    assert solve_multicast_bound(ch, cfg).status is Status.INFEASIBLE


@settings(max_examples=25)
@given(seeds, trial_indices, st.sampled_from([0.0, 0.05, 1.0, UNBOUNDED]))
def test_bound_is_hermitian_psd_and_feasible(seed, trial, limit):
    cfg = ScenarioConfig(seed=seed, interference_limit=limit)
    ch, _ = instance(cfg, trial)
    bound = solve_multicast_bound(ch, cfg)
    assert bound.ok
    Q = bound.Q
    np.testing.assert_allclose(Q, Q.conj().T, atol=0)
    assert np.linalg.eigvalsh(Q).min() >= -1e-9 * bound.power
    delivered = np.real(np.einsum("km,mn,kn->k", ch.h_ss, Q, ch.h_ss.conj()))
    np.testing.assert_allclose(delivered, ch.psi * cfg.zeta, rtol=1e-7)
    leak = np.real(ch.h_ps @ Q @ ch.h_ps.conj())
    if limit == 0:
        assert leak <= 1e-7 * bound.power
    elif math.isfinite(limit):
        assert leak <= limit * (1 + 1e-7)


@settings(max_examples=25)
@given(seeds, trial_indices, st.sampled_from([0.01, 0.3, 3.0]))
def test_ordering_chain(seed, trial, limit):
    cfg = ScenarioConfig(seed=seed, interference_limit=limit)
    strict = cfg.replace(interference_limit=0.0)
    ch, sv = instance(cfg, trial)
    q_relaxed = solve_multicast_bound(ch, cfg).power
    q_strict = solve_multicast_bound(ch, strict).power
    p_relaxed = solve_ccipm(ch, sv, cfg).power
    p_strict = solve_ccipm_strict(ch, sv, strict).power
    p_zf = solve_ccizf(ch, sv, strict).power
    tol = 1e-6
    assert q_relaxed <= q_strict * (1 + tol)
    assert q_strict <= p_strict * (1 + tol)
    assert p_strict <= p_zf + 1e-9
    assert q_relaxed <= p_relaxed * (1 + tol)
    assert p_relaxed <= p_strict * (1 + 1e-12)


@settings(max_examples=25)
@given(seeds, trial_indices)
def test_inequality_form_never_exceeds_equality_form(seed, trial):
    cfg = ScenarioConfig(seed=seed, interference_limit=0.2)
    ch, _ = instance(cfg, trial)
    eq = solve_multicast_bound(ch, cfg)
    ge = solve_multicast_bound(ch, cfg, snr_equality=False)
    assert ge.ok
    assert ge.power <= eq.power * (1 + 1e-7)


@given(seeds, trial_indices)
def test_ccizf_delivers_exactly_in_the_null_space(seed, trial):
    cfg = ScenarioConfig(seed=seed, interference_limit=0.0)
    ch, sv = instance(cfg, trial)
    sol = solve_ccizf(ch, sv, cfg)
    assert sol.ok and sol.scheme == CCIZF_LABEL
    target = np.sqrt(ch.psi * cfg.zeta) * sv.d
    assert np.max(np.abs(ch.h_ss @ sol.x - target)) <= 1e-8
    assert abs(ch.h_ps @ sol.x) <= 1e-10 * np.linalg.norm(ch.h_ps) * np.linalg.norm(sol.x)
    assert sol.info["scale"] == 1.0
    assert audit_solution(ch, sol.x, sv, cfg).passed


@given(seeds, trial_indices)
def test_ccizf_matches_strict_ccipm(seed, trial):
    # both are the least-norm solution of the same linear system inside the null space
    cfg = ScenarioConfig(seed=seed, interference_limit=0.0)
    ch, sv = instance(cfg, trial)
    zf = solve_ccizf(ch, sv, cfg)
    strict = solve_ccipm_strict(ch, sv, cfg)
    np.testing.assert_allclose(zf.x, strict.x, rtol=1e-9, atol=1e-12 * np.linalg.norm(strict.x))


def test_ccizf_orthogonal_example():
    H = np.array([[1, 0, 0], [0, 2j, 0]], dtype=complex)
    ch = links(H, [0, 0, 1])
    cfg = ScenarioConfig(interference_limit=0.0, snr_targets=(3.0,))
    sv = SymbolVector((1, 2), 4)
    np.testing.assert_allclose(solve_ccizf(ch, sv, cfg).x, solve_ccipm_strict(ch, sv, cfg).x, atol=1e-15)


def test_ccizf_power_budget(operating_point):
    cfg = operating_point.replace(interference_limit=0.0)
    ch, sv = instance(cfg, 3)
    free = solve_ccizf(ch, sv, cfg)
    capped = solve_ccizf(ch, sv, cfg, CcizfConfig(power_budget=0.5 * free.power))
    assert capped.status is Status.INFEASIBLE
    with pytest.raises(ValueError):
        CcizfConfig(power_budget=0.0)
