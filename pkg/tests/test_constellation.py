import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cogci.constellation import (
    DegenerateInputError,
    PskAlphabet,
    SymbolVector,
    cross_correlation,
    detect,
    draw_symbols,
    is_constructive,
)
from cogci.evaluation import psk_symbol_error_rate
from cogci.scenario import ScenarioConfig

from .strategies import complex_vectors, seeds, trial_indices, unit_disc


def test_alphabet_points():
    np.testing.assert_array_equal(PskAlphabet(4).points, [1, 1j, -1, -1j])
    np.testing.assert_array_equal(PskAlphabet(2).points, [1, -1])
    np.testing.assert_allclose(np.abs(PskAlphabet(16).points), 1.0, rtol=0, atol=1e-15)
    with pytest.raises(ValueError):
        PskAlphabet(3)


def test_symbol_vector_bounds():
    with pytest.raises(ValueError):
        SymbolVector((0, 4), 4)
    sv = SymbolVector((1, 2), 4, primary_index=1, primary_order=2)
    np.testing.assert_array_equal(sv.d, [1j, -1])
    assert sv.d_p == -1


@given(seeds, trial_indices)
def test_draw_symbols_deterministic_and_in_range(seed, trial):
    cfg = ScenarioConfig(seed=seed, modulation_order=8)
    a, b = draw_symbols(cfg, trial), draw_symbols(cfg, trial)
    assert a.indices == b.indices and a.primary_index == b.primary_index
    assert all(0 <= i < 8 for i in a.indices)


def test_cross_correlation_examples():
    assert cross_correlation([1, 0], [1, 0]).rho == 1
    assert cross_correlation([1, 0], [0, 1]).rho == 0
    with pytest.raises(DegenerateInputError):
        cross_correlation([0, 0], [1, 0])


def test_cross_correlation_bounded(rng):
    h = rng.standard_normal((10_000, 3)) + 1j * rng.standard_normal((10_000, 3))
    w = rng.standard_normal((10_000, 3)) + 1j * rng.standard_normal((10_000, 3))
    rho = np.array([cross_correlation(a, b).rho for a, b in zip(h, w)])
    assert np.max(np.abs(rho)) <= 1 + 1e-12


@given(complex_vectors(4), complex_vectors(4))
def test_cross_correlation_bounded_property(h, w):
    assert abs(cross_correlation(h, w).rho) <= 1 + 1e-12


def test_bpsk_examples():
    assert is_constructive(0.5, 1, 1, 2)
    assert not is_constructive(-0.5, 1, 1, 2)


def test_qpsk_axis_case():
    # rho pushes d_j = 1 further from the decision boundaries
    assert is_constructive(0.3, 1, 1, 4)
    # rotated by more than pi/4 away from d_j
    assert not is_constructive(0.3 * np.exp(1j * 1.0), 1, 1, 4)


@pytest.mark.parametrize("order", [2, 4])
def test_mutuality_exhaustive(order, rng):
    points = PskAlphabet(order).points
    r = np.sqrt(rng.uniform(size=10_000))
    rhos = r * np.exp(1j * rng.uniform(-np.pi, np.pi, size=10_000))
    bad = [(rho, a, b) for rho in rhos for a, b in itertools.product(points, points)
           if is_constructive(rho, a, b, order) != is_constructive(rho, b, a, order)]
    assert not bad


@given(unit_disc, st.integers(0, 3), st.integers(0, 3))
def test_mutuality_qpsk_property(rho, k, j):
    points = PskAlphabet(4).points
    assert is_constructive(rho, points[k], points[j], 4) == is_constructive(rho, points[j], points[k], 4)


@given(unit_disc, st.integers(0, 3), st.integers(0, 3), st.integers(0, 3))
def test_rotation_of_symbol_pair(rho, k, j, shift):
    # a common alphabet rotation of both symbols preserves the angular test
    # and, for QPSK, permutes the sign clauses among themselves
    points = PskAlphabet(4).points
    before = is_constructive(rho, points[k], points[j], 4)
    after = is_constructive(rho, points[(k + shift) % 4], points[(j + shift) % 4], 4)
    assert before == after


@pytest.mark.parametrize("order", [2, 4, 8, 16])
def test_detect_noiseless(order):
    alphabet = PskAlphabet(order)
    np.testing.assert_array_equal(detect(alphabet.points, alphabet), np.arange(order))
    np.testing.assert_array_equal(detect(alphabet.points * 1.3, alphabet), np.arange(order))


def test_detect_examples():
    qpsk = PskAlphabet(4)
    assert detect(1 + 0.1j, qpsk) == 0
    assert detect(-0.2 + 1j, qpsk) == 1
    # exactly on the boundary between 0 and 1
    assert detect(1 + 1j, qpsk) == 0
    assert detect(0, qpsk, return_ambiguous=True) == (0, True)
    assert detect(1j, qpsk, return_ambiguous=True) == (1, False)


def test_qpsk_ser_at_30db(rng):
    qpsk = PskAlphabet(4)
    n = 10_000
    idx = rng.integers(4, size=n)
    snr = 10 ** 3
    noise = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2 * snr)
    ser = np.mean(detect(qpsk.points[idx] + noise, qpsk) != idx)
    assert ser < 1e-3
    assert psk_symbol_error_rate(4, snr) < 1e-3
