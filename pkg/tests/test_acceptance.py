"""The ten acceptance criteria at full size.

Each test prints one ``[PASS]``/``[FAIL]`` line, and the terminal summary
repeats them under "acceptance criteria".
"""

import pytest

from cogci import checks

pytestmark = pytest.mark.acceptance


def _run(record_criterion, number, result):
    result.name = f"{number:>2}. {result.name}"
    record_criterion(result)
    assert result.passed, result.line()


def test_01_constraint_satisfaction(record_criterion):
    _run(record_criterion, 1, checks.constraint_satisfaction(n=1000, time_limit=10.0))


def test_02_matched_filter(record_criterion):
    _run(record_criterion, 2, checks.matched_filter(n=100))


def test_03_oracle_optimality(record_criterion):
    _run(record_criterion, 3, checks.oracle_optimality(n=50, samples=100_000))


def test_04_bound_ordering(record_criterion):
    _run(record_criterion, 4, checks.bound_ordering(n=1000, n_single=100))


def test_05_scheme_ordering(record_criterion):
    _run(record_criterion, 5, checks.scheme_ordering(n=1000, trials=2000))


def test_06_monotonicity(record_criterion):
    _run(record_criterion, 6, checks.monotonicity(n=1000))


def test_07_complementary_slackness(record_criterion):
    _run(record_criterion, 7, checks.complementary_slackness(n=1000))


def test_08_mutuality(record_criterion):
    _run(record_criterion, 8, checks.mutuality(order=4, draws=10_000))


def test_09_projector_algebra(record_criterion):
    _run(record_criterion, 9, checks.projector_algebra(n=10_000))


def test_10_determinism(record_criterion):
    _run(record_criterion, 10, checks.determinism(trials=2000, workers=(1, 8)))
