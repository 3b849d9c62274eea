"""Scoring rule checks: closed forms vs derivative oracles, dispatch, propriety."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from preqscore import (
    DecisionProblem,
    DimensionMismatch,
    GaussianPredictive,
    HyvarinenInapplicable,
    ImproperPredictive,
    InvalidDistribution,
    NonPositiveScale,
    NonPositiveVariance,
    NonSPDCovariance,
    ScaledRule,
    ScoreRule,
    as_rule,
    check_propriety,
    gaussian_density,
    hyvarinen_score_gaussian,
    hyvarinen_score_generic,
    hyvarinen_score_mvn,
    laplace_density,
    log_score,
    rescale_rule,
    score_from_decision_problem,
    score_predictive,
    shift_density,
    student_t_density,
)
from preqscore.models import StudentTPredictive

from oracles import fd_first, fd_second, simplex_grid


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------


def test_log_score_at_mean_is_entropy_term():
    for v in [0.25, 1.0, 4.0]:
        s = log_score(0.0, GaussianPredictive(0.0, v))
        assert s.value == pytest.approx(0.5 * math.log(2.0 * math.pi * v), rel=1e-15)
        assert s.rule_id is ScoreRule.LOG


def test_hyvarinen_gaussian_at_mean():
    assert hyvarinen_score_gaussian(3.0, GaussianPredictive(3.0, 2.0)).value == -1.0


@pytest.mark.parametrize("x", [-1.7, 0.0, 2.4])
@pytest.mark.parametrize("mean,variance", [(0.0, 1.0), (1.5, 0.3), (-2.0, 5.0)])
def test_hyvarinen_gaussian_matches_generic_route(x, mean, variance):
    # Dual route: the closed normal formula against the derivative-based one.
    closed = hyvarinen_score_gaussian(x, GaussianPredictive(mean, variance)).value
    generic = hyvarinen_score_generic(x, gaussian_density(mean, variance)).value
    assert closed == pytest.approx(generic, rel=1e-14)


@pytest.mark.parametrize(
    "q",
    [gaussian_density(0.5, 2.0), student_t_density(0.0, 1.0, 3.0)],
    ids=["gaussian", "t3"],
)
@pytest.mark.parametrize("x", [-1.2, 0.4, 2.1])
def test_hyvarinen_generic_matches_finite_difference_oracle(q, x):
    fd = 2.0 * fd_second(q.logpdf, x) + fd_first(q.logpdf, x) ** 2
    assert hyvarinen_score_generic(x, q).value == pytest.approx(fd, rel=1e-4, abs=1e-5)


def test_hyvarinen_t3_at_center_closed_value():
    # For a t with dof 3, unit scale, the score at the center is 2*(-4/3) + 0.
    s = hyvarinen_score_generic(0.0, student_t_density(0.0, 1.0, 3.0))
    assert s.value == pytest.approx(-8.0 / 3.0, rel=1e-14)


def test_flat_predictive_scores():
    flat = GaussianPredictive.flat()
    assert hyvarinen_score_gaussian(12.3, flat).value == 0.0
    with pytest.raises(ImproperPredictive):
        log_score(12.3, flat)


def test_gaussian_predictive_validation():
    with pytest.raises(NonPositiveVariance):
        GaussianPredictive(0.0, 0.0)
    with pytest.raises(ValueError):
        GaussianPredictive(math.nan, 1.0)


@given(st.floats(min_value=-50, max_value=50, allow_nan=False))
def test_hyvarinen_ignores_normalization(c):
    # Multiplying the density by exp(c) changes nothing the rule looks at.
    base = student_t_density(0.3, 1.2, 4.0)
    assert (
        hyvarinen_score_generic(0.9, shift_density(base, c)).value
        == hyvarinen_score_generic(0.9, base).value
    )


def test_hyvarinen_rejects_non_smooth_density():
    with pytest.raises(HyvarinenInapplicable):
        hyvarinen_score_generic(0.5, laplace_density(0.0, 1.0))


# ---------------------------------------------------------------------------
# Multivariate normal
# ---------------------------------------------------------------------------


def test_mvn_reduces_to_univariate():
    uni = hyvarinen_score_gaussian(1.3, GaussianPredictive(0.4, 2.5)).value
    mvn = hyvarinen_score_mvn([1.3], [0.4], [[2.5]]).value
    assert mvn == pytest.approx(uni, rel=1e-14)


def test_mvn_diagonal_is_sum_of_marginals():
    x, m, v = [1.0, -0.5], [0.2, 0.1], [2.0, 0.5]
    total = sum(
        hyvarinen_score_gaussian(xi, GaussianPredictive(mi, vi)).value
        for xi, mi, vi in zip(x, m, v)
    )
    mvn = hyvarinen_score_mvn(x, m, np.diag(v)).value
    assert mvn == pytest.approx(total, rel=1e-13)


def test_mvn_correlated_case_against_manual_inverse():
    cov = np.array([[2.0, 0.6], [0.6, 1.0]])
    x = np.array([0.7, -0.4])
    m = np.array([0.1, 0.2])
    det = 2.0 * 1.0 - 0.6 * 0.6
    inv = np.array([[1.0, -0.6], [-0.6, 2.0]]) / det
    grad = inv @ (x - m)
    expected = -2.0 * (inv[0, 0] + inv[1, 1]) + float(grad @ grad)
    assert hyvarinen_score_mvn(x, m, cov).value == pytest.approx(expected, rel=1e-13)


def test_mvn_validation():
    with pytest.raises(DimensionMismatch):
        hyvarinen_score_mvn([1.0, 2.0], [0.0], np.eye(2))
    with pytest.raises(NonSPDCovariance, match="symmetric"):
        hyvarinen_score_mvn([0.0, 0.0], [0.0, 0.0], [[1.0, 0.5], [0.2, 1.0]])
    with pytest.raises(NonSPDCovariance, match="positive definite"):
        hyvarinen_score_mvn([0.0, 0.0], [0.0, 0.0], [[1.0, 2.0], [2.0, 1.0]])


# ---------------------------------------------------------------------------
# Rules, scaling, dispatch
# ---------------------------------------------------------------------------


def test_as_rule_coercions():
    assert as_rule("log") == ScaledRule(ScoreRule.LOG, 1.0)
    assert as_rule(ScoreRule.HYVARINEN).scale == 1.0
    r = ScaledRule(ScoreRule.LOG, 2.0)
    assert as_rule(r) is r
    with pytest.raises(TypeError):
        as_rule(42)


def test_rescale_rule_composes_multiplicatively():
    r = rescale_rule(rescale_rule(ScoreRule.HYVARINEN, 2.0), 3.0)
    assert r == ScaledRule(ScoreRule.HYVARINEN, 6.0)
    with pytest.raises(NonPositiveScale):
        rescale_rule(ScoreRule.LOG, 0.0)
    with pytest.raises(NonPositiveScale):
        ScaledRule(ScoreRule.LOG, -1.0)


def test_scaled_rule_scales_values_exactly():
    q = GaussianPredictive(0.0, 1.0)
    base = score_predictive(1.5, q, ScoreRule.HYVARINEN).value
    scaled = score_predictive(1.5, q, rescale_rule(ScoreRule.HYVARINEN, 2.0))
    assert scaled.value == 2.0 * base
    assert scaled.scale == 2.0


def test_score_predictive_dispatch():
    q = GaussianPredictive(0.0, 1.0)
    d = gaussian_density(0.0, 1.0)
    t = StudentTPredictive(0.0, 1.0, 3.0)
    x = 0.7
    assert score_predictive(x, q, "log").value == pytest.approx(log_score(x, q).value)
    assert score_predictive(x, d, "log").value == pytest.approx(-d.logpdf(x))
    # .density() objects are unwrapped before scoring
    assert score_predictive(x, t, "hyvarinen").value == pytest.approx(
        hyvarinen_score_generic(x, t.density()).value
    )
    with pytest.raises(TypeError):
        score_predictive(x, object(), "log")
    with pytest.raises(ValueError, match="decision-induced"):
        score_predictive(x, q, ScoreRule.DECISION_INDUCED)


def test_score_predictive_improper_density_raises_declared_error():
    from preqscore import InsufficientHistory
    from preqscore.models import flat_prior_scale_model

    improper = flat_prior_scale_model(0.0).predictive_at([])
    with pytest.raises(InsufficientHistory):
        score_predictive(1.0, improper, "log")
    # same object is fine under the gradient-based rule: 3/(x - mean)^2
    assert score_predictive(2.0, improper, "hyvarinen").value == pytest.approx(0.75, rel=1e-14)


# ---------------------------------------------------------------------------
# Decision problems and propriety
# ---------------------------------------------------------------------------


def brier_problem(n_states, step=0.1):
    """Quadratic loss against every grid distribution as the action set."""
    grid = simplex_grid(n_states, step)
    loss = np.array([[float(np.sum((a - _onehot(i, n_states)) ** 2)) for a in grid] for i in range(n_states)])
    return DecisionProblem(range(n_states), [tuple(a) for a in grid], loss), grid


def _onehot(i, n):
    e = np.zeros(n)
    e[i] = 1.0
    return e


def test_decision_problem_validation():
    with pytest.raises(DimensionMismatch):
        DecisionProblem([0, 1], ["a"], np.zeros((2, 2)))
    with pytest.raises(ValueError):
        DecisionProblem([0, 1], ["a", "b"], [[0.0, math.inf], [1.0, 0.0]])


def test_best_action_breaks_ties_by_lowest_index():
    dp = DecisionProblem([0, 1], ["a", "b"], [[1.0, 1.0], [1.0, 1.0]])
    assert dp.best_action_index([0.5, 0.5]) == 0


def test_distribution_validation():
    dp = DecisionProblem([0, 1], ["a", "b"], [[0.0, 1.0], [1.0, 0.0]])
    with pytest.raises(InvalidDistribution):
        dp.best_action_index([0.7, 0.7])
    with pytest.raises(InvalidDistribution):
        dp.best_action_index([-0.1, 1.1])
    with pytest.raises(InvalidDistribution):
        dp.best_action_index([1.0])
    with pytest.raises(InvalidDistribution):
        score_from_decision_problem(dp, [0.5, 0.5], "unknown-state")


def test_decision_induced_score_is_proper_on_grid():
    dp, grid = brier_problem(3)
    score = lambda x, q: score_from_decision_problem(dp, q, x).value
    report = check_propriety(score, grid, states=list(range(3)))
    assert report.is_proper
    assert report.n_distributions == len(grid)


def test_linear_score_is_improper_on_grid():
    # S(x, Q) = -Q(x) rewards overstating the mode, a textbook improper rule.
    grid = simplex_grid(2, 0.1)
    report = check_propriety(lambda x, q: -q[int(x)], grid)
    assert not report.is_proper
    v = report.violations[0]
    assert v.gap > 0
    assert v.expected_self > v.expected_other


def test_check_propriety_skips_zero_mass_states():
    # The log score is +inf where the quoted q has no mass; pairs are still
    # comparable because terms with P(x) = 0 are dropped.
    grid = simplex_grid(2, 0.5)  # includes the two degenerate corners

    def log_loss(x, q):
        p = q[int(x)]
        return -math.log(p) if p > 0 else math.inf

    report = check_propriety(log_loss, grid)
    assert report.is_proper


def test_check_propriety_dimension_guard():
    with pytest.raises(DimensionMismatch):
        check_propriety(lambda x, q: 0.0, simplex_grid(2, 0.5), states=[0, 1, 2])
