"""Seeded Monte Carlo experiments over the scoring and selection machinery.

Each experiment draws replicated datasets, runs the sequential comparison
under both the log rule and the gradient-based rule, and checks one
behavioural claim: sampling means of per-step score differences against
their closed forms, the constant-multiple linkage between the two rules for
equal-variance normal models, selection consistency as the sample grows,
locality of a single edited observation in the per-step sums, exact scale
behaviour under a change of measurement units, and (non-)invariance under a
smooth monotone reparametrisation of the data.

Reproducibility contract: every output is a pure function of the config.
Replicate r draws from the counter-based stream keyed by ``(base_seed, r)``,
so replicates may run in any order, or in parallel, without changing a bit
of output.  Aggregates are reduced with ``math.fsum`` over records sorted by
replicate index, making them independent of record order as well.

The iid-normal experiments score whole replicates with vectorized closed
forms; those expressions mirror the scalar ones in :mod:`preqscore.scores`
operation for operation so both routes agree bitwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from .densities import (
    DensityWithDerivatives,
    MonotoneTransform,
    cubic_plus_linear_transform,
    gaussian_density,
    pushforward_density,
)
from .errors import IndexOutOfRange, NonPositiveScale
from .models import PredictiveModel, iid_gaussian_model
from .prequential import TIE, DeltaTrace, delta_trace
from .scores import ScoreRule
from .stationary import Ar1MarkovModel
from .streams import stream

__all__ = [
    "Experiment",
    "ExperimentConfig",
    "ReplicationResult",
    "expected_log_delta",
    "expected_hyvarinen_delta",
    "run_variance_expectation",
    "run_mean_linkage",
    "run_consistency",
    "run_outlier_locality",
    "run_unit_change",
    "run_reparametrisation",
    "run_multi_model",
    "run_experiment",
    "replicate_data",
    "replicate_trace",
    "aggregates_for",
    "assertions_for",
    "LINKAGE_MEANS",
    "OUTLIER_AR_COEFFICIENTS",
    "MULTI_MODEL_FACTORS",
]

# Fixed scenario constants (documented knobs would multiply the config
# surface without exercising anything new).
LINKAGE_MEANS = (0.0, 1.0)
OUTLIER_AR_COEFFICIENTS = (0.5, 0.25)
MULTI_MODEL_FACTORS = (0.25, 0.5, 1.0, 2.0, 4.0)
_MULTI_TRUE_INDEX = MULTI_MODEL_FACTORS.index(1.0)

_RULE_KEYS = (ScoreRule.LOG.value, ScoreRule.HYVARINEN.value)


class Experiment(Enum):
    VARIANCE_EXPECTATION = "variance-expectation"
    MEAN_LINKAGE = "mean-linkage"
    CONSISTENCY = "consistency"
    OUTLIER_LOCALITY = "outlier-locality"
    UNIT_CHANGE = "unit-change"
    REPARAMETRISATION = "reparametrisation"
    MULTI_MODEL = "multi-model"


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one experiment run; equal configs give equal output.

    ``xi`` is the variance ratio between the data-generating model P and the
    alternative Q (``tau_p2 = xi * tau_q2``).  ``truth`` picks which of the
    two generates the data where that is a free choice.  ``outlier_magnitude``
    of None resolves to five marginal standard deviations of the data
    process.  ``n_grid`` of None resolves to (n//100, n//10, n).
    ``min_frequency`` of None resolves to the calibrated threshold for the
    experiment when the run is at least as large as the calibrated scale and
    to a bare-majority 0.5 otherwise.
    """

    experiment: Experiment
    n: int = 1000
    replicates: int = 100
    base_seed: int = 0
    xi: float = 2.0
    tau_q2: float = 1.0
    outlier_index: int = 50
    outlier_magnitude: float | None = None
    unit_scale: float = 10.0
    cutoff: float = 0.0
    truth: str = "P"
    outlier_models: str = "ar1"
    n_grid: tuple[int, ...] | None = None
    min_frequency: float | None = None

    def __post_init__(self):
        if not isinstance(self.experiment, Experiment):
            object.__setattr__(self, "experiment", Experiment(self.experiment))
        if not (isinstance(self.n, int) and self.n >= 1):
            raise ValueError(f"n must be an integer >= 1, got {self.n!r}")
        if not (isinstance(self.replicates, int) and self.replicates >= 1):
            raise ValueError(f"replicates must be an integer >= 1, got {self.replicates!r}")
        if not self.xi > 0:
            raise ValueError(f"xi must be > 0, got {self.xi}")
        if not self.tau_q2 > 0:
            raise ValueError(f"tau_q2 must be > 0, got {self.tau_q2}")
        if not self.unit_scale > 0:
            raise NonPositiveScale(f"unit scale must be > 0, got {self.unit_scale}")
        if not math.isfinite(self.cutoff):
            raise ValueError(f"cutoff must be finite, got {self.cutoff}")
        if self.truth not in ("P", "Q"):
            raise ValueError(f"truth must be 'P' or 'Q', got {self.truth!r}")
        if self.outlier_models not in ("ar1", "iid"):
            raise ValueError(f"outlier_models must be 'ar1' or 'iid', got {self.outlier_models!r}")
        if self.n_grid is not None:
            grid = tuple(int(g) for g in self.n_grid)
            if not grid or any(g < 1 or g > self.n for g in grid) or list(grid) != sorted(set(grid)):
                raise ValueError(f"n_grid must be strictly increasing integers in [1, n], got {self.n_grid!r}")
            object.__setattr__(self, "n_grid", grid)
        if self.min_frequency is not None and not 0.0 < self.min_frequency <= 1.0:
            raise ValueError(f"min_frequency must lie in (0, 1], got {self.min_frequency}")

    @property
    def tau_p2(self) -> float:
        return self.xi * self.tau_q2

    def resolved_n_grid(self) -> tuple[int, ...]:
        if self.n_grid is not None:
            return self.n_grid
        grid = sorted({max(1, self.n // 100), max(1, self.n // 10), self.n})
        return tuple(grid)

    def resolved_min_frequency(self) -> float:
        if self.min_frequency is not None:
            return self.min_frequency
        if self.experiment is Experiment.CONSISTENCY:
            return 0.99 if (self.n >= 5000 and self.replicates >= 500) else 0.5
        if self.experiment is Experiment.MULTI_MODEL:
            return 0.95 if (self.n >= 2000 and self.replicates >= 500) else 0.5
        return 0.5

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, Experiment):
                v = v.value
            elif isinstance(v, tuple):
                v = list(v)
            out[f.name] = v
        return out


@dataclass(frozen=True)
class ReplicationResult:
    """Per-replicate records plus order-independent aggregates and verdicts.

    ``records`` is one JSON-safe dict per replicate; ``aggregates`` is always
    recomputable from (config, records) via :func:`aggregates_for`, and every
    assertion is a pure function of (config, aggregates, records).
    """

    config: ExperimentConfig
    records: list[dict]
    aggregates: dict
    assertions: dict[str, bool]

    @property
    def passed(self) -> bool:
        return all(self.assertions.values())


def expected_log_delta(xi: float) -> float:
    """Mean per-step log-score difference (Q minus P) under P, equal means."""
    return 0.5 * (xi - 1.0 - math.log(xi))


def expected_hyvarinen_delta(xi: float, tau_q2: float) -> float:
    """Mean per-step gradient-score difference (Q minus P) under P, equal means."""
    return (xi + 1.0 / xi - 2.0) / tau_q2


# Vectorized Gaussian scores; operation order mirrors scores.log_score and
# scores.hyvarinen_score_gaussian exactly.
def _log_scores(x: np.ndarray, mean: float, variance: float) -> np.ndarray:
    return 0.5 * math.log(2.0 * math.pi * variance) + (x - mean) ** 2 / (2.0 * variance)


def _hyvarinen_scores(x: np.ndarray, mean: float, variance: float) -> np.ndarray:
    return -2.0 / variance + (x - mean) ** 2 / variance**2


_VECTOR_SCORERS: dict[str, Callable[[np.ndarray, float, float], np.ndarray]] = {
    ScoreRule.LOG.value: _log_scores,
    ScoreRule.HYVARINEN.value: _hyvarinen_scores,
}


def _choice(d_n: float, cutoff: float, id_a: str, id_b: str) -> str:
    if d_n > cutoff:
        return id_a
    if d_n < cutoff:
        return id_b
    return TIE


def _sorted_records(records: Sequence[dict]) -> list[dict]:
    return sorted(records, key=lambda rec: rec["replicate"])


def _fsum_key(records: Sequence[dict], key: str) -> float:
    return math.fsum(rec[key] for rec in _sorted_records(records))


def _max_key(records: Sequence[dict], key: str) -> float:
    return max(rec[key] for rec in records)


def _min_key(records: Sequence[dict], key: str) -> float:
    return min(rec[key] for rec in records)


def _selection_frequency(records: Sequence[dict], key: str, target: str) -> float:
    """Fraction of replicates choosing ``target``; an exact tie counts half."""
    hits = math.fsum(
        1.0 if rec[key] == target else (0.5 if rec[key] == TIE else 0.0)
        for rec in _sorted_records(records)
    )
    return hits / len(records)


def _pooled_mean_se(records: Sequence[dict], sum_key: str, sumsq_key: str) -> tuple[float, float, int]:
    """Pooled per-step mean and its standard error from per-replicate sums."""
    n_total = sum(rec["n"] for rec in records)
    mean = _fsum_key(records, sum_key) / n_total
    sumsq = _fsum_key(records, sumsq_key)
    var = (sumsq - n_total * mean * mean) / max(1, n_total - 1)
    return mean, math.sqrt(max(0.0, var) / n_total), n_total


def _require(config: ExperimentConfig, experiment: Experiment) -> None:
    if config.experiment is not experiment:
        raise ValueError(f"config is for {config.experiment.value!r}, runner expects {experiment.value!r}")


# --- scenario construction (shared by runners and trace export) ------------


def _variance_pair(config: ExperimentConfig, scale: float = 1.0) -> tuple[PredictiveModel, PredictiveModel]:
    c2 = scale * scale
    return (
        iid_gaussian_model(0.0, config.tau_p2 * c2),
        iid_gaussian_model(0.0, config.tau_q2 * c2),
    )


def _linkage_pair(config: ExperimentConfig) -> tuple[PredictiveModel, PredictiveModel]:
    mean_a, mean_b = LINKAGE_MEANS
    return (
        iid_gaussian_model(mean_a, config.tau_q2),
        iid_gaussian_model(mean_b, config.tau_q2),
    )


def _outlier_pair(config: ExperimentConfig) -> tuple[PredictiveModel, PredictiveModel]:
    if config.outlier_models == "ar1":
        phi_a, phi_b = OUTLIER_AR_COEFFICIENTS
        return (
            Ar1MarkovModel(phi_a, config.tau_q2),
            Ar1MarkovModel(phi_b, config.tau_q2),
        )
    return _variance_pair(config)


def _multi_model_candidates(config: ExperimentConfig) -> list[PredictiveModel]:
    return [iid_gaussian_model(0.0, config.tau_q2 * f) for f in MULTI_MODEL_FACTORS]


def _outlier_marginal_variance(config: ExperimentConfig) -> float:
    if config.outlier_models == "ar1":
        phi_a = OUTLIER_AR_COEFFICIENTS[0]
        return config.tau_q2 / (1.0 - phi_a * phi_a)
    return config.tau_p2


def _resolved_outlier_magnitude(config: ExperimentConfig) -> float:
    if config.outlier_magnitude is not None:
        return float(config.outlier_magnitude)
    return 5.0 * math.sqrt(_outlier_marginal_variance(config))


def replicate_data(config: ExperimentConfig, r: int) -> np.ndarray:
    """Replicate r's dataset, before any outlier injection or unit change."""
    rng = stream(config.base_seed, r)
    n = config.n
    e = config.experiment
    if e in (Experiment.VARIANCE_EXPECTATION, Experiment.UNIT_CHANGE, Experiment.REPARAMETRISATION):
        return rng.normal(0.0, math.sqrt(config.tau_p2), n)
    if e is Experiment.CONSISTENCY:
        v = config.tau_p2 if config.truth == "P" else config.tau_q2
        return rng.normal(0.0, math.sqrt(v), n)
    if e is Experiment.MEAN_LINKAGE:
        return rng.normal(LINKAGE_MEANS[0], math.sqrt(config.tau_q2), n)
    if e is Experiment.MULTI_MODEL:
        return rng.normal(0.0, math.sqrt(config.tau_q2), n)
    if e is Experiment.OUTLIER_LOCALITY:
        if config.outlier_models == "iid":
            return rng.normal(0.0, math.sqrt(config.tau_p2), n)
        phi = OUTLIER_AR_COEFFICIENTS[0]
        s = math.sqrt(config.tau_q2)
        z = rng.standard_normal(n)
        x = np.empty(n)
        x[0] = math.sqrt(_outlier_marginal_variance(config)) * z[0]
        for i in range(1, n):
            x[i] = phi * x[i - 1] + s * z[i]
        return x
    raise ValueError(f"no data recipe for {e}")


def _inject_outlier(config: ExperimentConfig, x: np.ndarray) -> tuple[np.ndarray, float]:
    k = config.outlier_index
    if not (isinstance(k, int) and 1 <= k < x.size):
        raise IndexOutOfRange(f"outlier index must satisfy 1 <= k < n={x.size}, got {k!r}")
    mag = _resolved_outlier_magnitude(config)
    y = x.copy()
    y[k - 1] += mag
    return y, mag


# --- runners ----------------------------------------------------------------


def run_variance_expectation(config: ExperimentConfig) -> ReplicationResult:
    """Check per-step mean score differences against their closed forms."""
    _require(config, Experiment.VARIANCE_EXPECTATION)
    model_a, model_b = _variance_pair(config)
    records = []
    for r in range(config.replicates):
        x = replicate_data(config, r)
        rec = {"replicate": r, "seed": config.base_seed, "n": config.n}
        for rule, scorer in _VECTOR_SCORERS.items():
            delta = scorer(x, 0.0, config.tau_q2) - scorer(x, 0.0, config.tau_p2)
            d_n = math.fsum(delta)
            rec[f"d_n_{rule}"] = d_n
            rec[f"sum_sq_delta_{rule}"] = float(np.dot(delta, delta))
            rec[f"chosen_{rule}"] = _choice(d_n, config.cutoff, model_a.identifier, model_b.identifier)
        records.append(rec)
    return _finish(config, records)


def run_mean_linkage(config: ExperimentConfig) -> ReplicationResult:
    """Check the exact constant-multiple tie between the two rules.

    With equal variances and different means, each per-step gradient-score
    difference equals (2 / variance) times the log-score difference; the two
    rules therefore order the models identically at cutoff 0.
    """
    _require(config, Experiment.MEAN_LINKAGE)
    model_a, model_b = _linkage_pair(config)
    mean_a, mean_b = LINKAGE_MEANS
    v = config.tau_q2
    ratio = 2.0 / v
    records = []
    for r in range(config.replicates):
        x = replicate_data(config, r)
        rec = {"replicate": r, "seed": config.base_seed, "n": config.n}
        d_log = _log_scores(x, mean_b, v) - _log_scores(x, mean_a, v)
        d_hyv = _hyvarinen_scores(x, mean_b, v) - _hyvarinen_scores(x, mean_a, v)
        rec["max_linkage_gap"] = float(np.max(np.abs(d_hyv - ratio * d_log)))
        for rule, delta in ((ScoreRule.LOG.value, d_log), (ScoreRule.HYVARINEN.value, d_hyv)):
            d_n = math.fsum(delta)
            rec[f"d_n_{rule}"] = d_n
            rec[f"chosen_{rule}"] = _choice(d_n, config.cutoff, model_a.identifier, model_b.identifier)
        rec["selections_agree"] = rec["chosen_log"] == rec["chosen_hyvarinen"]
        records.append(rec)
    return _finish(config, records)


def run_consistency(config: ExperimentConfig) -> ReplicationResult:
    """Track how often the true model wins as the sample size grows."""
    _require(config, Experiment.CONSISTENCY)
    model_a, model_b = _variance_pair(config)
    grid = config.resolved_n_grid()
    records = []
    for r in range(config.replicates):
        x = replicate_data(config, r)
        rec = {"replicate": r, "seed": config.base_seed, "n": config.n}
        for rule, scorer in _VECTOR_SCORERS.items():
            delta = scorer(x, 0.0, config.tau_q2) - scorer(x, 0.0, config.tau_p2)
            for g in grid:
                d_g = math.fsum(delta[:g])
                rec[f"d_n_{rule}_{g}"] = d_g
                rec[f"chosen_{rule}_{g}"] = _choice(d_g, config.cutoff, model_a.identifier, model_b.identifier)
            rec[f"d_n_{rule}"] = rec[f"d_n_{rule}_{grid[-1]}"]
            rec[f"chosen_{rule}"] = rec[f"chosen_{rule}_{grid[-1]}"]
        records.append(rec)
    return _finish(config, records)


def run_outlier_locality(config: ExperimentConfig) -> ReplicationResult:
    """Locate which per-step terms a single edited observation can touch.

    One-step predictives that depend on the past only through the previous
    value confine the edit at position k to per-step terms k and k+1; models
    that ignore history confine it to term k alone.
    """
    _require(config, Experiment.OUTLIER_LOCALITY)
    model_a, model_b = _outlier_pair(config)
    records = []
    for r in range(config.replicates):
        x = replicate_data(config, r)
        y, mag = _inject_outlier(config, x)
        rec = {"replicate": r, "seed": config.base_seed, "n": config.n, "outlier_magnitude": mag}
        for rule in _RULE_KEYS:
            base = delta_trace(model_a, model_b, x, rule)
            bumped = delta_trace(model_a, model_b, y, rule)
            changed = np.flatnonzero(bumped.per_step != base.per_step) + 1
            rec[f"changed_{rule}"] = [int(i) for i in changed]
            rec[f"abs_shift_{rule}"] = abs(bumped.final - base.final)
            rec[f"d_n_{rule}"] = bumped.final
            rec[f"chosen_{rule}"] = _choice(bumped.final, config.cutoff, model_a.identifier, model_b.identifier)
        records.append(rec)
    return _finish(config, records)


def run_unit_change(config: ExperimentConfig) -> ReplicationResult:
    """Re-express the data in different units and compare scores and choices.

    Multiplying observations by c (means by c, variances by c^2) divides
    every gradient-rule score by c^2 and leaves log-score differences alone,
    so selections cannot move.
    """
    _require(config, Experiment.UNIT_CHANGE)
    c = config.unit_scale
    c2 = c * c
    model_a, model_b = _variance_pair(config)
    scaled_a, scaled_b = _variance_pair(config, scale=c)
    records = []
    for r in range(config.replicates):
        x = replicate_data(config, r)
        xc = x * c
        rec = {"replicate": r, "seed": config.base_seed, "n": config.n}
        hyv_gap = 0.0
        for v in (config.tau_p2, config.tau_q2):
            base = _hyvarinen_scores(x, 0.0, v)
            scaled = _hyvarinen_scores(xc, 0.0, v * c2)
            hyv_gap = max(hyv_gap, float(np.max(np.abs(scaled * c2 - base) / (1.0 + np.abs(base)))))
        rec["hyvarinen_scale_gap"] = hyv_gap
        dl_base = _log_scores(x, 0.0, config.tau_q2) - _log_scores(x, 0.0, config.tau_p2)
        dl_scaled = _log_scores(xc, 0.0, config.tau_q2 * c2) - _log_scores(xc, 0.0, config.tau_p2 * c2)
        rec["log_delta_gap"] = float(np.max(np.abs(dl_scaled - dl_base) / (1.0 + np.abs(dl_base))))
        agree = True
        for rule, scorer in _VECTOR_SCORERS.items():
            delta = scorer(x, 0.0, config.tau_q2) - scorer(x, 0.0, config.tau_p2)
            delta_c = scorer(xc, 0.0, config.tau_q2 * c2) - scorer(xc, 0.0, config.tau_p2 * c2)
            d_n = math.fsum(delta)
            d_n_c = math.fsum(delta_c)
            chosen = _choice(d_n, config.cutoff, model_a.identifier, model_b.identifier)
            chosen_c = _choice(d_n_c, config.cutoff, scaled_a.identifier, scaled_b.identifier)
            rec[f"d_n_{rule}"] = d_n
            rec[f"d_n_scaled_{rule}"] = d_n_c
            rec[f"chosen_{rule}"] = chosen
            agree = agree and _same_slot(chosen, chosen_c, (model_a, model_b), (scaled_a, scaled_b))
        rec["selections_identical"] = agree
        records.append(rec)
    return _finish(config, records)


def _same_slot(chosen, chosen_scaled, pair, scaled_pair) -> bool:
    """True when both selections point at the same position in the pair."""
    if chosen == TIE or chosen_scaled == TIE:
        return chosen == chosen_scaled
    return [m.identifier for m in pair].index(chosen) == [m.identifier for m in scaled_pair].index(chosen_scaled)


def run_reparametrisation(config: ExperimentConfig, transform: MonotoneTransform | None = None) -> ReplicationResult:
    """Score the same comparison on the raw and on a transformed data scale.

    Log-score per-step differences are unchanged (the Jacobian term cancels
    between models); gradient-rule differences are not, except for affine
    transforms, which reduce to a unit change.
    """
    _require(config, Experiment.REPARAMETRISATION)
    t = transform if transform is not None else cubic_plus_linear_transform()
    model_a, model_b = _variance_pair(config)
    dens_x = (gaussian_density(0.0, config.tau_p2), gaussian_density(0.0, config.tau_q2))
    dens_y = tuple(pushforward_density(d, t) for d in dens_x)
    records = []
    for r in range(config.replicates):
        x = replicate_data(config, r)
        t.require_increasing_on(x)
        y = np.array([t.g(float(v)) for v in x])
        rec = {"replicate": r, "seed": config.base_seed, "n": config.n, "transform": t.name}
        for rule in _RULE_KEYS:
            delta_x = _VECTOR_SCORERS[rule](x, 0.0, config.tau_q2) - _VECTOR_SCORERS[rule](x, 0.0, config.tau_p2)
            delta_y = _density_deltas(y, dens_y[0], dens_y[1], rule)
            gap = np.abs(delta_y - delta_x)
            if rule == ScoreRule.LOG.value:
                rec["log_delta_gap"] = float(np.max(gap))
            else:
                rec["hyvarinen_divergence"] = float(np.max(gap / (1.0 + np.abs(delta_x))))
            for scale_tag, delta in (("x", delta_x), ("y", delta_y)):
                d_n = math.fsum(delta)
                rec[f"d_n_{rule}_{scale_tag}"] = d_n
                rec[f"chosen_{rule}_{scale_tag}"] = _choice(d_n, config.cutoff, model_a.identifier, model_b.identifier)
            rec[f"d_n_{rule}"] = rec[f"d_n_{rule}_x"]
            rec[f"chosen_{rule}"] = rec[f"chosen_{rule}_x"]
        records.append(rec)
    return _finish(config, records)


def _density_deltas(y: np.ndarray, dens_a: DensityWithDerivatives, dens_b: DensityWithDerivatives, rule: str) -> np.ndarray:
    out = np.empty(y.size)
    if rule == ScoreRule.LOG.value:
        for i, v in enumerate(y):
            out[i] = -dens_b.logpdf(float(v)) - (-dens_a.logpdf(float(v)))
        return out
    for i, v in enumerate(y):
        fv = float(v)
        sb = 2.0 * dens_b.d2logpdf(fv) + dens_b.dlogpdf(fv) ** 2
        sa = 2.0 * dens_a.d2logpdf(fv) + dens_a.dlogpdf(fv) ** 2
        out[i] = sb - sa
    return out


def run_multi_model(config: ExperimentConfig) -> ReplicationResult:
    """Pick among several candidate variances by total sequential score."""
    _require(config, Experiment.MULTI_MODEL)
    candidates = _multi_model_candidates(config)
    ids = [m.identifier for m in candidates]
    variances = [config.tau_q2 * f for f in MULTI_MODEL_FACTORS]
    records = []
    for r in range(config.replicates):
        x = replicate_data(config, r)
        rec = {"replicate": r, "seed": config.base_seed, "n": config.n}
        for rule, scorer in _VECTOR_SCORERS.items():
            totals = [math.fsum(scorer(x, 0.0, v)) for v in variances]
            best = min(range(len(ids)), key=lambda m: (totals[m], m))
            rec[f"totals_{rule}"] = totals
            rec[f"chosen_{rule}"] = ids[best]
        records.append(rec)
    return _finish(config, records)


# --- aggregation and assertions ---------------------------------------------


def _finish(config: ExperimentConfig, records: list[dict]) -> ReplicationResult:
    aggregates = aggregates_for(config, records)
    return ReplicationResult(config, records, aggregates, assertions_for(config, aggregates, records))


def aggregates_for(config: ExperimentConfig, records: Sequence[dict]) -> dict:
    """Order-independent summary; records may be passed in any order."""
    e = config.experiment
    agg: dict = {"replicates": len(records)}
    if e is Experiment.VARIANCE_EXPECTATION:
        model_a, model_b = _variance_pair(config)
        agg["theory_log"] = expected_log_delta(config.xi)
        agg["theory_hyvarinen"] = expected_hyvarinen_delta(config.xi, config.tau_q2)
        for rule in _RULE_KEYS:
            mean, se, n_total = _pooled_mean_se(records, f"d_n_{rule}", f"sum_sq_delta_{rule}")
            agg[f"mean_delta_{rule}"] = mean
            agg[f"se_{rule}"] = se
            agg[f"selection_frequency_{rule}"] = _selection_frequency(records, f"chosen_{rule}", model_a.identifier)
        agg["n_total"] = sum(rec["n"] for rec in records)
    elif e is Experiment.MEAN_LINKAGE:
        agg["ratio"] = 2.0 / config.tau_q2
        agg["max_linkage_gap"] = _max_key(records, "max_linkage_gap")
        agg["selections_agree_frequency"] = _selection_frequency(records, "selections_agree", True)
    elif e is Experiment.CONSISTENCY:
        model_a, model_b = _variance_pair(config)
        true_id = model_a.identifier if config.truth == "P" else model_b.identifier
        grid = config.resolved_n_grid()
        agg["n_grid"] = list(grid)
        agg["true_model"] = true_id
        agg["threshold"] = config.resolved_min_frequency()
        freq: dict = {}
        for rule in _RULE_KEYS:
            freq[rule] = {str(g): _selection_frequency(records, f"chosen_{rule}_{g}", true_id) for g in grid}
        agg["frequency"] = freq
    elif e is Experiment.OUTLIER_LOCALITY:
        mag = _resolved_outlier_magnitude(config)
        k = config.outlier_index
        if mag == 0.0:
            expected: list[int] = []
        elif config.outlier_models == "ar1":
            expected = [k, k + 1]
        else:
            expected = [k]
        agg["outlier_magnitude"] = mag
        agg["expected_changed"] = expected
        for rule in _RULE_KEYS:
            agg[f"all_match_{rule}"] = all(rec[f"changed_{rule}"] == expected for rec in records)
            agg[f"mean_abs_shift_{rule}"] = _fsum_key(records, f"abs_shift_{rule}") / len(records)
    elif e is Experiment.UNIT_CHANGE:
        agg["unit_scale"] = config.unit_scale
        agg["max_hyvarinen_scale_gap"] = _max_key(records, "hyvarinen_scale_gap")
        agg["max_log_delta_gap"] = _max_key(records, "log_delta_gap")
        agg["selections_identical_frequency"] = _selection_frequency(records, "selections_identical", True)
    elif e is Experiment.REPARAMETRISATION:
        agg["transform"] = records[0]["transform"] if records else "cubic-plus-linear"
        agg["max_log_delta_gap"] = _max_key(records, "log_delta_gap")
        agg["min_hyvarinen_divergence"] = _min_key(records, "hyvarinen_divergence")
    elif e is Experiment.MULTI_MODEL:
        ids = [m.identifier for m in _multi_model_candidates(config)]
        agg["candidates"] = ids
        agg["true_model"] = ids[_MULTI_TRUE_INDEX]
        agg["threshold"] = config.resolved_min_frequency()
        for rule in _RULE_KEYS:
            agg[f"true_model_frequency_{rule}"] = _selection_frequency(records, f"chosen_{rule}", ids[_MULTI_TRUE_INDEX])
    else:
        raise ValueError(f"no aggregator for {e}")
    return agg


def assertions_for(config: ExperimentConfig, aggregates: dict, records: Sequence[dict]) -> dict:
    """One named boolean per claim the experiment is responsible for."""
    e = config.experiment
    if e is Experiment.VARIANCE_EXPECTATION:
        return {
            f"{rule}_mean_within_3se": abs(aggregates[f"mean_delta_{rule}"] - aggregates[f"theory_{rule}"])
            <= 3.0 * aggregates[f"se_{rule}"]
            for rule in _RULE_KEYS
        }
    if e is Experiment.MEAN_LINKAGE:
        return {
            "linkage_identity": aggregates["max_linkage_gap"] <= 1e-12,
            "selections_agree": aggregates["selections_agree_frequency"] == 1.0,
        }
    if e is Experiment.CONSISTENCY:
        out = {}
        grid = aggregates["n_grid"]
        thr = aggregates["threshold"]
        n_rec = max(1, len(records))
        for rule in _RULE_KEYS:
            freq = [aggregates["frequency"][rule][str(g)] for g in grid]
            out[f"min_frequency_{rule}"] = freq[-1] >= thr
            ok = True
            for f0, f1 in zip(freq, freq[1:]):
                slack = 2.0 * math.sqrt((f0 * (1.0 - f0) + f1 * (1.0 - f1)) / n_rec)
                ok = ok and (f1 >= f0 - slack)
            out[f"nondecreasing_{rule}"] = ok
        return out
    if e is Experiment.OUTLIER_LOCALITY:
        return {f"changed_summands_{rule}": bool(aggregates[f"all_match_{rule}"]) for rule in _RULE_KEYS}
    if e is Experiment.UNIT_CHANGE:
        return {
            "hyvarinen_scaling": aggregates["max_hyvarinen_scale_gap"] <= 1e-12,
            "log_deltas_unchanged": aggregates["max_log_delta_gap"] <= 1e-12,
            "selections_identical": aggregates["selections_identical_frequency"] == 1.0,
        }
    if e is Experiment.REPARAMETRISATION:
        return {
            "log_deltas_invariant": aggregates["max_log_delta_gap"] <= 1e-10,
            "hyvarinen_deltas_differ": aggregates["min_hyvarinen_divergence"] > 1e-6,
        }
    if e is Experiment.MULTI_MODEL:
        thr = aggregates["threshold"]
        return {
            f"true_model_frequency_{rule}": aggregates[f"true_model_frequency_{rule}"] >= thr
            for rule in _RULE_KEYS
        }
    raise ValueError(f"no assertions for {e}")


_RUNNERS: dict[Experiment, Callable[[ExperimentConfig], ReplicationResult]] = {
    Experiment.VARIANCE_EXPECTATION: run_variance_expectation,
    Experiment.MEAN_LINKAGE: run_mean_linkage,
    Experiment.CONSISTENCY: run_consistency,
    Experiment.OUTLIER_LOCALITY: run_outlier_locality,
    Experiment.UNIT_CHANGE: run_unit_change,
    Experiment.REPARAMETRISATION: run_reparametrisation,
    Experiment.MULTI_MODEL: run_multi_model,
}


def run_experiment(config: ExperimentConfig) -> ReplicationResult:
    """Dispatch to the runner named by the config."""
    return _RUNNERS[config.experiment](config)


def replicate_trace(config: ExperimentConfig, r: int = 0, rule=ScoreRule.HYVARINEN) -> DeltaTrace:
    """Full sequential trace of one replicate, for export and inspection.

    The model pair and dataset are the canonical ones for the experiment:
    the contaminated series for the outlier experiment, the raw (x-scale,
    base-unit) series elsewhere, and for the multi-candidate experiment the
    true model against the widest alternative.
    """
    e = config.experiment
    x = replicate_data(config, r)
    if e is Experiment.OUTLIER_LOCALITY:
        model_a, model_b = _outlier_pair(config)
        x, _ = _inject_outlier(config, x)
    elif e is Experiment.MEAN_LINKAGE:
        model_a, model_b = _linkage_pair(config)
    elif e is Experiment.MULTI_MODEL:
        candidates = _multi_model_candidates(config)
        model_a, model_b = candidates[_MULTI_TRUE_INDEX], candidates[-1]
    else:
        model_a, model_b = _variance_pair(config)
    return delta_trace(model_a, model_b, x, rule)
