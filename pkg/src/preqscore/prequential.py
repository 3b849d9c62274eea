"""Sequential model comparison by cumulative score differences.

Each observation is scored under the one-step predictive each model forms
from all earlier observations; the per-step differences (model B minus
model A, scores being losses) accumulate into D_n.  The model whose
predictions have performed best so far is selected by comparing D_n to a
cutoff, zero by default: D_n > cutoff favours A, D_n < cutoff favours B.

Nothing here requires the predictives to be proper.  Under the
gradient-based rule a model may emit improper predictives (flat-prior
models do, early on) and still be compared; under the log rule the same
model raises at the offending observation.

Cumulative sums use compensated (Kahan) summation: D_n drives decisions,
and plain running sums can drift enough to flip a sign near the cutoff.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EmptyTrace, PreqscoreError
from .models import PredictiveModel
from .scores import ScoreRule, as_rule, rescale_rule, score_predictive

__all__ = [
    "TIE",
    "DeltaTrace",
    "SelectionOutcome",
    "delta_trace",
    "select",
    "select_among",
    "rescale_rule",
    "compensated_cumsum",
    "write_trace_csv",
    "trace_csv_text",
    "TRACE_CSV_COLUMNS",
]

TIE = "tie"

TRACE_CSV_COLUMNS = ("index", "x", "score_a", "score_b", "delta", "cumulative")


def compensated_cumsum(values) -> np.ndarray:
    """Running sums with Neumaier compensation (matches fsum prefixes to ~1 ulp).

    Unlike plain Kahan summation this stays accurate when a term dwarfs the
    running total, the case a large score spike produces.
    """
    out = np.empty(len(values))
    total = 0.0
    c = 0.0
    for i, raw in enumerate(values):
        v = float(raw)
        t = total + v
        if abs(total) >= abs(v):
            c += (total - t) + v
        else:
            c += (v - t) + total
        total = t
        out[i] = total + c
    return out


@dataclass(frozen=True)
class DeltaTrace:
    """Per-step and cumulative score differences between two models.

    ``per_step[i] = S(x_i, B's predictive) - S(x_i, A's predictive)``, so
    positive entries mean A predicted better at that step.  ``cumulative``
    holds the compensated running sums D_1..D_n.
    """

    per_step: np.ndarray
    cumulative: np.ndarray
    rule_id: ScoreRule
    scale: float
    model_a: str
    model_b: str
    data: np.ndarray
    scores_a: np.ndarray
    scores_b: np.ndarray

    def __len__(self):
        return len(self.per_step)

    @property
    def final(self) -> float:
        """D_n at the last observation."""
        if len(self.per_step) == 0:
            raise EmptyTrace("trace has no observations")
        return float(self.cumulative[-1])


@dataclass(frozen=True)
class SelectionOutcome:
    """Result of thresholding D_n: the chosen model id, or TIE at equality."""

    chosen: str
    cutoff: float
    d_n: float


def delta_trace(
    model_a: PredictiveModel,
    model_b: PredictiveModel,
    data,
    rule,
) -> DeltaTrace:
    """Score every observation prequentially under both models.

    Scoring errors (e.g. a log score on an improper early predictive) are
    re-raised with the 1-based index of the offending observation attached.
    """
    r = as_rule(rule)
    x = np.asarray(data, dtype=float)
    if x.ndim != 1:
        raise ValueError(f"data must be one-dimensional, got shape {x.shape}")
    n = x.size
    sa = np.empty(n)
    sb = np.empty(n)
    for i in range(n):
        history = x[:i]
        for model, out in ((model_a, sa), (model_b, sb)):
            try:
                out[i] = score_predictive(float(x[i]), model.predictive_at(history), r).value
            except PreqscoreError as e:
                raise type(e)(f"{e} (model {model.identifier!r}, observation {i + 1})") from e
    per_step = sb - sa
    return DeltaTrace(
        per_step=per_step,
        cumulative=compensated_cumsum(per_step),
        rule_id=r.base,
        scale=r.scale,
        model_a=model_a.identifier,
        model_b=model_b.identifier,
        data=x,
        scores_a=sa,
        scores_b=sb,
    )


def select(trace: DeltaTrace, cutoff: float = 0.0) -> SelectionOutcome:
    """Choose between the trace's two models by comparing D_n to the cutoff."""
    d_n = trace.final  # raises EmptyTrace on an empty trace
    if d_n > cutoff:
        chosen = trace.model_a
    elif d_n < cutoff:
        chosen = trace.model_b
    else:
        chosen = TIE
    return SelectionOutcome(chosen=chosen, cutoff=cutoff, d_n=d_n)


def select_among(models: Sequence[PredictiveModel], data, rule) -> str:
    """Identifier of the model with the smallest cumulative score.

    Works for any finite number of models, not just two.  Exact ties go to
    the lowest list index, so duplicated models resolve deterministically.
    """
    if len(models) < 2:
        raise ValueError(f"need at least 2 models, got {len(models)}")
    r = as_rule(rule)
    x = np.asarray(data, dtype=float)
    totals = []
    for model in models:
        scores = np.empty(x.size)
        for i in range(x.size):
            try:
                scores[i] = score_predictive(float(x[i]), model.predictive_at(x[:i]), r).value
            except PreqscoreError as e:
                raise type(e)(f"{e} (model {model.identifier!r}, observation {i + 1})") from e
        totals.append(float(compensated_cumsum(scores)[-1]) if x.size else 0.0)
    best = min(range(len(models)), key=lambda m: (totals[m], m))
    return models[best].identifier


def _format(v: float) -> str:
    return repr(float(v))


def write_trace_csv(trace: DeltaTrace, fileobj) -> None:
    """Serialize a trace with the fixed column set, full float precision."""
    writer = csv.writer(fileobj, lineterminator="\n")
    writer.writerow(TRACE_CSV_COLUMNS)
    for i in range(len(trace)):
        writer.writerow(
            [
                i + 1,
                _format(trace.data[i]),
                _format(trace.scores_a[i]),
                _format(trace.scores_b[i]),
                _format(trace.per_step[i]),
                _format(trace.cumulative[i]),
            ]
        )


def trace_csv_text(trace: DeltaTrace) -> str:
    buf = io.StringIO()
    write_trace_csv(trace, buf)
    return buf.getvalue()
