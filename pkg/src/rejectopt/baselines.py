"""Published comparison models: the ROC-convex-hull expected-cost minimizer
with its reject-activation condition, and the bounded-abstention model.

Both are solved by exhaustive search over candidate thresholds (midpoints
between consecutive distinct scores plus below-min/above-max sentinels),
which reaches every achievable confusion matrix on a finite tuning set and
is exact at desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import ScoredDataset
from .metrics import (
    ClassPriors,
    CostMatrix,
    ThresholdPair,
    classify_with_rejection,
    essential_metrics,
    expected_cost,
)


@dataclass(frozen=True)
class RocPoint:
    """One operating point: among-all rates at a single score cut."""

    fpr: float
    tpr: float
    threshold: float


@dataclass(frozen=True)
class ActivationCheck:
    activated: bool
    degenerate_denominator: bool


@dataclass(frozen=True)
class TortorellaResult:
    thresholds: ThresholdPair
    cost: float  # expected cost on the tuning set
    activated: bool
    degenerate_denominator: bool
    rpr: float  # tuning-set per-class reject rates, exposed for cap transfer
    rnr: float


@dataclass(frozen=True)
class BaResult:
    thresholds: ThresholdPair
    objective: float  # misclassification cost per classified example
    rej: float  # tuning-set overall reject rate
    rpr: float
    rnr: float


def candidate_thresholds(data: ScoredDataset) -> np.ndarray:
    """Ascending candidate cuts: midpoints of distinct scores plus sentinels."""
    s = np.unique(data.scores)
    mids = (s[:-1] + s[1:]) / 2.0
    return np.concatenate(([s[0] - 1.0], mids, [s[-1] + 1.0]))


def roc_points(valid: ScoredDataset) -> list[RocPoint]:
    """All achievable single-threshold operating points, fpr ascending.

    A cut classifies positive iff score > cut, so descending cuts trace
    the curve from (0,0) (above-max sentinel) to (1,1) (below-min).
    """
    valid.require_both_classes()
    cands = candidate_thresholds(valid)
    pos = valid.pos_scores_sorted
    neg = valid.neg_scores_sorted
    points = []
    for c in cands[::-1]:
        tpr = (pos.size - int(np.searchsorted(pos, c, side="right"))) / pos.size
        fpr = (neg.size - int(np.searchsorted(neg, c, side="right"))) / neg.size
        points.append(RocPoint(fpr=fpr, tpr=tpr, threshold=float(c)))
    return points


def _cross(o: RocPoint, a: RocPoint, b: RocPoint) -> float:
    return (a.fpr - o.fpr) * (b.tpr - o.tpr) - (a.tpr - o.tpr) * (b.fpr - o.fpr)


def rocch(points: list[RocPoint]) -> list[RocPoint]:
    """Upper convex hull in ROC space; collinear interior points dropped."""
    pts = sorted(points, key=lambda p: (p.fpr, p.tpr))
    hull: list[RocPoint] = []
    for p in pts:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], p) >= 0.0:
            hull.pop()
        hull.append(p)
    return hull


def check_reject_activation(costs: CostMatrix) -> ActivationCheck:
    """Cost-structure condition under which a rejection band can pay off.

    A zero denominator (CFN = CRP or CTP = CRP) is reported as
    not-activated with the diagnostic flag set instead of guessing a sign
    convention.
    """
    d1 = costs.cfn - costs.crp
    d2 = costs.ctp - costs.crp
    if d1 == 0.0 or d2 == 0.0:
        return ActivationCheck(activated=False, degenerate_denominator=True)
    lhs = (costs.ctn - costs.crn) / d1
    rhs = (costs.cfp - costs.crn) / d2
    return ActivationCheck(activated=lhs > rhs, degenerate_denominator=False)


def reject_activation(costs: CostMatrix) -> bool:
    return check_reject_activation(costs).activated


def _pair_cost(
    valid: ScoredDataset, t: ThresholdPair, costs: CostMatrix, priors: ClassPriors
) -> tuple[float, float]:
    m = essential_metrics(classify_with_rejection(valid, t))
    return expected_cost(m, priors, costs), m.rej


def tortorella_optimize(
    valid: ScoredDataset, costs: CostMatrix, priors: ClassPriors
) -> TortorellaResult:
    """Expected-cost minimizer over hull-vertex thresholds.

    Not activated: best single hull threshold, returned as t1 = t2.
    Activated: exhaustive search over ordered hull-vertex pairs (t1 <= t2)
    minimizing the expected cost on the tuning set; on a finite set this
    attains the same optimum as the published tangent construction. Ties
    break by smaller reject rate, then band width, then (t1, t2).
    """
    valid.require_both_classes()
    hull = rocch(roc_points(valid))
    thresholds = sorted({p.threshold for p in hull})
    check = check_reject_activation(costs)

    best_key: tuple | None = None
    best: tuple[ThresholdPair, float, float] | None = None  # pair, cost, rej
    if not check.activated:
        for t in thresholds:
            pair = ThresholdPair(t, t)
            cost, rej = _pair_cost(valid, pair, costs, priors)
            key = (cost, t)
            if best_key is None or key < best_key:
                best_key, best = key, (pair, cost, rej)
    else:
        for i, t1 in enumerate(thresholds):
            for t2 in thresholds[i:]:
                pair = ThresholdPair(t1, t2)
                cost, rej = _pair_cost(valid, pair, costs, priors)
                key = (cost, rej, t2 - t1, t1, t2)
                if best_key is None or key < best_key:
                    best_key, best = key, (pair, cost, rej)
    assert best is not None
    pair, cost, _ = best
    m = essential_metrics(classify_with_rejection(valid, pair))
    return TortorellaResult(
        thresholds=pair,
        cost=cost,
        activated=check.activated,
        degenerate_denominator=check.degenerate_denominator,
        rpr=m.rpr,
        rnr=m.rnr,
    )


def ba_optimize(
    valid: ScoredDataset, k_max: float, cfn: float = 1.0, cfp: float = 1.0
) -> BaResult:
    """Bounded abstention: minimize misclassification cost per classified
    example subject to overall reject rate <= k_max.

    Exhaustive over ordered candidate pairs; t1 = t2 pairs reject nothing,
    so a feasible pair always exists. Ties break by smaller reject rate,
    then band width, then (t1, t2).
    """
    valid.require_both_classes()
    if not 0.0 < k_max < 1.0:
        raise ValueError(f"k_max must lie in (0,1), got {k_max}")
    cands = candidate_thresholds(valid)
    pos = valid.pos_scores_sorted
    neg = valid.neg_scores_sorted
    n_pos, n_neg = pos.size, neg.size
    total = n_pos + n_neg

    pos_le = np.searchsorted(pos, cands, side="right")  # fn at t1 / tp complement at t2
    neg_le = np.searchsorted(neg, cands, side="right")

    fn = pos_le[:, None].astype(np.float64)
    tn = neg_le[:, None].astype(np.float64)
    tp = (n_pos - pos_le)[None, :].astype(np.float64)
    fp = (n_neg - neg_le)[None, :].astype(np.float64)
    classified = fn + tn + tp + fp
    rejected = total - classified
    rej = rejected / total

    k = cands.size
    ordered = np.triu(np.ones((k, k), dtype=bool))  # i <= j, i.e. t1 <= t2
    feasible = ordered & (rej <= k_max) & (classified >= 1)
    with np.errstate(invalid="ignore", divide="ignore"):
        objective = np.where(classified >= 1, (cfn * fn + cfp * fp) / classified, np.inf)
    objective = np.where(feasible, objective, np.inf)

    best_obj = objective.min()
    ii, jj = np.nonzero(objective == best_obj)
    best_key: tuple | None = None
    best_ij: tuple[int, int] | None = None
    for i, j in zip(ii.tolist(), jj.tolist()):
        key = (rej[i, j], cands[j] - cands[i], cands[i], cands[j])
        if best_key is None or key < best_key:
            best_key, best_ij = key, (i, j)
    assert best_ij is not None
    i, j = best_ij
    pair = ThresholdPair(float(cands[i]), float(cands[j]))
    m = essential_metrics(classify_with_rejection(valid, pair))
    return BaResult(
        thresholds=pair,
        objective=float(best_obj),
        rej=m.rej,
        rpr=m.rpr,
        rnr=m.rnr,
    )
