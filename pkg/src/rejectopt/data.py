"""Scored-dataset ingestion, stratified splitting, and synthetic generation.

A scored dataset is the output of any external scoring classifier: one
positive-class confidence score per example plus the binary ground-truth
label. Scores are consumed as-is; no scorer is trained here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple

import numpy as np

POSITIVE = 1
NEGATIVE = -1

_CSV_HEADER = "id,label,score"


class ScoresCsvError(ValueError):
    """Raised when a scores CSV file violates the expected format."""


class ScoredExample(NamedTuple):
    score: float
    label: int  # POSITIVE (+1) or NEGATIVE (-1)


class ScoredDataset:
    """Labeled examples, each carrying a positive-class confidence score.

    Backed by parallel numpy arrays (``scores`` float64, ``labels`` +1/-1
    int64) in original row order. Per-class sorted score views are cached
    because threshold evaluation reduces to binary searches on them.
    """

    def __init__(self, scores: Iterable[float], labels: Iterable[int]):
        self.scores = np.asarray(scores, dtype=np.float64)
        self.labels = np.asarray(labels, dtype=np.int64)
        if self.scores.ndim != 1 or self.scores.shape != self.labels.shape:
            raise ValueError("scores and labels must be 1-d arrays of equal length")
        if not np.all(np.isfinite(self.scores)):
            raise ValueError("scores must be finite")
        if not np.all((self.labels == POSITIVE) | (self.labels == NEGATIVE)):
            raise ValueError("labels must be +1 or -1")
        self.n_pos = int(np.sum(self.labels == POSITIVE))
        self.n_neg = int(np.sum(self.labels == NEGATIVE))

    @classmethod
    def from_examples(cls, examples: Iterable[ScoredExample]) -> "ScoredDataset":
        examples = list(examples)
        return cls([e.score for e in examples], [e.label for e in examples])

    def __len__(self) -> int:
        return self.scores.shape[0]

    @property
    def examples(self) -> list[ScoredExample]:
        return [ScoredExample(float(s), int(l)) for s, l in zip(self.scores, self.labels)]

    @cached_property
    def pos_scores_sorted(self) -> np.ndarray:
        return np.sort(self.scores[self.labels == POSITIVE])

    @cached_property
    def neg_scores_sorted(self) -> np.ndarray:
        return np.sort(self.scores[self.labels == NEGATIVE])

    def score_range(self) -> tuple[float, float]:
        if len(self) == 0:
            raise ValueError("empty dataset has no score range")
        return float(self.scores.min()), float(self.scores.max())

    def require_both_classes(self) -> None:
        if self.n_pos < 1 or self.n_neg < 1:
            raise ValueError(
                f"dataset must contain both classes (n_pos={self.n_pos}, n_neg={self.n_neg})"
            )


@dataclass(frozen=True)
class SplitSpec:
    """Train/validation/test fractions plus the shuffle seed."""

    train_frac: float
    valid_frac: float
    test_frac: float
    seed: int

    def __post_init__(self) -> None:
        for name in ("train_frac", "valid_frac", "test_frac"):
            f = getattr(self, name)
            if not 0.0 < f < 1.0:
                raise ValueError(f"{name} must be in (0,1), got {f}")
        if abs(self.train_frac + self.valid_frac + self.test_frac - 1.0) > 1e-9:
            raise ValueError("split fractions must sum to 1")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


def load_scored_csv(path) -> ScoredDataset:
    """Read a scores CSV (header ``id,label,score``; label +1/-1) into a dataset.

    Row order is preserved. Malformed rows are reported by data-row number
    (the header line is not counted).
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        text = fh.read()
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0] != _CSV_HEADER:
        raise ScoresCsvError(f"expected header '{_CSV_HEADER}' in {path}")
    scores: list[float] = []
    labels: list[int] = []
    for rownum, line in enumerate(lines[1:], start=1):
        fields = line.split(",")
        if len(fields) != 3:
            raise ScoresCsvError(f"malformed row at line {rownum}: expected 3 fields")
        _, label_s, score_s = fields
        if label_s == "+1":
            labels.append(POSITIVE)
        elif label_s == "-1":
            labels.append(NEGATIVE)
        else:
            raise ScoresCsvError(f"malformed row at line {rownum}: label must be +1 or -1")
        try:
            score = float(score_s)
        except ValueError:
            raise ScoresCsvError(
                f"malformed row at line {rownum}: score is not a decimal literal"
            ) from None
        if not math.isfinite(score):
            raise ScoresCsvError(f"malformed row at line {rownum}: score is not finite")
        scores.append(score)
    return ScoredDataset(scores, labels)


def write_scored_csv(data: ScoredDataset, path) -> None:
    """Write the canonical scores CSV: sequential 1-based ids, LF endings.

    Round-trips byte-for-byte with :func:`load_scored_csv` for files it
    produced (scores serialized via ``repr``).
    """
    lines = [_CSV_HEADER]
    for i, ex in enumerate(data.examples, start=1):
        label_s = "+1" if ex.label == POSITIVE else "-1"
        lines.append(f"{i},{label_s},{ex.score!r}")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def _allocate(n: int, fracs: tuple[float, float, float]) -> list[int]:
    # Largest-remainder rounding; remainder ties go to the earlier split.
    raw = [n * f for f in fracs]
    counts = [int(math.floor(r)) for r in raw]
    order = sorted(range(3), key=lambda i: (-(raw[i] - counts[i]), i))
    for i in range(n - sum(counts)):
        counts[order[i]] += 1
    return counts


def stratified_split(
    data: ScoredDataset, spec: SplitSpec
) -> tuple[ScoredDataset, ScoredDataset, ScoredDataset]:
    """Split into train/valid/test preserving class proportions per split.

    Deterministic for a fixed seed; the three splits are disjoint and
    exhaustive. Raises if either class cannot place at least one example
    into every split.
    """
    data.require_both_classes()
    if data.n_pos < 3 or data.n_neg < 3:
        raise ValueError("each class needs at least 3 examples to populate every split")
    fracs = (spec.train_frac, spec.valid_frac, spec.test_frac)
    rng = np.random.default_rng(spec.seed)
    split_idx: list[list[int]] = [[], [], []]
    # Positive indices are shuffled first, then negative; documented draw order.
    for label in (POSITIVE, NEGATIVE):
        idx = np.flatnonzero(data.labels == label)
        counts = _allocate(idx.size, fracs)
        if min(counts) < 1:
            raise ValueError(
                f"class {label:+d} too small to populate every split "
                f"(allocation {counts} from {idx.size} examples)"
            )
        perm = rng.permutation(idx)
        start = 0
        for k, c in enumerate(counts):
            split_idx[k].extend(perm[start : start + c].tolist())
            start += c
    out = []
    for idx_list in split_idx:
        idx_arr = np.sort(np.asarray(idx_list, dtype=np.int64))  # keep original row order
        out.append(ScoredDataset(data.scores[idx_arr], data.labels[idx_arr]))
    return out[0], out[1], out[2]


def synth_two_gaussian(
    n_pos: int,
    n_neg: int,
    mu_pos: float,
    mu_neg: float,
    sigma: float,
    seed: int,
) -> ScoredDataset:
    """Generate scores from two equal-variance Gaussians, one per class.

    Positives are drawn first (Normal(mu_pos, sigma)), then negatives;
    deterministic per seed. A desk-scale stand-in for a real scorer.
    """
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if n_pos < 1 or n_neg < 1:
        raise ValueError("class counts must be at least 1")
    rng = np.random.default_rng(seed)
    pos = rng.normal(mu_pos, sigma, n_pos)
    neg = rng.normal(mu_neg, sigma, n_neg)
    scores = np.concatenate([pos, neg])
    labels = np.concatenate(
        [np.full(n_pos, POSITIVE, dtype=np.int64), np.full(n_neg, NEGATIVE, dtype=np.int64)]
    )
    return ScoredDataset(scores, labels)
