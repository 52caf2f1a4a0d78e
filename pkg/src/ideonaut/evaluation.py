"""Accept rule, de-duplication, and the four creativity metrics.

Everything in this module is a pure function over score cards and
(text, embedding) pairs; nothing here talks to a backend.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import MetricsError, TaskMismatch
from .latent import Embedding

SCORE_MIN = 1
SCORE_MAX = 5

# Two ideas with embedding cosine at or above this are treated as the same
# idea even when their texts differ.  The value is a default, not a finding;
# callers that want a stricter or looser notion of "unique" pass their own.
COSINE_DUPLICATE_THRESHOLD = 0.98

DEFAULT_ORIGINALITY_THRESHOLD = 4


def _check_score(name: str, value: object) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise MetricsError(f"{name} must be an integer, got {value!r}")
    if not SCORE_MIN <= value <= SCORE_MAX:
        raise MetricsError(f"{name} out of range: {value}")
    return value


@dataclass(frozen=True)
class ScoreCard:
    """One judge verdict for one idea."""

    originality: int
    relevant: bool
    elaboration: int
    category: str

    def __post_init__(self) -> None:
        _check_score("originality", self.originality)
        _check_score("elaboration", self.elaboration)
        if not isinstance(self.relevant, bool):
            raise MetricsError(f"relevant must be a boolean, got {self.relevant!r}")
        if not isinstance(self.category, str):
            raise MetricsError(f"category must be a string, got {self.category!r}")

    def to_dict(self) -> dict:
        return {
            "originality": self.originality,
            "relevant": self.relevant,
            "elaboration": self.elaboration,
            "category": self.category,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "ScoreCard":
        try:
            return cls(
                originality=payload["originality"],
                relevant=payload["relevant"],
                elaboration=payload["elaboration"],
                category=payload["category"],
            )
        except KeyError as exc:
            raise MetricsError(f"missing key: {exc.args[0]}") from None


@dataclass(frozen=True)
class MetricReport:
    """Aggregate creativity metrics for one evaluated response set.

    Means and standard deviations cover every evaluated response;
    fluency and flexibility are computed on the unique relevant subset.
    Standard deviations are population (divide by N), stated here so the
    numbers are reproducible.
    """

    originality_mean: float
    originality_std: float
    elaboration_mean: float
    elaboration_std: float
    fluency: int
    flexibility: int
    evaluated: int

    def __post_init__(self) -> None:
        if self.evaluated < 0 or self.fluency < 0 or self.flexibility < 0:
            raise MetricsError("counts must be non-negative")
        if self.fluency > self.evaluated:
            raise MetricsError(
                f"fluency {self.fluency} exceeds evaluated count {self.evaluated}"
            )
        if self.flexibility > self.fluency:
            raise MetricsError(
                f"flexibility {self.flexibility} exceeds fluency {self.fluency}"
            )

    def to_dict(self) -> dict:
        return {
            "originality_mean": self.originality_mean,
            "originality_std": self.originality_std,
            "elaboration_mean": self.elaboration_mean,
            "elaboration_std": self.elaboration_std,
            "fluency": self.fluency,
            "flexibility": self.flexibility,
            "evaluated": self.evaluated,
        }


def accept(card: ScoreCard, threshold: int = DEFAULT_ORIGINALITY_THRESHOLD) -> bool:
    """An idea survives the filter iff it is relevant and original enough."""
    return card.relevant and card.originality >= threshold


def normalize_text(text: str) -> str:
    """Case-fold, trim, and collapse internal whitespace."""
    return " ".join(text.casefold().split())


def _cosine_or_none(a: Embedding, b: Embedding) -> float | None:
    na, nb = a.norm(), b.norm()
    if na == 0.0 or nb == 0.0:
        return None
    value = float(np.dot(a.values, b.values) / (na * nb))
    return max(-1.0, min(1.0, value))


def dedup_unique(
    ideas: Sequence[tuple[str, Embedding]],
    cosine_threshold: float = COSINE_DUPLICATE_THRESHOLD,
) -> list[int]:
    """Indices of the ideas that survive de-duplication, in input order.

    Two ideas are duplicates when their normalized texts match exactly or
    their embedding cosine similarity reaches `cosine_threshold`.  Each
    incoming idea is compared against the already-kept set, so the first
    occurrence of a duplicate group is the one that survives.  Zero-norm
    embeddings never match by cosine (the text rule still applies).
    """
    kept: list[int] = []
    kept_norms: list[str] = []
    for i, (text, emb) in enumerate(ideas):
        norm = normalize_text(text)
        duplicate = False
        for j, prior_norm in zip(kept, kept_norms):
            if norm == prior_norm:
                duplicate = True
                break
            cos = _cosine_or_none(ideas[j][1], emb)
            if cos is not None and cos >= cosine_threshold:
                duplicate = True
                break
        if not duplicate:
            kept.append(i)
            kept_norms.append(norm)
    return kept


def compute_metrics(
    cards: Sequence[ScoreCard], kept_unique_relevant: Sequence[int]
) -> MetricReport:
    """Fold judged cards into a MetricReport.

    Args:
        cards: every evaluated response's card, one per response.
        kept_unique_relevant: indices into `cards` of the responses that
            survived de-duplication.  Irrelevant survivors are tolerated
            here and simply do not count toward fluency.

    Raises:
        MetricsError: on an empty card list or an out-of-range index.
    """
    if not cards:
        raise MetricsError("no evaluated responses, metrics undefined")
    for idx in kept_unique_relevant:
        if not 0 <= idx < len(cards):
            raise MetricsError(f"index {idx} outside the card list")

    originality = np.array([c.originality for c in cards], dtype=np.float64)
    elaboration = np.array([c.elaboration for c in cards], dtype=np.float64)
    unique_relevant = [i for i in kept_unique_relevant if cards[i].relevant]
    categories = {cards[i].category for i in unique_relevant}

    return MetricReport(
        originality_mean=float(np.mean(originality)),
        originality_std=float(np.std(originality)),
        elaboration_mean=float(np.mean(elaboration)),
        elaboration_std=float(np.std(elaboration)),
        fluency=len(unique_relevant),
        flexibility=len(categories),
        evaluated=len(cards),
    )


def merge_with_baseline(baseline: Sequence, ours_accepted: Sequence) -> list:
    """Extend a baseline idea set with our accepted ideas, baseline first.

    Accepts any records exposing `text`, `embedding`, and optionally
    `task_id`.  Duplicates are resolved by `dedup_unique`, so a baseline
    copy always wins over an accepted duplicate of it.
    """
    task_ids = {
        tid
        for record in list(baseline) + list(ours_accepted)
        if (tid := getattr(record, "task_id", None)) is not None
    }
    if len(task_ids) > 1:
        raise TaskMismatch(f"records from different tasks: {sorted(task_ids)}")

    combined = list(baseline) + list(ours_accepted)
    kept = dedup_unique([(r.text, r.embedding) for r in combined])
    return [combined[i] for i in kept]
