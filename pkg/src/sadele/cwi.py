"""Complex word identification and its scoring.

The shipped identifier is the frequency+POS rule: a token is complex when its
POS is eligible and its Zipf frequency falls strictly below the threshold.
Learned labelers plug in through :class:`CwiLabeler`; a replay stub backed by
an annotated dataset stands in for trained models.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, Sequence

from .core import (
    EmptyInputError,
    LengthMismatchError,
    PipelineConfig,
    TaggedSentence,
    UntaggedInputError,
)
from .lexres import FrequencyTable
from .textproc import is_wordlike


class CwiLabeler(Protocol):
    def label(self, sent: TaggedSentence) -> list[int]:
        """One 0/1 complexity label per token."""
        ...


@dataclass(frozen=True)
class CwiReport:
    precision: float
    recall: float
    f1: float
    support: int


def identify_complex(
    sent: TaggedSentence, table: FrequencyTable, cfg: PipelineConfig
) -> list[int]:
    """Indices of complex tokens, ascending.

    A token qualifies when its POS is eligible, it looks like a word (unless
    that guard is disabled), and its casefolded surface scores below
    ``cfg.zipf_threshold``. Unseen words score 0.0, so they always qualify
    once POS-eligible.
    """
    if not sent.is_tagged():
        raise UntaggedInputError("sentence must be POS-tagged before identification")
    indices = []
    for i, tok in enumerate(sent.tokens):
        if tok.pos not in cfg.eligible_pos:
            continue
        if cfg.require_alphabetic and not is_wordlike(tok.surface):
            continue
        if table.zipf(tok.surface) < cfg.zipf_threshold:
            indices.append(i)
    return indices


@dataclass(frozen=True)
class FrequencyLabeler:
    """The frequency+POS rule packaged as a labeler."""

    table: FrequencyTable
    cfg: PipelineConfig

    def label(self, sent: TaggedSentence) -> list[int]:
        complex_indices = set(identify_complex(sent, self.table, self.cfg))
        return [1 if i in complex_indices else 0 for i in range(len(sent.tokens))]


@dataclass(frozen=True)
class ReplayLabeler:
    """Replays gold labels by sentence surfaces; unknown sentences get all zeros.

    Stand-in for trained sequence labelers whose weights are not distributed.
    """

    by_surfaces: dict[tuple[str, ...], tuple[int, ...]]

    def label(self, sent: TaggedSentence) -> list[int]:
        labels = self.by_surfaces.get(tuple(sent.surfaces()))
        if labels is None:
            return [0] * len(sent.tokens)
        return list(labels)


def score_labels(pred: Sequence[int], gold: Sequence[int]) -> CwiReport:
    """Precision/recall/F1 for the complex class, with the 0/0 -> 0 convention."""
    if len(pred) != len(gold):
        raise LengthMismatchError(f"{len(pred)} predictions vs {len(gold)} gold labels")
    tp = sum(1 for p, g in zip(pred, gold) if p == 1 and g == 1)
    fp = sum(1 for p, g in zip(pred, gold) if p == 1 and g == 0)
    fn = sum(1 for p, g in zip(pred, gold) if p == 0 and g == 1)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return CwiReport(precision, recall, f1, support=tp + fn)


def overlap(a: Sequence[int], b: Sequence[int]) -> float:
    """Fraction of positions where two label sequences agree."""
    if len(a) != len(b):
        raise LengthMismatchError(f"{len(a)} vs {len(b)} labels")
    if not a:
        raise EmptyInputError("overlap of empty label sequences is undefined")
    return sum(1 for x, y in zip(a, b) if x == y) / len(a)
