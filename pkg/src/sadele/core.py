"""Domain types shared by the whole pipeline.

Everything here is immutable after construction, so instances can be shared
freely across worker threads.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence


class SadeleError(Exception):
    """Base class for all pipeline errors."""


class EmptyInputError(SadeleError):
    pass


class ParseError(SadeleError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class RangeError(SadeleError):
    pass


class DimensionMismatchError(ParseError):
    pass


class LabelError(ParseError):
    pass


class LengthMismatchError(SadeleError):
    pass


class UntaggedInputError(SadeleError):
    pass


class TaggerContractError(SadeleError):
    pass


class InvalidSubstitutionError(SadeleError):
    pass


class BackendUnavailableError(SadeleError):
    pass


class ConfigError(SadeleError):
    pass


class PosTag(enum.Enum):
    NOUN = "NOUN"
    VERB = "VERB"
    ADJ = "ADJ"
    ADV = "ADV"
    PRON = "PRON"
    NUM = "NUM"
    PUNCT = "PUNCT"
    OTHER = "OTHER"


class FeatureKind(enum.Enum):
    """Ranking features. MLM_PROB/FREQ/SIMILARITY rank high-to-low, LM_LOSS low-to-high."""

    MLM_PROB = "MLM_PROB"
    FREQ = "FREQ"
    SIMILARITY = "SIMILARITY"
    LM_LOSS = "LM_LOSS"


ALL_FEATURES = frozenset(FeatureKind)
BASELINE_FEATURES = frozenset({FeatureKind.MLM_PROB, FeatureKind.FREQ})

DEFAULT_ELIGIBLE_POS = frozenset({PosTag.NOUN, PosTag.VERB, PosTag.ADJ, PosTag.ADV})


@dataclass(frozen=True)
class Token:
    """One surface token with character offsets into its original sentence."""

    surface: str
    start: int
    end: int
    pos: Optional[PosTag] = None

    def __post_init__(self):
        if not (0 <= self.start < self.end):
            raise ValueError(f"bad token span ({self.start}, {self.end})")
        if self.surface == "":
            raise ValueError("empty token surface")


@dataclass(frozen=True)
class TaggedSentence:
    """A sentence plus its tokens; offsets make reconstruction lossless."""

    text: str
    tokens: tuple[Token, ...]

    def __post_init__(self):
        prev_end = 0
        for tok in self.tokens:
            if tok.start < prev_end or tok.end > len(self.text):
                raise ValueError("tokens overlap or exceed sentence bounds")
            if self.text[tok.start : tok.end] != tok.surface:
                raise ValueError(f"token surface {tok.surface!r} does not match its span")
            prev_end = tok.end

    def surfaces(self) -> list[str]:
        return [tok.surface for tok in self.tokens]

    def is_tagged(self) -> bool:
        return all(tok.pos is not None for tok in self.tokens)

    def with_tags(self, tags: Sequence[PosTag]) -> "TaggedSentence":
        if len(tags) != len(self.tokens):
            raise TaggerContractError(
                f"tagger returned {len(tags)} tags for {len(self.tokens)} tokens"
            )
        retagged = tuple(
            Token(t.surface, t.start, t.end, tag) for t, tag in zip(self.tokens, tags)
        )
        return TaggedSentence(self.text, retagged)


@dataclass(frozen=True)
class PipelineConfig:
    """Knobs of the simplification pipeline.

    The defaults are the full-feature configuration; disabling SIMILARITY and
    LM_LOSS yields the probability+frequency baseline. MLM_PROB and FREQ can
    not be disabled.
    """

    zipf_threshold: float = 4.0
    eligible_pos: frozenset[PosTag] = DEFAULT_ELIGIBLE_POS
    top_k: int = 10
    lm_window: int = 5
    subword_marker: str = "##"
    enabled_features: frozenset[FeatureKind] = ALL_FEATURES
    require_alphabetic: bool = True

    def __post_init__(self):
        if self.zipf_threshold <= 0:
            raise ConfigError("zipf_threshold must be > 0")
        if self.top_k < 0:
            raise ConfigError("top_k must be >= 0")
        if self.lm_window < 0:
            raise ConfigError("lm_window must be >= 0")
        if not BASELINE_FEATURES <= self.enabled_features:
            raise ConfigError("MLM_PROB and FREQ must stay enabled")


@dataclass(frozen=True)
class SubstituteCandidate:
    """A substitution candidate and its feature values.

    ``feature_ranks``/``fused_score`` are filled by rank fusion; candidates
    coming straight out of feature scoring carry ``None`` there.
    """

    surface: str
    mlm_log_prob: float
    zipf: float
    similarity: float
    lm_loss: float
    feature_ranks: Optional[Mapping[FeatureKind, float]] = None
    fused_score: Optional[float] = None


class DecisionReason(enum.Enum):
    ACCEPTED = "ACCEPTED"
    GATE_FREQ_FAIL = "GATE_FREQ_FAIL"
    GATE_LOSS_FAIL = "GATE_LOSS_FAIL"
    NO_CANDIDATES = "NO_CANDIDATES"
    # Degrade path: the MLM backend failed for this token and it was left as-is.
    BACKEND_ERROR = "BACKEND_ERROR"


@dataclass(frozen=True)
class GateInputs:
    """The four numbers the acceptance gate compares."""

    orig_zipf: float
    orig_loss: float
    cand_zipf: float
    cand_loss: float


@dataclass(frozen=True)
class Decision:
    """Outcome for one identified complex word."""

    token_index: int
    candidates: tuple[SubstituteCandidate, ...]
    chosen: Optional[SubstituteCandidate]
    reason: DecisionReason
    gate: Optional[GateInputs] = None
    error: Optional[str] = None

    def __post_init__(self):
        if (self.chosen is not None) != (self.reason is DecisionReason.ACCEPTED):
            raise ValueError("chosen must be present exactly when the decision is ACCEPTED")


@dataclass(frozen=True)
class SimplificationTrace:
    """Per-sentence record of everything the engine decided."""

    sentence: TaggedSentence
    decisions: tuple[Decision, ...] = ()
    error: Optional[str] = None
