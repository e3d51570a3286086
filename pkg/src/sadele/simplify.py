"""The simplification engine: generate, score, fuse, gate, apply.

Candidates for each identified complex word come from the masked LM. Each
candidate gets four feature values, per-feature fractional ranks are averaged
into a fused score (lower is better), and only the fused-rank-1 candidate is
gate-tested: it replaces the word only when it is strictly more frequent than
the original and strictly lowers the masked-LM loss around (and at) the
substitution point. All decisions are made against the original sentence and
accepted replacements are applied simultaneously.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import Sequence, TextIO

from .core import (
    BackendUnavailableError,
    ConfigError,
    Decision,
    DecisionReason,
    FeatureKind,
    GateInputs,
    PipelineConfig,
    SadeleError,
    SimplificationTrace,
    SubstituteCandidate,
    TaggedSentence,
)
from .lexres import EmbeddingStore, FrequencyTable
from .mlm import MlmBackend
from .textproc import (
    PosTagger,
    apply_substitutions,
    casefold_tr,
    is_wordlike,
    tag_sentence,
    tokenize,
)
from .cwi import identify_complex

# Rank orientation: these features rank high values first; LM_LOSS ranks low first.
_HIGHER_IS_BETTER = frozenset(
    {FeatureKind.MLM_PROB, FeatureKind.FREQ, FeatureKind.SIMILARITY}
)


def generate_candidates(
    sent: TaggedSentence, idx: int, backend: MlmBackend, cfg: PipelineConfig
) -> list[tuple[str, float]]:
    """Raw MLM fillers for token ``idx``, minus subword pieces, non-words, and
    candidates that casefold to the original token."""
    original = casefold_tr(sent.tokens[idx].surface)
    raw = backend.predict_masked(sent.surfaces(), idx, cfg.top_k)
    kept = []
    for surface, log_prob in raw:
        if cfg.subword_marker and surface.startswith(cfg.subword_marker):
            continue
        if not is_wordlike(surface):
            continue
        if casefold_tr(surface) == original:
            continue
        kept.append((surface, log_prob))
    return kept


def loss_positions(n_tokens: int, idx: int, window: int) -> list[int]:
    """Context token indices within ``window`` of ``idx``, excluding ``idx``."""
    lo = max(0, idx - window)
    hi = min(n_tokens - 1, idx + window)
    return [i for i in range(lo, hi + 1) if i != idx]


def score_candidates(
    sent: TaggedSentence,
    idx: int,
    raw: Sequence[tuple[str, float]],
    table: FrequencyTable,
    store: EmbeddingStore,
    backend: MlmBackend,
    cfg: PipelineConfig,
) -> list[SubstituteCandidate]:
    """Attach the four feature values to each raw candidate.

    The language-model loss masks the window context around ``idx`` one token
    at a time with the candidate substituted in; a candidate without an
    embedding vector scores similarity 0.0 rather than being dropped.
    """
    surfaces = sent.surfaces()
    original = sent.tokens[idx].surface
    positions = loss_positions(len(surfaces), idx, cfg.lm_window)
    scored = []
    for surface, log_prob in raw:
        substituted = list(surfaces)
        substituted[idx] = surface
        similarity = store.cosine(original, surface)
        scored.append(
            SubstituteCandidate(
                surface=surface,
                mlm_log_prob=log_prob,
                zipf=table.zipf(surface),
                similarity=0.0 if similarity is None else similarity,
                lm_loss=backend.masked_token_loss(substituted, positions),
            )
        )
    return scored


def _feature_value(cand: SubstituteCandidate, kind: FeatureKind) -> float:
    if kind is FeatureKind.MLM_PROB:
        return cand.mlm_log_prob
    if kind is FeatureKind.FREQ:
        return cand.zipf
    if kind is FeatureKind.SIMILARITY:
        return cand.similarity
    return cand.lm_loss


def _fractional_ranks(values: Sequence[float], higher_is_better: bool) -> list[float]:
    """1-based ranks; tied values share the mean of their rank positions."""
    order = sorted(range(len(values)), key=lambda i: values[i], reverse=higher_is_better)
    ranks = [0.0] * len(values)
    pos = 0
    while pos < len(order):
        tie_end = pos
        while (
            tie_end + 1 < len(order)
            and values[order[tie_end + 1]] == values[order[pos]]
        ):
            tie_end += 1
        mean_rank = (pos + 1 + tie_end + 1) / 2
        for k in range(pos, tie_end + 1):
            ranks[order[k]] = mean_rank
        pos = tie_end + 1
    return ranks


def fuse_ranks(
    cands: Sequence[SubstituteCandidate], enabled: frozenset[FeatureKind]
) -> list[SubstituteCandidate]:
    """Order candidates by the mean of their per-feature fractional ranks.

    Fused-score ties break toward the higher MLM probability, then by
    casefolded surface, so the ordering is fully deterministic.
    """
    if not enabled:
        raise ConfigError("rank fusion needs at least one enabled feature")
    if not cands:
        return []
    per_feature: dict[FeatureKind, list[float]] = {}
    for kind in enabled:
        values = [_feature_value(c, kind) for c in cands]
        per_feature[kind] = _fractional_ranks(values, kind in _HIGHER_IS_BETTER)
    fused = []
    for i, cand in enumerate(cands):
        ranks = {kind: per_feature[kind][i] for kind in FeatureKind if kind in enabled}
        fused.append(
            replace(cand, feature_ranks=ranks, fused_score=sum(ranks.values()) / len(ranks))
        )
    fused.sort(key=lambda c: (c.fused_score, -c.mlm_log_prob, casefold_tr(c.surface)))
    return fused


def gate(g: GateInputs) -> DecisionReason:
    """ACCEPTED only on strictly higher frequency and strictly lower loss;
    the frequency check runs first, so it names the failure."""
    if not g.cand_zipf > g.orig_zipf:
        return DecisionReason.GATE_FREQ_FAIL
    if not g.cand_loss < g.orig_loss:
        return DecisionReason.GATE_LOSS_FAIL
    return DecisionReason.ACCEPTED


def simplify_sentence(
    text: str,
    tagger: PosTagger,
    table: FrequencyTable,
    store: EmbeddingStore,
    backend: MlmBackend,
    cfg: PipelineConfig,
    strict: bool = False,
) -> tuple[str, SimplificationTrace]:
    """Run the full pipeline on one sentence.

    Backend failures degrade: the affected token stays unchanged and the
    decision records the error, unless ``strict`` is set.
    """
    sent = tag_sentence(tokenize(text), tagger)
    decisions: list[Decision] = []
    for idx in identify_complex(sent, table, cfg):
        try:
            decisions.append(_decide(sent, idx, table, store, backend, cfg))
        except BackendUnavailableError as exc:
            if strict:
                raise
            decisions.append(
                Decision(idx, (), None, DecisionReason.BACKEND_ERROR, error=str(exc))
            )
    subs = [
        (d.token_index, d.chosen.surface)
        for d in decisions
        if d.reason is DecisionReason.ACCEPTED
    ]
    return apply_substitutions(sent, subs), SimplificationTrace(sent, tuple(decisions))


def _decide(
    sent: TaggedSentence,
    idx: int,
    table: FrequencyTable,
    store: EmbeddingStore,
    backend: MlmBackend,
    cfg: PipelineConfig,
) -> Decision:
    raw = generate_candidates(sent, idx, backend, cfg)
    if not raw:
        return Decision(idx, (), None, DecisionReason.NO_CANDIDATES)
    ranked = fuse_ranks(
        score_candidates(sent, idx, raw, table, store, backend, cfg),
        cfg.enabled_features,
    )
    top = ranked[0]

    # Gate losses cover the window plus the substitution point itself, so a
    # candidate must make itself and its surroundings more predictable than
    # the word it replaces.
    surfaces = sent.surfaces()
    gate_positions = loss_positions(len(surfaces), idx, cfg.lm_window) + [idx]
    substituted = list(surfaces)
    substituted[idx] = top.surface
    inputs = GateInputs(
        orig_zipf=table.zipf(sent.tokens[idx].surface),
        orig_loss=backend.masked_token_loss(surfaces, gate_positions),
        cand_zipf=top.zipf,
        cand_loss=backend.masked_token_loss(substituted, gate_positions),
    )
    verdict = gate(inputs)
    chosen = top if verdict is DecisionReason.ACCEPTED else None
    return Decision(idx, tuple(ranked), chosen, verdict, gate=inputs)


def simplify_corpus(
    lines: Sequence[str],
    tagger: PosTagger,
    table: FrequencyTable,
    store: EmbeddingStore,
    backend: MlmBackend,
    cfg: PipelineConfig,
    parallelism: int = 1,
    strict: bool = False,
) -> list[tuple[str, SimplificationTrace]]:
    """Simplify many lines; output order matches input order for any
    parallelism degree, and per-line failures degrade into the line's trace."""
    if parallelism < 1:
        raise ConfigError("parallelism must be >= 1")

    def work(line: str) -> tuple[str, SimplificationTrace]:
        try:
            return simplify_sentence(line, tagger, table, store, backend, cfg, strict)
        except SadeleError as exc:
            if strict:
                raise
            return line, SimplificationTrace(TaggedSentence(line, ()), (), error=str(exc))

    if parallelism == 1 or len(lines) <= 1:
        return [work(line) for line in lines]
    with ThreadPoolExecutor(max_workers=parallelism) as pool:
        return list(pool.map(work, lines))


def trace_to_record(trace: SimplificationTrace) -> dict:
    """The wire form of a trace: text, decisions, and an error only when one occurred."""
    record: dict = {
        "text": trace.sentence.text,
        "decisions": [_decision_to_record(d) for d in trace.decisions],
    }
    if trace.error is not None:
        record["error"] = trace.error
    return record


def _decision_to_record(decision: Decision) -> dict:
    record: dict = {
        "token_index": decision.token_index,
        "candidates": [_candidate_to_record(c) for c in decision.candidates],
        "reason": decision.reason.value,
    }
    if decision.error is not None:
        record["error"] = decision.error
    return record


def _candidate_to_record(cand: SubstituteCandidate) -> dict:
    return {
        "surface": cand.surface,
        "mlm_log_prob": cand.mlm_log_prob,
        "zipf": cand.zipf,
        "similarity": cand.similarity,
        "lm_loss": cand.lm_loss,
        "ranks": {k.value: v for k, v in (cand.feature_ranks or {}).items()},
        "fused_score": cand.fused_score,
    }


def write_trace_jsonl(traces: Sequence[SimplificationTrace], out: TextIO) -> None:
    for trace in traces:
        out.write(json.dumps(trace_to_record(trace), ensure_ascii=False))
        out.write("\n")
