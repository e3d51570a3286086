"""Corpus BLEU and SARI with pinned edge-case conventions, plus the ablation report.

Published SARI implementations disagree on empty-multiset edge cases, so this
one pins them: a component whose candidate and reference multisets are both
empty scores 1, exactly one empty scores 0, and n-gram orders where source,
hypothesis, and reference all have no n-grams drop out of the average. BLEU
is corpus-level with pooled modified precisions and no smoothing. Both
metrics compare tokens after Turkish casefolding.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, replace as dc_replace
from typing import Sequence

from .core import (
    BASELINE_FEATURES,
    EmptyInputError,
    FeatureKind,
    LengthMismatchError,
    PipelineConfig,
)
from .lexres import EmbeddingStore, FrequencyTable, ParallelCorpus
from .mlm import MlmBackend
from .simplify import simplify_corpus
from .textproc import PosTagger, casefold_tr, tokenize

Tokens = Sequence[str]

ABLATION_LABELS = ("BERT (Prob + Freq)", "+ Similarity", "+ LM")


@dataclass(frozen=True)
class EvalReport:
    bleu: float
    sari: float
    rows: tuple[tuple[str, float, float], ...] = ()


def _casefold(tokens: Tokens) -> list[str]:
    return [casefold_tr(t) for t in tokens]


def _ngram_counts(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu_corpus(hyps: Sequence[Tokens], refs: Sequence[Tokens]) -> float:
    """Corpus BLEU in [0, 100]: pooled modified 1..4-gram precisions, geometric
    mean, brevity penalty, no smoothing (any empty pooled precision gives 0)."""
    if len(hyps) != len(refs):
        raise LengthMismatchError(f"{len(hyps)} hypotheses vs {len(refs)} references")
    if not hyps:
        raise EmptyInputError("empty corpus")

    matched = [0] * 4
    total = [0] * 4
    hyp_len = 0
    ref_len = 0
    for hyp, ref in zip(hyps, refs):
        h = _casefold(hyp)
        r = _casefold(ref)
        hyp_len += len(h)
        ref_len += len(r)
        for n in range(1, 5):
            h_counts = _ngram_counts(h, n)
            r_counts = _ngram_counts(r, n)
            matched[n - 1] += sum((h_counts & r_counts).values())
            total[n - 1] += sum(h_counts.values())

    if any(m == 0 for m in matched) or hyp_len == 0:
        return 0.0
    log_precision = sum(math.log(m / t) for m, t in zip(matched, total)) / 4
    brevity = 1.0 if hyp_len > ref_len else math.exp(1 - ref_len / hyp_len)
    return 100.0 * brevity * math.exp(log_precision)


def _component(cand: Counter, ref: Counter) -> tuple[float, float]:
    """(precision, recall) of a multiset component under the pinned conventions."""
    if not cand and not ref:
        return 1.0, 1.0
    if not cand or not ref:
        return 0.0, 0.0
    m = sum((cand & ref).values())
    return m / sum(cand.values()), m / sum(ref.values())


def _f1(p: float, r: float) -> float:
    return 0.0 if p + r == 0 else 2 * p * r / (p + r)


def sari_sentence(source: Tokens, hyp: Tokens, ref: Tokens) -> float:
    """SARI in [0, 100] for one sentence against a single reference."""
    if not source or not ref:
        raise EmptyInputError("SARI needs a non-empty source and reference")
    s_toks = _casefold(source)
    h_toks = _casefold(hyp)
    r_toks = _casefold(ref)

    per_order = []
    for n in range(1, 5):
        s = _ngram_counts(s_toks, n)
        h = _ngram_counts(h_toks, n)
        r = _ngram_counts(r_toks, n)
        if not s and not h and not r:
            continue
        keep_f1 = _f1(*_component(s & h, s & r))
        add_f1 = _f1(*_component(h - s, r - s))
        del_precision = _component(s - h, s - r)[0]
        per_order.append((keep_f1 + add_f1 + del_precision) / 3)
    return 100.0 * sum(per_order) / len(per_order)


def sari_corpus(
    sources: Sequence[Tokens], hyps: Sequence[Tokens], refs: Sequence[Tokens]
) -> float:
    """Macro-average of per-sentence SARI."""
    if not (len(sources) == len(hyps) == len(refs)):
        raise LengthMismatchError(
            f"{len(sources)} sources, {len(hyps)} hypotheses, {len(refs)} references"
        )
    if not sources:
        raise EmptyInputError("empty corpus")
    return sum(sari_sentence(s, h, r) for s, h, r in zip(sources, hyps, refs)) / len(
        sources
    )


def _surface_tokens(text: str) -> list[str]:
    return tokenize(text).surfaces()


def score_pairs(
    corpus: ParallelCorpus, system_outputs: Sequence[str]
) -> tuple[float, float]:
    """(BLEU, SARI) of system output lines against a parallel corpus."""
    if len(system_outputs) != len(corpus.pairs):
        raise LengthMismatchError(
            f"{len(system_outputs)} outputs vs {len(corpus.pairs)} pairs"
        )
    sources = [_surface_tokens(c) for c, _ in corpus.pairs]
    refs = [_surface_tokens(s) for _, s in corpus.pairs]
    hyps = [_surface_tokens(h) for h in system_outputs]
    return bleu_corpus(hyps, refs), sari_corpus(sources, hyps, refs)


def ablation_report(
    corpus: ParallelCorpus,
    tagger: PosTagger,
    table: FrequencyTable,
    store: EmbeddingStore,
    backend: MlmBackend,
    cfg: PipelineConfig,
    parallelism: int = 1,
    strict: bool = False,
) -> EvalReport:
    """Rerun the engine with the baseline features, then +similarity, then +LM
    loss, scoring each pass; rows appear in exactly that order."""
    if not corpus.pairs:
        raise EmptyInputError("empty parallel corpus")
    feature_sets = (
        BASELINE_FEATURES,
        BASELINE_FEATURES | {FeatureKind.SIMILARITY},
        BASELINE_FEATURES | {FeatureKind.SIMILARITY, FeatureKind.LM_LOSS},
    )
    sources = [c for c, _ in corpus.pairs]
    rows = []
    for label, features in zip(ABLATION_LABELS, feature_sets):
        run_cfg = dc_replace(cfg, enabled_features=frozenset(features))
        outputs = [
            text
            for text, _ in simplify_corpus(
                sources, tagger, table, store, backend, run_cfg, parallelism, strict
            )
        ]
        bleu, sari = score_pairs(corpus, outputs)
        rows.append((label, bleu, sari))
    return EvalReport(bleu=rows[-1][1], sari=rows[-1][2], rows=tuple(rows))


def format_report(report: EvalReport) -> str:
    """Aligned plain-text table of the report rows."""
    rows = report.rows or (("system", report.bleu, report.sari),)
    label_width = max(len("Model"), max(len(label) for label, _, _ in rows))
    lines = [f"{'Model':<{label_width}}  {'BLEU':>7}  {'SARI':>7}"]
    for label, bleu, sari in rows:
        lines.append(f"{label:<{label_width}}  {bleu:>7.2f}  {sari:>7.2f}")
    return "\n".join(lines)


def report_to_record(report: EvalReport) -> dict:
    return {
        "bleu": report.bleu,
        "sari": report.sari,
        "rows": [
            {"config": label, "bleu": bleu, "sari": sari}
            for label, bleu, sari in report.rows
        ],
    }
