import math
import random

import pytest

from sadele import (
    BackendUnavailableError,
    ConfigError,
    DecisionReason,
    EmbeddingStore,
    FrequencyTable,
    GateInputs,
    PipelineConfig,
    SubstituteCandidate,
    TableBackend,
    fuse_ranks,
    gate,
    generate_candidates,
    score_candidates,
    simplify_corpus,
    simplify_sentence,
    tag_sentence,
    tokenize,
)
from sadele.core import BASELINE_FEATURES, FeatureKind
from sadele.simplify import loss_positions, trace_to_record
from support import fixture_path


def make_candidate(surface="aday", mlm=-1.0, zipf=5.0, sim=0.5, loss=2.0):
    return SubstituteCandidate(surface, mlm, zipf, sim, loss)


def naive_fractional_ranks(values, higher_is_better):
    """Independent count-based oracle: rank = better + (ties + 1) / 2."""
    ranks = []
    for v in values:
        better = sum(1 for u in values if (u > v if higher_is_better else u < v))
        ties = sum(1 for u in values if u == v)
        ranks.append(better + (ties + 1) / 2)
    return ranks


def naive_fuse(cands, enabled):
    per_feature = {}
    getters = {
        FeatureKind.MLM_PROB: lambda c: c.mlm_log_prob,
        FeatureKind.FREQ: lambda c: c.zipf,
        FeatureKind.SIMILARITY: lambda c: c.similarity,
        FeatureKind.LM_LOSS: lambda c: c.lm_loss,
    }
    for kind in enabled:
        values = [getters[kind](c) for c in cands]
        per_feature[kind] = naive_fractional_ranks(values, kind is not FeatureKind.LM_LOSS)
    fused = [
        sum(per_feature[kind][i] for kind in enabled) / len(enabled)
        for i in range(len(cands))
    ]
    order = sorted(
        range(len(cands)),
        key=lambda i: (fused[i], -cands[i].mlm_log_prob, cands[i].surface.lower()),
    )
    return [fused[i] for i in order], [cands[i].surface for i in order]


class TestGenerateCandidates:
    def test_filters_subwords_selves_and_nonwords(self, default_cfg):
        backend = TableBackend(
            candidates={
                "müşkül": (
                    ("zor", -0.5),
                    ("##kül", -0.8),
                    ("Müşkül", -1.0),
                    ("güç", -1.2),
                    ("%", -1.4),
                )
            },
            vocab_size=10,
        )
        sent = tokenize("müşkül bir durum")
        out = generate_candidates(sent, 0, backend, default_cfg)
        assert out == [("zor", -0.5), ("güç", -1.2)]

    def test_empty_raw_list(self, default_cfg):
        backend = TableBackend(vocab_size=10)
        assert generate_candidates(tokenize("bilinmez"), 0, backend, default_cfg) == []

    def test_only_self_candidates(self, default_cfg):
        backend = TableBackend(candidates={"zor": (("ZOR", -0.1),)}, vocab_size=10)
        assert generate_candidates(tokenize("zor"), 0, backend, default_cfg) == []

    def test_respects_top_k(self):
        surfaces = ["bir", "iki", "üç", "dört", "beş", "altı", "yedi", "sekiz"]
        backend = TableBackend(
            candidates={"a": tuple((s, -float(i)) for i, s in enumerate(surfaces, 1))},
            vocab_size=10,
        )
        cfg = PipelineConfig(top_k=3)
        out = generate_candidates(tokenize("a"), 0, backend, cfg)
        assert [s for s, _ in out] == ["bir", "iki", "üç"]


class TestLossPositions:
    def test_clipping_at_sentence_start(self):
        assert loss_positions(4, 0, 5) == [1, 2, 3]

    def test_window_both_sides(self):
        assert loss_positions(10, 4, 2) == [2, 3, 5, 6]

    def test_zero_window(self):
        assert loss_positions(5, 2, 0) == []


class TestScoreCandidates:
    def test_composes_feature_values(self, freq_table, embeddings, table_backend, default_cfg):
        sent = tokenize("müşkül bir durum .")
        raw = [("zor", -0.5)]
        [cand] = score_candidates(
            sent, 0, raw, freq_table, embeddings, table_backend, default_cfg
        )
        assert cand.mlm_log_prob == -0.5
        assert cand.zipf == 6.0
        assert cand.similarity == pytest.approx(8 / 9, abs=1e-12)
        expected_loss = -math.log(0.05) - math.log(0.01) - math.log(0.12)
        assert cand.lm_loss == pytest.approx(expected_loss, abs=1e-9)

    def test_candidate_without_vector_scores_zero(self, freq_table, table_backend, default_cfg):
        sent = tokenize("müşkül bir durum .")
        store = EmbeddingStore(0, {})
        [cand] = score_candidates(
            sent, 0, [("zor", -0.5)], freq_table, store, table_backend, default_cfg
        )
        assert cand.similarity == 0.0


class TestFuseRanks:
    def test_hand_worked_example(self):
        # Feature rank patterns [1,2,3], [2,1,3], [3,1,2], [1,3,2] across the
        # four features, realised through raw values; fused means are
        # [1.75, 1.75, 2.5] and the 1.75 tie breaks on MLM log-prob.
        cands = [
            make_candidate("birinci", mlm=-0.1, zipf=5.0, sim=0.1, loss=1.0),
            make_candidate("ikinci", mlm=-0.2, zipf=6.0, sim=0.9, loss=5.0),
            make_candidate("üçüncü", mlm=-0.3, zipf=4.0, sim=0.5, loss=3.0),
        ]
        fused = fuse_ranks(cands, frozenset(FeatureKind))
        assert [c.fused_score for c in fused] == [1.75, 1.75, 2.5]
        assert [c.surface for c in fused] == ["birinci", "ikinci", "üçüncü"]

    def test_singleton(self):
        [only] = fuse_ranks([make_candidate()], frozenset(FeatureKind))
        assert only.fused_score == 1.0
        assert set(only.feature_ranks.values()) == {1.0}

    def test_identical_candidates_break_lexicographically(self):
        twins = [
            make_candidate("veli", mlm=-1.0, zipf=5.0, sim=0.5, loss=2.0),
            make_candidate("ali", mlm=-1.0, zipf=5.0, sim=0.5, loss=2.0),
        ]
        fused = fuse_ranks(twins, frozenset(FeatureKind))
        assert [c.fused_score for c in fused] == [1.5, 1.5]
        assert [c.surface for c in fused] == ["ali", "veli"]

    def test_restricted_features_rank_map(self):
        fused = fuse_ranks([make_candidate(), make_candidate("b")], BASELINE_FEATURES)
        for cand in fused:
            assert set(cand.feature_ranks) == set(BASELINE_FEATURES)

    def test_empty_enabled_set_rejected(self):
        with pytest.raises(ConfigError):
            fuse_ranks([make_candidate()], frozenset())

    def test_agrees_with_naive_oracle(self):
        rng = random.Random(17)
        feature_sets = [
            frozenset(FeatureKind),
            BASELINE_FEATURES,
            BASELINE_FEATURES | {FeatureKind.LM_LOSS},
        ]
        for trial in range(300):
            n = rng.randint(1, 6)
            cands = [
                make_candidate(
                    f"c{i}",
                    mlm=rng.choice([-0.5, -1.0, -1.5, -2.0]),
                    zipf=rng.choice([1.0, 3.0, 5.0, 7.0]),
                    sim=rng.choice([0.0, 0.25, 0.5, 0.75]),
                    loss=rng.choice([1.0, 2.0, 4.0]),
                )
                for i in range(n)
            ]
            enabled = feature_sets[trial % len(feature_sets)]
            fused = fuse_ranks(cands, enabled)
            expected_scores, expected_order = naive_fuse(cands, enabled)
            assert [c.fused_score for c in fused] == pytest.approx(expected_scores)
            assert [c.surface for c in fused] == expected_order

    def test_order_invariant_under_monotone_transform(self):
        rng = random.Random(23)
        for _ in range(50):
            n = rng.randint(2, 6)
            cands = [
                make_candidate(
                    f"c{i}",
                    mlm=-rng.random() * 3,
                    zipf=rng.random() * 8,
                    sim=rng.random(),
                    loss=rng.random() * 5,
                )
                for i in range(n)
            ]
            base = [c.surface for c in fuse_ranks(cands, frozenset(FeatureKind))]
            stretched = [
                SubstituteCandidate(
                    c.surface, c.mlm_log_prob, math.exp(c.zipf), c.similarity, c.lm_loss
                )
                for c in cands
            ]
            assert [c.surface for c in fuse_ranks(stretched, frozenset(FeatureKind))] == base


class TestGate:
    def test_accepts_on_double_strict_win(self):
        assert gate(GateInputs(1.9, 4.2, 5.8, 3.1)) is DecisionReason.ACCEPTED

    def test_frequency_checked_first(self):
        assert gate(GateInputs(5.0, 4.2, 4.0, 3.1)) is DecisionReason.GATE_FREQ_FAIL

    def test_equal_loss_fails(self):
        assert gate(GateInputs(1.9, 3.0, 5.8, 3.0)) is DecisionReason.GATE_LOSS_FAIL

    def test_matches_definition_on_random_inputs(self):
        rng = random.Random(41)
        values = [0.0, 1.0, 2.5, 4.0]
        for _ in range(1000):
            g = GateInputs(
                orig_zipf=rng.choice(values),
                orig_loss=rng.choice(values),
                cand_zipf=rng.choice(values),
                cand_loss=rng.choice(values),
            )
            verdict = gate(g)
            if g.cand_zipf > g.orig_zipf and g.cand_loss < g.orig_loss:
                assert verdict is DecisionReason.ACCEPTED
            elif not g.cand_zipf > g.orig_zipf:
                assert verdict is DecisionReason.GATE_FREQ_FAIL
            else:
                assert verdict is DecisionReason.GATE_LOSS_FAIL


class TestSimplifySentence:
    def test_fixture_sentence_accepted(
        self, pos_lexicon, freq_table, embeddings, table_backend, default_cfg
    ):
        out, trace = simplify_sentence(
            "Müşkül bir durum .", pos_lexicon, freq_table, embeddings, table_backend, default_cfg
        )
        assert out == "Zor bir durum ."
        [decision] = trace.decisions
        assert decision.reason is DecisionReason.ACCEPTED
        assert decision.chosen.surface == "zor"
        assert decision.gate.cand_zipf > decision.gate.orig_zipf
        assert decision.gate.cand_loss < decision.gate.orig_loss

    def test_no_complex_words_is_identity(
        self, pos_lexicon, freq_table, embeddings, table_backend, default_cfg
    ):
        text = "Hak söz söyleyenin dostu az olur."
        out, trace = simplify_sentence(
            text, pos_lexicon, freq_table, embeddings, table_backend, default_cfg
        )
        assert out == text
        assert trace.decisions == ()

    def test_gate_failures_leave_text_unchanged(
        self, pos_lexicon, freq_table, embeddings, table_backend, default_cfg
    ):
        out, trace = simplify_sentence(
            "Nadide çiçek açtı .", pos_lexicon, freq_table, embeddings, table_backend, default_cfg
        )
        assert out == "Nadide çiçek açtı ."
        assert trace.decisions[0].reason is DecisionReason.GATE_FREQ_FAIL

        out, trace = simplify_sentence(
            "Muazzam bir fırsat .", pos_lexicon, freq_table, embeddings, table_backend, default_cfg
        )
        assert out == "Muazzam bir fırsat ."
        assert trace.decisions[0].reason is DecisionReason.GATE_LOSS_FAIL

    def test_no_candidates_reason(
        self, pos_lexicon, freq_table, embeddings, table_backend, default_cfg
    ):
        out, trace = simplify_sentence(
            "Müphem bir cevap .", pos_lexicon, freq_table, embeddings, table_backend, default_cfg
        )
        assert out == "Müphem bir cevap ."
        assert trace.decisions[0].reason is DecisionReason.NO_CANDIDATES
        assert trace.decisions[0].candidates == ()

    def test_decisions_cover_exactly_identified_indices(
        self, pos_lexicon, freq_table, embeddings, table_backend, default_cfg
    ):
        _, trace = simplify_sentence(
            "Mütebessim çehresi vardı .",
            pos_lexicon, freq_table, embeddings, table_backend, default_cfg,
        )
        assert [d.token_index for d in trace.decisions] == [0, 1]
        reasons = [d.reason for d in trace.decisions]
        assert reasons == [DecisionReason.NO_CANDIDATES, DecisionReason.ACCEPTED]

    def test_backend_failure_degrades(
        self, pos_lexicon, freq_table, embeddings, default_cfg
    ):
        class DeadBackend:
            def predict_masked(self, tokens, mask_index, top_k):
                raise BackendUnavailableError("down")

            def masked_token_loss(self, tokens, positions):
                raise BackendUnavailableError("down")

        out, trace = simplify_sentence(
            "Müşkül bir durum .", pos_lexicon, freq_table, embeddings, DeadBackend(), default_cfg
        )
        assert out == "Müşkül bir durum ."
        [decision] = trace.decisions
        assert decision.reason is DecisionReason.BACKEND_ERROR
        assert decision.error == "down"

    def test_backend_failure_strict_raises(
        self, pos_lexicon, freq_table, embeddings, default_cfg
    ):
        class DeadBackend:
            def predict_masked(self, tokens, mask_index, top_k):
                raise BackendUnavailableError("down")

            def masked_token_loss(self, tokens, positions):
                raise BackendUnavailableError("down")

        with pytest.raises(BackendUnavailableError):
            simplify_sentence(
                "Müşkül bir durum .",
                pos_lexicon, freq_table, embeddings, DeadBackend(), default_cfg,
                strict=True,
            )


class TestSimplifyCorpus:
    def test_deterministic_across_parallelism(
        self, pos_lexicon, freq_table, embeddings, table_backend, default_cfg
    ):
        lines = fixture_path("corpus20.txt").read_text(encoding="utf-8").splitlines()
        serial = simplify_corpus(
            lines, pos_lexicon, freq_table, embeddings, table_backend, default_cfg, 1
        )
        threaded = simplify_corpus(
            lines, pos_lexicon, freq_table, embeddings, table_backend, default_cfg, 4
        )
        assert [t for t, _ in serial] == [t for t, _ in threaded]
        assert [trace_to_record(tr) for _, tr in serial] == [
            trace_to_record(tr) for _, tr in threaded
        ]

    def test_empty_corpus(self, pos_lexicon, freq_table, embeddings, table_backend, default_cfg):
        assert (
            simplify_corpus([], pos_lexicon, freq_table, embeddings, table_backend, default_cfg)
            == []
        )

    def test_corpus_composes_single_sentence_runs(
        self, pos_lexicon, freq_table, embeddings, table_backend, default_cfg
    ):
        lines = ["Müşkül bir durum .", "Hak söz söyleyenin dostu az olur."]
        results = simplify_corpus(
            lines, pos_lexicon, freq_table, embeddings, table_backend, default_cfg
        )
        singles = [
            simplify_sentence(
                line, pos_lexicon, freq_table, embeddings, table_backend, default_cfg
            )[0]
            for line in lines
        ]
        assert [t for t, _ in results] == singles

    def test_per_line_errors_recorded(
        self, pos_lexicon, freq_table, embeddings, table_backend, default_cfg
    ):
        results = simplify_corpus(
            ["Müşkül bir durum .", ""],
            pos_lexicon, freq_table, embeddings, table_backend, default_cfg,
        )
        assert results[0][0] == "Zor bir durum ."
        assert results[1][0] == ""
        assert results[1][1].error is not None

    def test_rejects_bad_parallelism(
        self, pos_lexicon, freq_table, embeddings, table_backend, default_cfg
    ):
        with pytest.raises(ConfigError):
            simplify_corpus(
                [], pos_lexicon, freq_table, embeddings, table_backend, default_cfg, 0
            )


class TestTraceRecords:
    def test_record_fields(
        self, pos_lexicon, freq_table, embeddings, table_backend, default_cfg
    ):
        _, trace = simplify_sentence(
            "Müşkül bir durum .", pos_lexicon, freq_table, embeddings, table_backend, default_cfg
        )
        record = trace_to_record(trace)
        assert set(record) == {"text", "decisions"}
        [decision] = record["decisions"]
        assert set(decision) == {"token_index", "candidates", "reason"}
        for cand in decision["candidates"]:
            assert set(cand) == {
                "surface", "mlm_log_prob", "zipf", "similarity", "lm_loss",
                "ranks", "fused_score",
            }
        assert decision["reason"] == "ACCEPTED"
        assert decision["candidates"][0]["surface"] == "zor"
