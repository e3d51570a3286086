"""Lexical simplification toolkit for Turkish.

Pipeline: identify complex words by POS and Zipf frequency, generate
substitutes with a masked language model, select by multi-feature rank fusion
behind a strict frequency+loss acceptance gate, and evaluate with corpus BLEU
and SARI.
"""

from .core import (
    BackendUnavailableError,
    ConfigError,
    Decision,
    DecisionReason,
    DimensionMismatchError,
    EmptyInputError,
    FeatureKind,
    GateInputs,
    InvalidSubstitutionError,
    LabelError,
    LengthMismatchError,
    ParseError,
    PipelineConfig,
    PosTag,
    RangeError,
    SadeleError,
    SimplificationTrace,
    SubstituteCandidate,
    TaggedSentence,
    TaggerContractError,
    Token,
    UntaggedInputError,
)
from .cwi import CwiReport, FrequencyLabeler, ReplayLabeler, identify_complex, overlap, score_labels
from .lexres import (
    CwiDataset,
    EmbeddingStore,
    FrequencyTable,
    ParallelCorpus,
    cosine,
    load_cwi_dataset,
    load_embeddings,
    load_frequency_table,
    load_parallel,
    save_cwi_dataset,
    zipf,
)
from .metrics import EvalReport, ablation_report, bleu_corpus, sari_corpus, sari_sentence
from .mlm import HttpBackend, TableBackend, load_table_backend, masked_token_loss, predict_masked
from .simplify import (
    fuse_ranks,
    gate,
    generate_candidates,
    score_candidates,
    simplify_corpus,
    simplify_sentence,
    write_trace_jsonl,
)
from .textproc import (
    PosLexicon,
    apply_substitutions,
    casefold_tr,
    load_pos_lexicon,
    tag_sentence,
    tokenize,
    upper_first_tr,
)

__version__ = "0.1.0"
