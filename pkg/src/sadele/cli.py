"""Command-line front door.

Subcommands: ``simplify`` (text in, simplified text out), ``evaluate``
(BLEU/SARI against a parallel corpus, optionally the three-row feature
ablation), ``cwi`` (score the frequency identifier on an annotated dataset),
and ``inspect`` (dump a candidate table entry). Data goes to stdout or
``--output``; diagnostics go to stderr. Exit codes: 0 success, 1 bad input or
usage, 2 backend unavailable under ``--strict``.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from pathlib import Path

from .core import (
    BackendUnavailableError,
    ConfigError,
    FeatureKind,
    PipelineConfig,
    SadeleError,
    TaggedSentence,
    Token,
)
from .cwi import FrequencyLabeler, overlap, score_labels
from .lexres import (
    EmbeddingStore,
    load_cwi_dataset,
    load_embeddings,
    load_frequency_table,
    load_parallel,
)
from .metrics import (
    EvalReport,
    ablation_report,
    format_report,
    report_to_record,
    score_pairs,
)
from .mlm import MLM_URL_ENV, HttpBackend, load_table_backend
from .simplify import simplify_corpus, write_trace_jsonl
from .textproc import PosLexicon, casefold_tr, load_pos_lexicon


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on bad flags; the contract here is exit 1.
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


def _build_parser() -> _Parser:
    parser = _Parser(prog="sadele", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("simplify", help="simplify text line by line")
    _add_resource_flags(sp)
    _add_config_flags(sp)
    sp.add_argument("--input", help="input file (default: stdin)")
    sp.add_argument("--output", help="output file (default: stdout)")
    sp.add_argument("--trace", help="write one JSON trace record per input line")
    sp.add_argument("--strict", action="store_true", help="fail hard on backend errors")
    sp.add_argument("--jobs", type=int, default=1, help="parallel workers (default 1)")
    sp.add_argument("--seed", type=int, help="seed for stochastic backends; unused by the built-in ones")

    ev = sub.add_parser("evaluate", help="score outputs with BLEU and SARI")
    ev.add_argument("--pairs", required=True, help="TSV of complex<TAB>simple pairs")
    ev.add_argument("--system", help="system output file, one line per pair")
    ev.add_argument(
        "--ablation",
        action="store_true",
        help="rerun the engine per feature configuration (ignores --system)",
    )
    ev.add_argument("--json", action="store_true", help="machine-readable report")
    _add_resource_flags(ev, required=False)
    _add_config_flags(ev)
    ev.add_argument("--strict", action="store_true", help="fail hard on backend errors")
    ev.add_argument("--jobs", type=int, default=1, help="parallel workers (default 1)")

    cw = sub.add_parser("cwi", help="score the frequency identifier on a dataset")
    cw.add_argument("--dataset", required=True, help="block-TSV CWI dataset")
    cw.add_argument("--freq", required=True, help="word<TAB>zipf frequency table")
    cw.add_argument("--pos-lexicon", help="surface<TAB>TAG lexicon for tagging")
    cw.add_argument("--threshold", type=float, help="Zipf complexity threshold")

    ins = sub.add_parser("inspect", help="dump candidates for one word")
    ins.add_argument("--mlm-table", required=True, help="table-backend file")
    ins.add_argument("--word", required=True, help="target word to look up")
    ins.add_argument("--top-k", type=int, help="limit the number of rows")
    ins.add_argument("--freq", help="also show each candidate's Zipf score")
    ins.add_argument("--embeddings", help="also show cosine similarity to the word")
    return parser


def _add_resource_flags(sp, required: bool = True) -> None:
    sp.add_argument("--freq", required=required, help="word<TAB>zipf frequency table")
    sp.add_argument("--embeddings", help="word-vector text file")
    sp.add_argument("--pos-lexicon", help="surface<TAB>TAG lexicon")
    sp.add_argument("--mlm-table", help="offline table backend file")
    sp.add_argument(
        "--mlm-url", help=f"model server base URL (or set {MLM_URL_ENV})"
    )


def _add_config_flags(sp) -> None:
    sp.add_argument("--threshold", type=float, help="Zipf complexity threshold")
    sp.add_argument("--top-k", type=int, help="candidates requested per word")
    sp.add_argument("--window", type=int, help="LM loss window, tokens per side")
    sp.add_argument(
        "--features",
        help="comma-separated ranking features (mlm_prob and freq are mandatory)",
    )


def _make_config(args) -> PipelineConfig:
    kwargs = {}
    if args.threshold is not None:
        kwargs["zipf_threshold"] = args.threshold
    if args.top_k is not None:
        kwargs["top_k"] = args.top_k
    if args.window is not None:
        kwargs["lm_window"] = args.window
    if args.features:
        names = [n.strip().upper() for n in args.features.split(",") if n.strip()]
        try:
            kwargs["enabled_features"] = frozenset(FeatureKind[n] for n in names)
        except KeyError as exc:
            raise ConfigError(f"unknown feature {exc.args[0]!r}") from None
    return PipelineConfig(**kwargs)


def _make_backend(args):
    url = args.mlm_url or os.environ.get(MLM_URL_ENV)
    if args.mlm_table and args.mlm_url:
        raise _UsageError("give exactly one of --mlm-table and --mlm-url")
    if args.mlm_table:
        return load_table_backend(args.mlm_table)
    if url:
        return HttpBackend(url)
    raise _UsageError(f"an MLM backend is required: --mlm-table, --mlm-url, or {MLM_URL_ENV}")


def _make_engine_deps(args):
    if not args.freq:
        raise _UsageError("--freq is required to identify complex words")
    table = load_frequency_table(args.freq)
    store = load_embeddings(args.embeddings) if args.embeddings else EmbeddingStore(0, {})
    tagger = load_pos_lexicon(args.pos_lexicon) if args.pos_lexicon else PosLexicon()
    return tagger, table, store, _make_backend(args)


def _read_lines(path: str | None) -> list[str]:
    if path is None:
        return sys.stdin.read().splitlines()
    return Path(path).read_text(encoding="utf-8").splitlines()


def _write_lines(path: str | None, lines: list[str]) -> None:
    text = "".join(line + "\n" for line in lines)
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _cmd_simplify(args) -> int:
    tagger, table, store, backend = _make_engine_deps(args)
    cfg = _make_config(args)
    if args.jobs < 1:
        raise _UsageError("--jobs must be >= 1")
    if args.seed is not None:
        random.seed(args.seed)
    lines = _read_lines(args.input)
    results = simplify_corpus(
        lines, tagger, table, store, backend, cfg,
        parallelism=args.jobs, strict=args.strict,
    )
    _write_lines(args.output, [text for text, _ in results])
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            write_trace_jsonl([trace for _, trace in results], fh)
    return 0


def _cmd_evaluate(args) -> int:
    corpus = load_parallel(args.pairs)
    if args.ablation:
        tagger, table, store, backend = _make_engine_deps(args)
        cfg = _make_config(args)
        report = ablation_report(
            corpus, tagger, table, store, backend, cfg,
            parallelism=args.jobs, strict=args.strict,
        )
    elif args.system:
        outputs = _read_lines(args.system)
        bleu, sari = score_pairs(corpus, outputs)
        report = EvalReport(bleu, sari, rows=(("system", bleu, sari),))
    else:
        raise _UsageError("give --system to score a file or --ablation to rerun the engine")
    if args.json:
        print(json.dumps(report_to_record(report), ensure_ascii=False))
    else:
        print(format_report(report))
    return 0


def _dataset_sentence(surfaces) -> TaggedSentence:
    text = " ".join(surfaces)
    tokens = []
    start = 0
    for surface in surfaces:
        tokens.append(Token(surface, start, start + len(surface)))
        start += len(surface) + 1
    return TaggedSentence(text, tuple(tokens))


def _cmd_cwi(args) -> int:
    dataset = load_cwi_dataset(args.dataset)
    table = load_frequency_table(args.freq)
    tagger = load_pos_lexicon(args.pos_lexicon) if args.pos_lexicon else PosLexicon()
    cfg = (
        PipelineConfig(zipf_threshold=args.threshold)
        if args.threshold is not None
        else PipelineConfig()
    )
    labeler = FrequencyLabeler(table, cfg)
    pred: list[int] = []
    gold: list[int] = []
    for surfaces, labels in dataset.sentences:
        sent = _dataset_sentence(surfaces)
        sent = sent.with_tags(tagger.tag(surfaces))
        pred.extend(labeler.label(sent))
        gold.extend(labels)
    report = score_labels(pred, gold)
    agreement = overlap(pred, gold)
    print(
        f"precision={report.precision:.4f} recall={report.recall:.4f} "
        f"f1={report.f1:.4f} support={report.support} overlap={agreement:.4f}"
    )
    return 0


def _cmd_inspect(args) -> int:
    backend = load_table_backend(args.mlm_table)
    table = load_frequency_table(args.freq) if args.freq else None
    store = load_embeddings(args.embeddings) if args.embeddings else None
    rows = backend.candidates.get(casefold_tr(args.word), ())
    if args.top_k is not None:
        rows = rows[: args.top_k]
    for surface, log_prob in rows:
        cols = [surface, f"{log_prob:g}"]
        if table is not None:
            cols.append(f"{table.zipf(surface):g}")
        if store is not None:
            sim = store.cosine(args.word, surface)
            cols.append("-" if sim is None else f"{sim:g}")
        print("\t".join(cols))
    return 0


_HANDLERS = {
    "simplify": _cmd_simplify,
    "evaluate": _cmd_evaluate,
    "cwi": _cmd_cwi,
    "inspect": _cmd_inspect,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _HANDLERS[args.command](args)
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except BackendUnavailableError as exc:
        print(f"backend unavailable: {exc}", file=sys.stderr)
        return 2
    except (SadeleError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
