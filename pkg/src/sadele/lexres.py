"""Loaders for the lexical resources the pipeline consumes.

Four small UTF-8 text formats: a Zipf frequency table, word embeddings in the
usual one-word-per-line text layout, a block-TSV complex-word dataset, and a
two-column parallel corpus. Every loader skips blank lines and '#' comments.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import (
    DimensionMismatchError,
    LabelError,
    ParseError,
    RangeError,
)
from .textproc import casefold_tr

ZIPF_MIN, ZIPF_MAX = 0.0, 9.0


@dataclass(frozen=True)
class FrequencyTable:
    """Casefolded surface -> Zipf score (log10 occurrences per billion tokens)."""

    entries: dict[str, float] = field(default_factory=dict)

    def zipf(self, surface: str) -> float:
        """Zipf score of ``surface``; unseen words score 0.0 (maximally rare)."""
        return self.entries.get(casefold_tr(surface), 0.0)


@dataclass(frozen=True)
class EmbeddingStore:
    """Casefolded surface -> dense vector, all of one dimension."""

    dim: int
    vectors: dict[str, np.ndarray] = field(default_factory=dict)

    def cosine(self, a: str, b: str) -> Optional[float]:
        """Cosine similarity of two words, or None when either has no usable vector."""
        va = self.vectors.get(casefold_tr(a))
        vb = self.vectors.get(casefold_tr(b))
        if va is None or vb is None:
            return None
        na = float(np.linalg.norm(va))
        nb = float(np.linalg.norm(vb))
        if na == 0.0 or nb == 0.0:
            return None
        return float(np.dot(va, vb) / (na * nb))


@dataclass(frozen=True)
class CwiDataset:
    """Sentences as (surfaces, binary complexity labels), aligned per token."""

    sentences: tuple[tuple[tuple[str, ...], tuple[int, ...]], ...] = ()

    def __len__(self) -> int:
        return len(self.sentences)


@dataclass(frozen=True)
class ParallelCorpus:
    """(complex, simple) sentence pairs for evaluation."""

    pairs: tuple[tuple[str, str], ...] = ()

    def __len__(self) -> int:
        return len(self.pairs)


def _data_lines(path):
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if line.lstrip().startswith("#"):
                continue
            yield lineno, line


def load_frequency_table(path) -> FrequencyTable:
    """Read "word<TAB>zipf" lines; later duplicates overwrite earlier ones."""
    entries: dict[str, float] = {}
    for lineno, line in _data_lines(path):
        if not line.strip():
            continue
        if "\t" not in line:
            raise ParseError("expected 'word<TAB>zipf'", lineno)
        word, _, value = line.partition("\t")
        try:
            zipf = float(value)
        except ValueError:
            raise ParseError(f"bad zipf value {value!r}", lineno) from None
        if not (ZIPF_MIN <= zipf <= ZIPF_MAX):
            raise RangeError(f"line {lineno}: zipf {zipf} outside [{ZIPF_MIN}, {ZIPF_MAX}]")
        entries[casefold_tr(word)] = zipf
    return FrequencyTable(entries)


def zipf(table: FrequencyTable, surface: str) -> float:
    return table.zipf(surface)


def load_embeddings(path) -> EmbeddingStore:
    """Read "word v1 ... vd" lines; a leading "count dim" header is accepted."""
    vectors: dict[str, np.ndarray] = {}
    dim: int | None = None
    first_data_line = True
    for lineno, line in _data_lines(path):
        if not line.strip():
            continue
        parts = line.split()
        if first_data_line and len(parts) == 2 and _all_ints(parts):
            first_data_line = False
            continue  # word2vec-style "count dim" header
        first_data_line = False
        word, comps = parts[0], parts[1:]
        if not comps:
            raise ParseError("expected 'word v1 ... vd'", lineno)
        try:
            vec = np.array([float(c) for c in comps], dtype=np.float64)
        except ValueError:
            raise ParseError("non-numeric vector component", lineno) from None
        if dim is None:
            dim = len(vec)
        elif len(vec) != dim:
            raise DimensionMismatchError(
                f"vector of length {len(vec)}, expected {dim}", lineno
            )
        vectors[casefold_tr(word)] = vec
    return EmbeddingStore(dim or 0, vectors)


def _all_ints(parts) -> bool:
    try:
        for p in parts:
            int(p)
    except ValueError:
        return False
    return True


def cosine(store: EmbeddingStore, a: str, b: str) -> Optional[float]:
    return store.cosine(a, b)


def load_cwi_dataset(path) -> CwiDataset:
    """Read sentence blocks of "surface<TAB>label" lines separated by blank lines."""
    sentences: list[tuple[tuple[str, ...], tuple[int, ...]]] = []
    surfaces: list[str] = []
    labels: list[int] = []

    def flush():
        if surfaces:
            sentences.append((tuple(surfaces), tuple(labels)))
            surfaces.clear()
            labels.clear()

    for lineno, line in _data_lines(path):
        if not line.strip():
            flush()
            continue
        if "\t" not in line:
            raise ParseError("expected 'surface<TAB>label'", lineno)
        surface, _, label = line.partition("\t")
        if label.strip() not in ("0", "1"):
            raise LabelError(f"label must be 0 or 1, got {label.strip()!r}", lineno)
        surfaces.append(surface)
        labels.append(int(label))
    flush()
    return CwiDataset(tuple(sentences))


def save_cwi_dataset(dataset: CwiDataset, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for surfaces, labels in dataset.sentences:
            for surface, label in zip(surfaces, labels):
                fh.write(f"{surface}\t{label}\n")
            fh.write("\n")


def load_parallel(path) -> ParallelCorpus:
    """Read "complex<TAB>simple" pairs in file order."""
    pairs: list[tuple[str, str]] = []
    for lineno, line in _data_lines(path):
        if not line.strip():
            continue
        if "\t" not in line:
            raise ParseError("expected 'complex<TAB>simple'", lineno)
        complex_side, _, simple_side = line.partition("\t")
        if not complex_side.strip() or not simple_side.strip():
            raise ParseError("both sides of a pair must be non-empty", lineno)
        pairs.append((complex_side, simple_side))
    return ParallelCorpus(tuple(pairs))
