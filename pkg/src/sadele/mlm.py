"""Masked-language-model backends.

Two implementations sit behind one small interface: a deterministic in-memory
table for offline runs and tests, and an HTTP client speaking to the model
server. Both expose masked prediction and a one-at-a-time masked token loss
(sum of per-position negative log-likelihoods, natural log).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Protocol, Sequence

import requests

from .core import BackendUnavailableError, ParseError
from .textproc import casefold_tr

MLM_URL_ENV = "SADELE_MLM_URL"


class MlmBackend(Protocol):
    def predict_masked(
        self, tokens: Sequence[str], mask_index: int, top_k: int
    ) -> list[tuple[str, float]]:
        """Top-k fillers for ``tokens[mask_index]``, best first, with natural-log probs."""
        ...

    def masked_token_loss(self, tokens: Sequence[str], positions: Sequence[int]) -> float:
        """Sum of per-position NLLs, masking one position at a time (back to front)."""
        ...


def _check_mask_index(tokens: Sequence[str], mask_index: int) -> None:
    if not 0 <= mask_index < len(tokens):
        raise IndexError(f"mask_index {mask_index} out of range for {len(tokens)} tokens")


def _check_positions(tokens: Sequence[str], positions: Sequence[int]) -> None:
    if len(set(positions)) != len(positions):
        raise ValueError("positions must be distinct")
    for pos in positions:
        if not 0 <= pos < len(tokens):
            raise IndexError(f"position {pos} out of range for {len(tokens)} tokens")


@dataclass(frozen=True)
class TableBackend:
    """Offline test double driven by a candidate table and a unigram model.

    Candidate lookup keys on the casefolded target word, not on context, and
    the loss is a context-free unigram score; both are documented limitations
    of the double, unlike the real server backend.
    """

    candidates: dict[str, tuple[tuple[str, float], ...]] = field(default_factory=dict)
    unigram: dict[str, float] = field(default_factory=dict)
    vocab_size: int = 1

    def predict_masked(
        self, tokens: Sequence[str], mask_index: int, top_k: int
    ) -> list[tuple[str, float]]:
        _check_mask_index(tokens, mask_index)
        if top_k < 0:
            raise ValueError("top_k must be >= 0")
        key = casefold_tr(tokens[mask_index])
        return list(self.candidates.get(key, ())[:top_k])

    def masked_token_loss(self, tokens: Sequence[str], positions: Sequence[int]) -> float:
        _check_positions(tokens, positions)
        total = 0.0
        for pos in sorted(positions, reverse=True):  # back to front
            p = self.unigram.get(casefold_tr(tokens[pos]), 1.0 / self.vocab_size)
            total += -math.log(p)
        return total


def load_table_backend(path) -> TableBackend:
    """Read the table-backend file: "@vocab<TAB>N" header, "@u<TAB>word<TAB>prob"
    unigram lines, and "target<TAB>cand<TAB>log_prob" candidate lines."""
    candidates: dict[str, list[tuple[str, float]]] = {}
    unigram: dict[str, float] = {}
    vocab_size: int | None = None
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if parts[0] == "@vocab":
                if len(parts) != 2:
                    raise ParseError("expected '@vocab<TAB>N'", lineno)
                vocab_size = _parse_int(parts[1], lineno)
                if vocab_size < 1:
                    raise ParseError("vocab size must be >= 1", lineno)
            elif parts[0] == "@u":
                if len(parts) != 3:
                    raise ParseError("expected '@u<TAB>word<TAB>prob'", lineno)
                prob = _parse_float(parts[2], lineno)
                if not 0.0 < prob <= 1.0:
                    raise ParseError(f"unigram probability {prob} outside (0, 1]", lineno)
                unigram[casefold_tr(parts[1])] = prob
            else:
                if len(parts) != 3:
                    raise ParseError("expected 'target<TAB>cand<TAB>log_prob'", lineno)
                target = casefold_tr(parts[0])
                log_prob = _parse_float(parts[2], lineno)
                if log_prob > 0.0:
                    raise ParseError(f"log probability {log_prob} must be <= 0", lineno)
                row = candidates.setdefault(target, [])
                if row and log_prob >= row[-1][1]:
                    raise ParseError(
                        f"candidates for {target!r} must be strictly descending", lineno
                    )
                row.append((parts[1], log_prob))
    if vocab_size is None:
        raise ParseError("missing '@vocab<TAB>N' header")
    return TableBackend(
        {k: tuple(v) for k, v in candidates.items()}, unigram, vocab_size
    )


def _parse_int(text: str, lineno: int) -> int:
    try:
        return int(text)
    except ValueError:
        raise ParseError(f"bad integer {text!r}", lineno) from None


def _parse_float(text: str, lineno: int) -> float:
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"bad number {text!r}", lineno) from None


class HttpBackend:
    """Client for the model server; validates inputs locally, then POSTs JSON."""

    def __init__(self, base_url: str | None = None, timeout: float = 30.0):
        base_url = base_url or os.environ.get(MLM_URL_ENV)
        if not base_url:
            raise BackendUnavailableError(
                f"no model server URL given (flag or {MLM_URL_ENV})"
            )
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self._session = requests.Session()

    def predict_masked(
        self, tokens: Sequence[str], mask_index: int, top_k: int
    ) -> list[tuple[str, float]]:
        _check_mask_index(tokens, mask_index)
        if top_k < 0:
            raise ValueError("top_k must be >= 0")
        body = {"tokens": list(tokens), "mask_index": mask_index, "top_k": top_k}
        payload = self._post("/v1/mask-predict", body)
        try:
            return [(c["token"], float(c["log_prob"])) for c in payload["candidates"]]
        except (KeyError, TypeError) as exc:
            raise BackendUnavailableError(f"malformed server response: {exc}") from exc

    def masked_token_loss(self, tokens: Sequence[str], positions: Sequence[int]) -> float:
        _check_positions(tokens, positions)
        body = {"tokens": list(tokens), "positions": list(positions)}
        payload = self._post("/v1/token-loss", body)
        try:
            return float(payload["loss"])
        except (KeyError, TypeError) as exc:
            raise BackendUnavailableError(f"malformed server response: {exc}") from exc

    def _post(self, route: str, body: dict) -> dict:
        url = self.base_url + route
        try:
            resp = self._session.post(url, json=body, timeout=self.timeout)
        except requests.RequestException as exc:
            raise BackendUnavailableError(f"POST {url} failed: {exc}") from exc
        if resp.status_code != 200:
            raise BackendUnavailableError(f"POST {url} returned HTTP {resp.status_code}")
        try:
            return resp.json()
        except ValueError as exc:
            raise BackendUnavailableError(f"POST {url} returned non-JSON body") from exc


def predict_masked(
    backend: MlmBackend, tokens: Sequence[str], mask_index: int, top_k: int
) -> list[tuple[str, float]]:
    return backend.predict_masked(tokens, mask_index, top_k)


def masked_token_loss(
    backend: MlmBackend, tokens: Sequence[str], positions: Sequence[int]
) -> float:
    return backend.masked_token_loss(tokens, positions)
