"""Masked-LM inference over whole words.

Clients send whole-word token lists; this wrapper owns the subword alignment.
A predicted filler is always a single vocabulary word (pure subword
continuations are dropped), and the loss masks one word at a time, replacing
all of its wordpieces and summing their negative log-likelihoods.
"""

from __future__ import annotations

from typing import Sequence

import torch
from transformers import AutoModelForMaskedLM, AutoTokenizer


class RequestTooLongError(ValueError):
    pass


class MaskedLm:
    def __init__(self, name_or_path: str):
        self.name = str(name_or_path)
        self.tokenizer = AutoTokenizer.from_pretrained(name_or_path)
        self.model = AutoModelForMaskedLM.from_pretrained(name_or_path)
        self.model.eval()
        self._max_len = int(getattr(self.model.config, "max_position_embeddings", 512))
        special_ids = set(self.tokenizer.all_special_ids)
        vocab = self.tokenizer.get_vocab()
        # ids eligible as whole-word fillers: not special, not a continuation piece
        self._word_ids = [
            idx
            for token, idx in vocab.items()
            if idx not in special_ids and not token.startswith("##")
        ]

    def _pieces(self, words: Sequence[str]) -> list[list[int]]:
        out = []
        for word in words:
            pieces = self.tokenizer.tokenize(word) or [self.tokenizer.unk_token]
            out.append(self.tokenizer.convert_tokens_to_ids(pieces))
        return out

    def _assemble(
        self, pieces: list[list[int]], masked: dict[int, int]
    ) -> tuple[list[int], dict[int, list[int]]]:
        """Input ids with the given words masked; returns ids plus, per masked
        word, the positions its mask tokens occupy. ``masked[i]`` gives the
        number of mask slots for word i (1 slot for prediction, one per piece
        for loss scoring)."""
        ids = [self.tokenizer.cls_token_id]
        slots: dict[int, list[int]] = {}
        for i, word_pieces in enumerate(pieces):
            if i in masked:
                slots[i] = list(range(len(ids), len(ids) + masked[i]))
                ids.extend([self.tokenizer.mask_token_id] * masked[i])
            else:
                ids.extend(word_pieces)
        ids.append(self.tokenizer.sep_token_id)
        if len(ids) > self._max_len:
            raise RequestTooLongError(
                f"{len(ids)} wordpieces exceed the model limit of {self._max_len}"
            )
        return ids, slots

    def _log_probs(self, ids: list[int]) -> torch.Tensor:
        with torch.no_grad():
            logits = self.model(input_ids=torch.tensor([ids])).logits[0]
        return torch.log_softmax(logits, dim=-1)

    def predict_masked(
        self, tokens: Sequence[str], mask_index: int, top_k: int
    ) -> list[tuple[str, float]]:
        """Top-k whole-word fillers for ``tokens[mask_index]``, best first."""
        if top_k == 0:
            return []
        pieces = self._pieces(tokens)
        ids, slots = self._assemble(pieces, {mask_index: 1})
        log_probs = self._log_probs(ids)[slots[mask_index][0]]
        ranked = sorted(self._word_ids, key=lambda idx: float(log_probs[idx]), reverse=True)
        chosen = ranked[:top_k]
        surfaces = self.tokenizer.convert_ids_to_tokens(chosen)
        return [(s, float(log_probs[idx])) for s, idx in zip(surfaces, chosen)]

    def masked_token_loss(self, tokens: Sequence[str], positions: Sequence[int]) -> float:
        """Sum over positions of the NLL of the true word, masking one word
        (all its pieces) at a time, back to front."""
        pieces = self._pieces(tokens)
        total = 0.0
        for pos in sorted(positions, reverse=True):
            ids, slots = self._assemble(pieces, {pos: len(pieces[pos])})
            log_probs = self._log_probs(ids)
            for slot, true_id in zip(slots[pos], pieces[pos]):
                total += -float(log_probs[slot][true_id])
        return total
