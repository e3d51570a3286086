"""Turkish-aware text processing: casefolding, tokenization, tagging, replacement.

Turkish has two i letters (dotted and dotless), so the standard Unicode
lowercase map is wrong for 'I' and produces a combining mark for 'İ'. All
case-insensitive lookups in the pipeline go through :func:`casefold_tr`.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field
from typing import Protocol, Sequence

from .core import (
    EmptyInputError,
    InvalidSubstitutionError,
    ParseError,
    PosTag,
    TaggedSentence,
    Token,
)

_TR_LOWER_MAP = {ord("I"): "ı", ord("İ"): "i"}
_TR_UPPER_MAP = {ord("ı"): "I", ord("i"): "İ"}

# Apostrophe variants that attach suffixes to proper nouns (Ankara'da).
_APOSTROPHES = "'’"


def casefold_tr(s: str) -> str:
    """Lowercase with Turkish dotted/dotless i rules ('I' -> 'ı', 'İ' -> 'i')."""
    return s.translate(_TR_LOWER_MAP).lower()


def upper_first_tr(s: str) -> str:
    """Uppercase only the first letter, using Turkish rules ('i' -> 'İ', 'ı' -> 'I')."""
    if not s:
        return s
    head = s[0].translate(_TR_UPPER_MAP)
    if head == s[0]:
        head = s[0].upper()
    return head + s[1:]


def is_punct_surface(s: str) -> bool:
    return bool(s) and all(unicodedata.category(ch).startswith("P") for ch in s)


def is_numeric_surface(s: str) -> bool:
    stripped = s.replace(".", "").replace(",", "").replace("%", "")
    return bool(stripped) and stripped.isdigit()


def is_wordlike(s: str) -> bool:
    """True for surfaces made of letters, allowing internal apostrophes/hyphens."""
    core = s.strip(_APOSTROPHES + "-")
    if not core:
        return False
    return all(ch.isalpha() or ch in _APOSTROPHES or ch == "-" for ch in core)


class PosTagger(Protocol):
    """Anything that maps token surfaces to POS tags, one tag per surface."""

    def tag(self, surfaces: Sequence[str]) -> list[PosTag]: ...


@dataclass(frozen=True)
class PosLexicon:
    """Deterministic lexicon tagger used in place of a trained model.

    Lookup never fails: punctuation-only surfaces get PUNCT, numeric surfaces
    get NUM, anything else unknown falls back to ``default_tag``. The NOUN
    default keeps unknown words eligible for complex word identification.
    """

    entries: dict[str, PosTag] = field(default_factory=dict)
    default_tag: PosTag = PosTag.NOUN

    def tag(self, surfaces: Sequence[str]) -> list[PosTag]:
        return [self._tag_one(s) for s in surfaces]

    def _tag_one(self, surface: str) -> PosTag:
        entry = self.entries.get(casefold_tr(surface))
        if entry is not None:
            return entry
        if is_punct_surface(surface):
            return PosTag.PUNCT
        if is_numeric_surface(surface):
            return PosTag.NUM
        return self.default_tag


def load_pos_lexicon(path, default_tag: PosTag = PosTag.NOUN) -> PosLexicon:
    """Read a "surface<TAB>TAG" lexicon file; '#' lines are comments."""
    entries: dict[str, PosTag] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            if "\t" not in line:
                raise ParseError("expected 'surface<TAB>TAG'", lineno)
            surface, _, tag_name = line.partition("\t")
            try:
                tag = PosTag[tag_name.strip()]
            except KeyError:
                raise ParseError(f"unknown POS tag {tag_name.strip()!r}", lineno) from None
            entries[casefold_tr(surface)] = tag
    return PosLexicon(entries, default_tag)


_CHUNK_RE = re.compile(r"\S+")


def tokenize(text: str) -> TaggedSentence:
    """Split ``text`` into tokens with character offsets; POS tags stay unset.

    Whitespace separates chunks; leading and trailing punctuation peels off
    into its own tokens. Internal apostrophes and hyphens stay inside the
    token so Turkish proper-noun suffixes (Ankara'da) survive intact.
    """
    if not text.strip():
        raise EmptyInputError("cannot tokenize empty or whitespace-only text")

    tokens: list[Token] = []
    for m in _CHUNK_RE.finditer(text):
        start, end = m.span()
        lo, hi = start, end
        head: list[Token] = []
        tail: list[Token] = []
        while lo < hi and _is_strippable(text[lo]):
            head.append(Token(text[lo], lo, lo + 1))
            lo += 1
        while hi > lo and _is_strippable(text[hi - 1]):
            tail.append(Token(text[hi - 1], hi - 1, hi))
            hi -= 1
        tokens.extend(head)
        if lo < hi:
            tokens.append(Token(text[lo:hi], lo, hi))
        tokens.extend(reversed(tail))
    return TaggedSentence(text, tuple(tokens))


def _is_strippable(ch: str) -> bool:
    # Symbols strip off like punctuation so "(50%)" style chunks come apart.
    # Apostrophes strip only here at the edges (quote usage); the strip loops
    # never reach word-internal ones, so proper-noun suffixes stay attached.
    return unicodedata.category(ch)[0] in ("P", "S")


def tag_sentence(sent: TaggedSentence, tagger: PosTagger) -> TaggedSentence:
    """Return ``sent`` with every token tagged; surfaces and offsets unchanged."""
    if not sent.tokens:
        raise EmptyInputError("cannot tag a sentence with no tokens")
    tags = tagger.tag(sent.surfaces())
    return sent.with_tags(tags)


def apply_substitutions(sent: TaggedSentence, subs: Sequence[tuple[int, str]]) -> str:
    """Rebuild the sentence text with the given token replacements.

    Inter-token spacing is preserved byte for byte. When the original token
    started with an uppercase letter the replacement's first letter is
    uppercased with Turkish rules, so sentence-initial substitutions stay
    well-formed.
    """
    seen: set[int] = set()
    for idx, _ in subs:
        if idx < 0 or idx >= len(sent.tokens):
            raise InvalidSubstitutionError(f"token index {idx} out of range")
        if idx in seen:
            raise InvalidSubstitutionError(f"duplicate substitution for token {idx}")
        seen.add(idx)

    out: list[str] = []
    pos = 0
    for idx, replacement in sorted(subs):
        tok = sent.tokens[idx]
        out.append(sent.text[pos : tok.start])
        if tok.surface[0].isupper():
            replacement = upper_first_tr(replacement)
        out.append(replacement)
        pos = tok.end
    out.append(sent.text[pos:])
    return "".join(out)
