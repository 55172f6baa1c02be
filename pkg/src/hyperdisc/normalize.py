"""Produce the normalized corpus: lowercase, POS-filter, append noun phrases.

Tag classes are mapped by Penn Treebank prefix: noun ``NN*``, verb ``VB*``,
adjective ``JJ*``, adverb ``RB*``. Only those four classes survive the
filter, which also drops punctuation, prepositions and conjunctions. Every
contiguous 2- or 3-token window of adjectives/nouns ending in a noun is a
noun phrase; all overlapping windows are kept and appended to the filtered
line as underscore-joined tokens.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import NamedTuple

from .corpus_io import (
    ReadStats,
    TaggedParagraph,
    format_header,
    iter_data_lines,
    parse_tagged_line,
)
from ._parallel import map_lines

KEEP_PREFIXES = ("NN", "VB", "JJ", "RB")
CHUNK_PREFIXES = ("NN", "JJ")
PHRASE_LENGTHS = (2, 3)


def is_noun_tag(pos: str) -> bool:
    return pos.startswith("NN")


def is_chunk_tag(pos: str) -> bool:
    return pos.startswith(CHUNK_PREFIXES)


def is_kept_tag(pos: str) -> bool:
    return pos.startswith(KEEP_PREFIXES)


class NounPhrase(NamedTuple):
    words: tuple[str, ...]
    head_index: int

    @property
    def token(self) -> str:
        return "_".join(self.words)


@dataclass(frozen=True)
class NormalizedParagraph:
    tokens: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.tokens)


def chunk_noun_phrases(paragraph: TaggedParagraph) -> list[NounPhrase]:
    """All 2- and 3-token adjective/noun windows whose last token is a noun.

    Windows may overlap; enumeration is position-major (both windows starting
    at token i come before any window starting at i+1), shorter first.
    """
    tokens = paragraph.tokens
    phrases = []
    for start in range(len(tokens)):
        for length in PHRASE_LENGTHS:
            window = tokens[start : start + length]
            if len(window) < length:
                break
            if not all(is_chunk_tag(tok.pos) for tok in window):
                break
            if not is_noun_tag(window[-1].pos):
                continue
            words = tuple(tok.surface.lower() for tok in window)
            phrases.append(NounPhrase(words, head_index=length - 1))
    return phrases


def normalize_paragraph(paragraph: TaggedParagraph) -> NormalizedParagraph:
    """Lowercased kept-class surfaces in order, then the chunked phrases."""
    kept = [
        tok.surface.lower() for tok in paragraph.tokens if is_kept_tag(tok.pos)
    ]
    kept.extend(phrase.token for phrase in chunk_noun_phrases(paragraph))
    return NormalizedParagraph(tuple(kept))


@dataclass
class NormalizeStats:
    paragraphs_in: int = 0
    paragraphs_out: int = 0
    phrases_appended: int = 0
    bad_tokens: int = 0


def _normalize_line(line: str) -> tuple[str | None, bool, int, int]:
    """Worker: tagged line -> (output line or None, parsed?, phrases, bad tokens)."""
    stats = ReadStats()
    paragraph = parse_tagged_line(line, stats)
    if paragraph is None:
        return None, False, 0, stats.bad_tokens
    phrases = chunk_noun_phrases(paragraph)
    kept = [tok.surface.lower() for tok in paragraph.tokens if is_kept_tag(tok.pos)]
    kept.extend(phrase.token for phrase in phrases)
    if not kept:
        return None, True, 0, stats.bad_tokens
    return " ".join(kept), True, len(phrases), stats.bad_tokens


def normalize_corpus(
    in_path: str | os.PathLike,
    out_path: str | os.PathLike,
    workers: int = 1,
    header: dict[str, str] | None = None,
) -> NormalizeStats:
    """Normalize a tagged corpus file line by line, preserving input order.

    Paragraphs that filter to zero tokens are skipped. With ``workers > 1``
    lines are processed in parallel but written in input order, so the
    output bytes do not depend on the worker count.
    """
    stats = NormalizeStats()
    lines = (line for line in iter_data_lines(in_path) if line.strip())
    with open(out_path, "w", encoding="utf-8") as fh:
        if header:
            fh.write(format_header(header))
        for out_line, parsed, n_phrases, bad in map_lines(_normalize_line, lines, workers):
            stats.paragraphs_in += int(parsed)
            stats.phrases_appended += n_phrases
            stats.bad_tokens += bad
            if out_line is not None:
                fh.write(out_line + "\n")
                stats.paragraphs_out += 1
    return stats

