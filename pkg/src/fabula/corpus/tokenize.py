"""Tokenization at word, byte-pair and character granularity.

The word scheme splits on whitespace and then peels leading and trailing
punctuation into single-character tokens; bracketed markers such as
`<newline>` stay whole. The character scheme is lossless: spaces become
the `▁` marker. The BPE scheme segments each whitespace word into
subunits, the word-final one carrying the `</w>` end-of-word suffix.
"""

from collections import Counter
from pathlib import Path
from typing import Iterable, Optional, Sequence

import regex as re

from ..errors import ValidationError
from .base import END_OF_WORD, SPACE_MARKER, TokenScheme

MergeTable = list[tuple[str, str]]

_EDGES = re.compile(r"^([\p{P}\p{S}]*)(.*?)([\p{P}\p{S}]*)$", re.DOTALL)
_MARKER = re.compile(r"<[^<>\s]+>")


def _word_tokens(text: str) -> list[str]:
    tokens: list[str] = []
    for chunk in text.split():
        if _MARKER.fullmatch(chunk):
            tokens.append(chunk)
            continue
        lead, core, trail = _EDGES.match(chunk).groups()
        tokens.extend(lead)
        if core:
            tokens.append(core)
        tokens.extend(trail)
    return tokens


def _initial_symbols(word: str) -> list[str]:
    return list(word[:-1]) + [word[-1] + END_OF_WORD]


def apply_bpe(word: str, merges: MergeTable) -> list[str]:
    """Segment one whitespace-free word with a learned merge table.

    Merges are applied in learned order: at every step the adjacent pair
    with the lowest merge rank is joined everywhere it occurs.
    """
    if not word:
        return []
    symbols = _initial_symbols(word)
    ranks = {pair: rank for rank, pair in enumerate(merges)}
    while len(symbols) > 1:
        candidates = [
            (ranks[pair], pair)
            for pair in zip(symbols, symbols[1:])
            if pair in ranks
        ]
        if not candidates:
            break
        _, (left, right) = min(candidates)
        merged: list[str] = []
        i = 0
        while i < len(symbols):
            if i < len(symbols) - 1 and symbols[i] == left and symbols[i + 1] == right:
                merged.append(left + right)
                i += 2
            else:
                merged.append(symbols[i])
                i += 1
        symbols = merged
    return symbols


def tokenize(
    text: str,
    scheme: TokenScheme | str,
    merges: Optional[MergeTable] = None,
) -> list[str]:
    """Tokenize `text` deterministically under `scheme`."""
    scheme = TokenScheme(scheme)
    if scheme is TokenScheme.WORD:
        return _word_tokens(text)
    if scheme is TokenScheme.CHARACTER:
        return [SPACE_MARKER if char == " " else char for char in text]
    tokens: list[str] = []
    for word in text.split():
        tokens.extend(apply_bpe(word, merges or []))
    return tokens


def detokenize(tokens: Sequence[str], scheme: TokenScheme | str) -> str:
    """Invert `tokenize`; exact for character and BPE, space-join for words."""
    scheme = TokenScheme(scheme)
    if scheme is TokenScheme.WORD:
        return " ".join(tokens)
    if scheme is TokenScheme.CHARACTER:
        return "".join(tokens).replace(SPACE_MARKER, " ")
    return "".join(tokens).replace(END_OF_WORD, " ").rstrip(" ")


def learn_bpe(corpus: Iterable[str], num_merges: int) -> MergeTable:
    """Learn `num_merges` greedy most-frequent-pair merges.

    Pair counts are weighted by word frequency; ties go to the
    lexicographically smallest pair.
    """
    if num_merges < 0:
        raise ValidationError("num_merges must be non-negative")
    word_counts = Counter(word for line in corpus for word in line.split())
    if not word_counts:
        raise ValidationError("cannot learn BPE merges from an empty corpus")

    segmented = {tuple(_initial_symbols(word)): count for word, count in word_counts.items()}
    merges: MergeTable = []
    for _ in range(num_merges):
        pair_counts: Counter = Counter()
        for symbols, count in segmented.items():
            for pair in zip(symbols, symbols[1:]):
                pair_counts[pair] += count
        if not pair_counts:
            break
        best = min(pair_counts.items(), key=lambda item: (-item[1], item[0]))[0]
        merges.append(best)

        updated: dict[tuple[str, ...], int] = {}
        for symbols, count in segmented.items():
            merged: list[str] = []
            i = 0
            while i < len(symbols):
                if i < len(symbols) - 1 and (symbols[i], symbols[i + 1]) == best:
                    merged.append(symbols[i] + symbols[i + 1])
                    i += 2
                else:
                    merged.append(symbols[i])
                    i += 1
            key = tuple(merged)
            updated[key] = updated.get(key, 0) + count
        segmented = updated
    return merges


def save_merges(merges: MergeTable, path: Path) -> None:
    path.write_text("".join(f"{left} {right}\n" for left, right in merges), encoding="utf-8")


def load_merges(path: Path) -> MergeTable:
    merges: MergeTable = []
    for number, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        parts = line.split(" ")
        if len(parts) != 2 or not all(parts):
            raise ValidationError(f"malformed merge {line!r}", line=number)
        merges.append((parts[0], parts[1]))
    return merges
