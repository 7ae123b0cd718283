"""Core corpus types and the reserved token inventory."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import regex as re

from ..errors import ValidationError

PAD = "<pad>"
UNK = "<unk>"
BOS = "<s>"
EOS = "</s>"
SENT = "<sent>"
FRAME = "<frame>"
SEP = "<sep>"
MENTION = "<mention>"
NULL = "<null>"
NEWLINE = "<newline>"

PLACEHOLDER_PREFIX = "ent"
SPACE_MARKER = "▁"
END_OF_WORD = "</w>"

SENTENCE_END = frozenset({".", "!", "?"})
CLOSING_QUOTES = frozenset({'"', "'", "”", "’", "»"})

_PLACEHOLDER = re.compile(r"ent(0|[1-9][0-9]*)")


class TokenScheme(str, Enum):
    """Granularity a text is tokenized at."""

    WORD = "word"
    BPE = "bpe"
    CHARACTER = "character"


def placeholder_token(index: int) -> str:
    return f"{PLACEHOLDER_PREFIX}{index}"


def placeholder_index(token: str) -> Optional[int]:
    """Return K for a placeholder token `entK`, None for anything else."""
    match = _PLACEHOLDER.fullmatch(token)
    return int(match.group(1)) if match else None


def is_placeholder(token: str) -> bool:
    return _PLACEHOLDER.fullmatch(token) is not None


def sentence_boundaries(tokens: Sequence[str]) -> tuple[int, ...]:
    """Exclusive end index of every sentence in `tokens`.

    A sentence ends after `.`, `!` or `?` (plus any closing quotes right
    after it) and after a `<newline>` marker. The final boundary is always
    the token count.
    """
    boundaries: list[int] = []
    i = 0
    n = len(tokens)
    while i < n:
        token = tokens[i]
        if token in SENTENCE_END:
            j = i + 1
            while j < n and tokens[j] in CLOSING_QUOTES:
                j += 1
            boundaries.append(j)
            i = j
            continue
        if token == NEWLINE:
            # a marker right after a sentence end joins that sentence
            if boundaries and boundaries[-1] == i:
                boundaries[-1] = i + 1
            elif i > 0:
                boundaries.append(i + 1)
        i += 1
    if n and (not boundaries or boundaries[-1] != n):
        boundaries.append(n)
    return tuple(boundaries)


@dataclass(frozen=True)
class Prompt:
    """Conditioning premise; `text` is the single-space join of `tokens`."""

    text: str
    tokens: tuple[str, ...]

    def __post_init__(self):
        if " ".join(self.tokens) != self.text:
            raise ValidationError("prompt text must equal its space-joined tokens")

    @classmethod
    def from_text(cls, text: str) -> "Prompt":
        from .tokenize import tokenize
        tokens = tuple(tokenize(text, TokenScheme.WORD))
        return cls(text=" ".join(tokens), tokens=tokens)


@dataclass(frozen=True)
class Story:
    """Word-tokenized story with sentence boundaries."""

    text: str
    tokens: tuple[str, ...]
    sentence_boundaries: tuple[int, ...] = field(default=())

    def __post_init__(self):
        bounds = self.sentence_boundaries
        if any(b <= a for a, b in zip(bounds, bounds[1:])):
            raise ValidationError("sentence boundaries must be strictly increasing")
        if self.tokens and (not bounds or bounds[-1] != len(self.tokens)):
            raise ValidationError("last sentence boundary must equal the token count")
        if not self.tokens and bounds:
            raise ValidationError("an empty story has no sentence boundaries")

    @classmethod
    def from_tokens(cls, tokens: Sequence[str]) -> "Story":
        tokens = tuple(tokens)
        return cls(
            text=" ".join(tokens),
            tokens=tokens,
            sentence_boundaries=sentence_boundaries(tokens),
        )

    @classmethod
    def from_text(cls, text: str) -> "Story":
        from .tokenize import tokenize
        return cls.from_tokens(tokenize(text, TokenScheme.WORD))

    def __len__(self) -> int:
        return len(self.tokens)

    def sentence_of(self, index: int) -> int:
        """Index of the sentence containing token `index`."""
        for sentence, end in enumerate(self.sentence_boundaries):
            if index < end:
                return sentence
        raise ValidationError(f"token index {index} outside story of {len(self)} tokens")

    def sentence_span(self, sentence: int) -> tuple[int, int]:
        start = self.sentence_boundaries[sentence - 1] if sentence > 0 else 0
        return start, self.sentence_boundaries[sentence]

    @property
    def num_sentences(self) -> int:
        return len(self.sentence_boundaries)


@dataclass(frozen=True)
class ParallelExample:
    """A prompt paired with its story."""

    prompt: Prompt
    story: Story

    def __post_init__(self):
        if not self.prompt.tokens or not self.story.tokens:
            raise ValidationError("prompt and story must both be non-empty")
