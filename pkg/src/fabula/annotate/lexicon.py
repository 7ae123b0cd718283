"""Verb lexicon, lemmatizer and entity gazetteer used by the fallback annotators.

The verb lexicon file has one verb per line: the lemma followed by any
irregular forms, whitespace separated (`eat ate eaten eats eating`). Lines
starting with `#` are comments.

The gazetteer file has one entry per line: a label then the entry tokens
(`LOC gondor`, `PERSON bilbo baggins`). Matching is case-insensitive.
"""

from importlib import resources
from pathlib import Path
from typing import Iterable, Optional, Sequence

from ..corpus import read_lines
from ..errors import ValidationError
from .base import EntityLabel

DEFAULT_VERB_LEXICON = "verbs.txt"

# (suffix, replacement, shortest remaining stem) tried in order for unlisted forms
_SUFFIX_RULES = (
    ("ies", "y", 1),
    ("ied", "y", 1),
    ("ying", "y", 1),
    ("ing", "", 2),
    ("ing", "e", 2),
    ("ed", "", 3),
    ("ed", "e", 3),
    ("es", "", 3),
    ("s", "", 3),
)


def _parse_lines(lines: Iterable[str]) -> list[tuple[int, list[str]]]:
    parsed = []
    for number, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parsed.append((number, line.split()))
    return parsed


class VerbLexicon:
    """Known verb forms mapped to their lemmas."""

    def __init__(self, entries: dict[str, Sequence[str]]):
        self._forms: dict[str, str] = {}
        for lemma, forms in entries.items():
            lemma = lemma.lower()
            self._forms[lemma] = lemma
            for form in forms:
                self._forms.setdefault(form.lower(), lemma)
        self.lemmas = frozenset(self._forms.values())

    @classmethod
    def from_lines(cls, lines: Iterable[str]) -> "VerbLexicon":
        return cls({words[0]: words[1:] for _, words in _parse_lines(lines)})

    @classmethod
    def load(cls, path: Optional[Path] = None) -> "VerbLexicon":
        """Load a lexicon file, or the packaged default when `path` is None."""
        if path is None:
            text = resources.files("fabula.resources").joinpath(DEFAULT_VERB_LEXICON).read_text(
                encoding="utf-8"
            )
            return cls.from_lines(text.splitlines())
        return cls.from_lines(read_lines(path))

    def __len__(self) -> int:
        return len(self.lemmas)

    def _strip(self, word: str) -> Optional[str]:
        for suffix, replacement, shortest in _SUFFIX_RULES:
            base = word[: -len(suffix)]
            if not word.endswith(suffix) or len(base) < shortest:
                continue
            stem = base + replacement
            if stem in self.lemmas:
                return stem
            # running -> run, stopped -> stop
            if not replacement and len(stem) > 2 and stem[-1] == stem[-2] and stem[:-1] in self.lemmas:
                return stem[:-1]
        return None

    def lemma(self, word: str) -> str:
        """Lemma of `word`: listed forms first, then suffix stripping.

        Words the rules cannot tie to a known lemma come back lowercased.
        """
        word = word.lower()
        if word in self._forms:
            return self._forms[word]
        return self._strip(word) or word

    def is_verb(self, word: str) -> bool:
        word = word.lower()
        return word in self._forms or self._strip(word) is not None


class Gazetteer:
    """Case-insensitive multi-token entity list with longest-match lookup."""

    def __init__(self, entries: dict[tuple[str, ...], EntityLabel] | None = None):
        self.entries = {
            tuple(token.lower() for token in key): EntityLabel(label)
            for key, label in (entries or {}).items()
        }
        self.max_length = max((len(key) for key in self.entries), default=0)

    @classmethod
    def from_lines(cls, lines: Iterable[str]) -> "Gazetteer":
        entries = {}
        for number, words in _parse_lines(lines):
            if len(words) < 2:
                raise ValidationError("gazetteer entry needs a label and a name", line=number)
            try:
                label = EntityLabel(words[0].upper())
            except ValueError as e:
                raise ValidationError(f"unknown entity label {words[0]!r}", line=number) from e
            entries[tuple(words[1:])] = label
        return cls(entries)

    @classmethod
    def load(cls, path: Optional[Path] = None) -> "Gazetteer":
        if path is None:
            return cls()
        return cls.from_lines(read_lines(path))

    def __len__(self) -> int:
        return len(self.entries)

    def match(self, tokens: Sequence[str], start: int) -> Optional[tuple[int, EntityLabel]]:
        """Longest entry starting at `start` as (length, label), if any."""
        for length in range(min(self.max_length, len(tokens) - start), 0, -1):
            key = tuple(token.lower() for token in tokens[start:start + length])
            if key in self.entries:
                return length, self.entries[key]
        return None
