"""Vocabulary construction and index encoding."""

from collections import Counter
from pathlib import Path
from typing import Iterable, Sequence

from ..errors import ValidationError
from .base import (BOS, EOS, FRAME, MENTION, NULL, PAD, SENT, SEP, UNK,
                   TokenScheme, placeholder_index, placeholder_token)

DEFAULT_PLACEHOLDERS = 64

_FIXED_SPECIALS = (PAD, UNK, BOS, EOS, SENT, FRAME, SEP, MENTION, NULL)


def special_tokens(num_placeholders: int = DEFAULT_PLACEHOLDERS) -> list[str]:
    """Reserved tokens in index order; `<pad>` is always index 0."""
    return list(_FIXED_SPECIALS) + [placeholder_token(i) for i in range(num_placeholders)]


class Vocabulary:
    """Ordered token inventory for one tokenization scheme.

    Entries are unique, every reserved token appears exactly once, and the
    padding token sits at index 0. Out-of-vocabulary tokens encode to `<unk>`.
    """

    def __init__(self, scheme: TokenScheme | str, entries: Sequence[str]):
        self.scheme = TokenScheme(scheme)
        self.entries = list(entries)
        self._index = {token: i for i, token in enumerate(self.entries)}
        self.num_placeholders = 0
        while placeholder_token(self.num_placeholders) in self._index:
            self.num_placeholders += 1
        self._validate()

    def _validate(self) -> None:
        if len(self._index) != len(self.entries):
            raise ValidationError("vocabulary entries must be unique")
        if not self.entries or self.entries[0] != PAD:
            raise ValidationError(f"{PAD} must be at index 0")
        for token in special_tokens(self.num_placeholders):
            if token not in self._index:
                raise ValidationError(f"vocabulary is missing reserved token {token}")

    @classmethod
    def build(
        cls,
        corpus: Iterable[Sequence[str]],
        scheme: TokenScheme | str,
        max_size: int,
        num_placeholders: int = DEFAULT_PLACEHOLDERS,
    ) -> "Vocabulary":
        """Keep the most frequent tokens up to `max_size` entries in total.

        Frequency ties are broken lexicographically, so the result does not
        depend on the order the corpus is iterated in.
        """
        specials = special_tokens(num_placeholders)
        if max_size <= len(specials):
            raise ValidationError(
                f"max_size {max_size} must exceed the {len(specials)} reserved tokens"
            )
        reserved = set(specials)
        counts = Counter(
            token
            for tokens in corpus
            for token in tokens
            if token not in reserved and placeholder_index(token) is None
        )
        ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
        kept = [token for token, _ in ranked[: max_size - len(specials)]]
        return cls(scheme, specials + kept)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, token: str) -> bool:
        return token in self._index

    def index(self, token: str) -> int:
        return self._index.get(token, self.unk_id)

    def token(self, index: int) -> str:
        if not 0 <= index < len(self.entries):
            raise ValidationError(f"token id {index} outside vocabulary of {len(self)}")
        return self.entries[index]

    def encode(self, tokens: Iterable[str]) -> list[int]:
        return [self.index(token) for token in tokens]

    def decode(self, ids: Iterable[int]) -> list[str]:
        return [self.token(i) for i in ids]

    @property
    def pad_id(self) -> int:
        return self._index[PAD]

    @property
    def unk_id(self) -> int:
        return self._index[UNK]

    @property
    def bos_id(self) -> int:
        return self._index[BOS]

    @property
    def eos_id(self) -> int:
        return self._index[EOS]

    @property
    def sent_id(self) -> int:
        return self._index[SENT]

    @property
    def frame_id(self) -> int:
        return self._index[FRAME]

    @property
    def sep_id(self) -> int:
        return self._index[SEP]

    @property
    def mention_id(self) -> int:
        return self._index[MENTION]

    def placeholder_id(self, index: int) -> int:
        return self._index[placeholder_token(index)]

    @property
    def placeholder_ids(self) -> frozenset[int]:
        return frozenset(self.placeholder_id(i) for i in range(self.num_placeholders))

    def save(self, path: Path) -> None:
        path.write_text("".join(f"{token}\n" for token in self.entries), encoding="utf-8")

    @classmethod
    def load(cls, path: Path, scheme: TokenScheme | str) -> "Vocabulary":
        return cls(scheme, path.read_text(encoding="utf-8").split("\n")[:-1])


def build_vocab(
    corpus: Iterable[Sequence[str]],
    scheme: TokenScheme | str,
    max_size: int,
    num_placeholders: int = DEFAULT_PLACEHOLDERS,
) -> Vocabulary:
    return Vocabulary.build(corpus, scheme, max_size, num_placeholders)
