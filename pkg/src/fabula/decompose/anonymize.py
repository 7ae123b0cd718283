"""Entity anonymization and its inverse.

Each kept mention span collapses to one placeholder token `entK`. The
placeholder table records, per occurrence, where the placeholder sits in
the anonymized tokens, which placeholder id it carries, the original span
and the gold surface. Ids past the per-story cap are written as `<unk>`
but keep their table slot, so the gold round trip stays exact.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Hashable, Mapping, Optional, Sequence

from ..annotate import CorefCluster, EntityMention, Span
from ..corpus import (DEFAULT_PLACEHOLDERS, UNK, Story, TokenScheme,
                      placeholder_index, placeholder_token, tokenize)
from ..errors import MissingFillError, ValidationError

logger = logging.getLogger(__name__)


class EntityScheme(str, Enum):
    """How mentions are grouped under one placeholder."""

    NER = "ner"
    COREF = "coref"


@dataclass(frozen=True)
class PlaceholderSlot:
    placeholder: int
    position: int
    surface: Optional[tuple[str, ...]] = None
    source: Optional[Span] = None

    @property
    def text(self) -> Optional[str]:
        return None if self.surface is None else " ".join(self.surface)


@dataclass(frozen=True)
class PlaceholderTable:
    """Occurrence slots of every placeholder, ordered by position."""

    slots: tuple[PlaceholderSlot, ...]

    def __post_init__(self):
        positions = [slot.position for slot in self.slots]
        if positions != sorted(set(positions)):
            raise ValidationError("placeholder slots must have distinct increasing positions")
        seen = -1
        for slot in self.slots:
            if slot.placeholder > seen + 1:
                raise ValidationError(
                    f"placeholder ent{slot.placeholder} appears before ent{seen + 1}"
                )
            seen = max(seen, slot.placeholder)

    def __len__(self) -> int:
        return len(self.slots)

    @property
    def num_placeholders(self) -> int:
        return max((slot.placeholder for slot in self.slots), default=-1) + 1

    def occurrences(self, placeholder: int) -> list[PlaceholderSlot]:
        return [slot for slot in self.slots if slot.placeholder == placeholder]

    def surfaces(self, placeholder: int) -> list[tuple[str, ...]]:
        return [slot.surface for slot in self.occurrences(placeholder) if slot.surface is not None]

    def first_occurrence(self, slot: PlaceholderSlot) -> bool:
        return self.occurrences(slot.placeholder)[0] == slot


@dataclass(frozen=True)
class AnonymizedStory:
    """Story tokens with mentions replaced by placeholders."""

    tokens: tuple[str, ...]
    table: PlaceholderTable
    scheme: EntityScheme
    max_placeholders: int = DEFAULT_PLACEHOLDERS

    def __post_init__(self):
        object.__setattr__(self, "scheme", EntityScheme(self.scheme))
        expected = set()
        for slot in self.table.slots:
            if not 0 <= slot.position < len(self.tokens):
                raise ValidationError(f"placeholder slot at {slot.position} outside the story")
            token = self.tokens[slot.position]
            wanted = (
                placeholder_token(slot.placeholder)
                if slot.placeholder < self.max_placeholders else UNK
            )
            if token != wanted:
                raise ValidationError(f"token {token!r} at {slot.position} does not match its slot")
            expected.add(slot.position)
        for i, token in enumerate(self.tokens):
            if placeholder_index(token) is not None and i not in expected:
                raise ValidationError(f"placeholder {token} at {i} has no table slot")

    @classmethod
    def from_tokens(
        cls,
        tokens: Sequence[str],
        scheme: EntityScheme | str,
        max_placeholders: int = DEFAULT_PLACEHOLDERS,
    ) -> "AnonymizedStory":
        """Wrap generated tokens; slots carry no gold surface.

        Placeholders are renumbered by first appearance.
        """
        tokens = tuple(tokens)
        slots = [
            PlaceholderSlot(placeholder=placeholder_index(token), position=i)
            for i, token in enumerate(tokens)
            if placeholder_index(token) is not None
        ]
        order: dict[int, int] = {}
        for slot in slots:
            order.setdefault(slot.placeholder, len(order))
        slots = [
            PlaceholderSlot(placeholder=order[slot.placeholder], position=slot.position)
            for slot in slots
        ]
        renamed = list(tokens)
        for slot in slots:
            renamed[slot.position] = (
                placeholder_token(slot.placeholder)
                if slot.placeholder < max_placeholders else UNK
            )
        return cls(
            tokens=tuple(renamed),
            table=PlaceholderTable(tuple(slots)),
            scheme=scheme,
            max_placeholders=max_placeholders,
        )

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def overflowed(self) -> bool:
        return self.table.num_placeholders > self.max_placeholders

    @property
    def alignment(self) -> tuple[int, ...]:
        """Anonymized index of every original token.

        Only defined when all slots carry their source span.
        """
        if any(slot.source is None for slot in self.table.slots):
            raise ValidationError("alignment needs the source span of every slot")
        aligned: list[int] = []
        position = 0
        for slot in self.table.slots:
            while position < slot.position:
                aligned.append(position)
                position += 1
            aligned.extend([slot.position] * len(slot.source))
            position += 1
        aligned.extend(range(position, len(self.tokens)))
        return tuple(aligned)

    def project_span(self, span: Span) -> Span:
        """Map an original span onto the anonymized tokens."""
        alignment = self.alignment
        return Span(alignment[span.start], alignment[span.end - 1] + 1)

    def story(self) -> Story:
        return Story.from_tokens(self.tokens)

    def to_record(self, line: int):
        """Sidecar record of the placeholder table, keyed by `line`."""
        from .records import table_to_record
        return table_to_record(self, line)


def _resolve_overlaps(spans: Sequence[Span]) -> list[Span]:
    """Keep non-overlapping spans, preferring longer and then earlier ones."""
    kept: list[Span] = []
    for span in sorted(spans, key=lambda s: (-len(s), s.start)):
        if not any(span.overlaps(other) for other in kept):
            kept.append(span)
    return sorted(kept)


def _substitute(
    story: Story,
    assignments: Sequence[tuple[Span, Hashable]],
    scheme: EntityScheme,
    max_placeholders: int,
) -> AnonymizedStory:
    ids: dict[Hashable, int] = {}
    tokens: list[str] = []
    slots: list[PlaceholderSlot] = []
    cursor = 0
    for span, entity in sorted(assignments, key=lambda item: item[0]):
        tokens.extend(story.tokens[cursor:span.start])
        placeholder = ids.setdefault(entity, len(ids))
        slots.append(PlaceholderSlot(
            placeholder=placeholder,
            position=len(tokens),
            surface=span.tokens(story),
            source=span,
        ))
        tokens.append(placeholder_token(placeholder) if placeholder < max_placeholders else UNK)
        cursor = span.end
    tokens.extend(story.tokens[cursor:])

    anonymized = AnonymizedStory(
        tokens=tuple(tokens),
        table=PlaceholderTable(tuple(slots)),
        scheme=scheme,
        max_placeholders=max_placeholders,
    )
    if anonymized.overflowed:
        logger.warning(
            "Story has %d entities, more than the %d placeholders; extra ones become %s",
            anonymized.table.num_placeholders, max_placeholders, UNK,
        )
    return anonymized


def anonymize_ner(
    story: Story,
    mentions: Sequence[EntityMention],
    max_placeholders: int = DEFAULT_PLACEHOLDERS,
) -> AnonymizedStory:
    """Replace mentions; identical surfaces (case-sensitive) share a placeholder."""
    kept = _resolve_overlaps([m.span for m in mentions])
    assignments = [(span, span.tokens(story)) for span in kept]
    return _substitute(story, assignments, EntityScheme.NER, max_placeholders)


def anonymize_coref(
    story: Story,
    clusters: Sequence[CorefCluster],
    mentions: Sequence[EntityMention],
    max_placeholders: int = DEFAULT_PLACEHOLDERS,
) -> AnonymizedStory:
    """One placeholder per cluster; uncovered named mentions get fresh ones."""
    owner: dict[Span, Hashable] = {}
    for index, cluster in enumerate(clusters):
        for span in cluster.mentions:
            owner.setdefault(span, ("cluster", index))
    cluster_spans = list(owner)
    for mention in mentions:
        if not any(mention.span.overlaps(span) for span in cluster_spans):
            owner.setdefault(mention.span, ("mention", mention.span))

    kept = _resolve_overlaps(list(owner))
    assignments = [(span, owner[span]) for span in kept]
    return _substitute(story, assignments, EntityScheme.COREF, max_placeholders)


Fills = Mapping[int, str] | Sequence[str]


def gold_fills(anonymized: AnonymizedStory) -> Fills:
    """The gold table as fills: per id for NER, per occurrence for coref."""
    if any(slot.surface is None for slot in anonymized.table.slots):
        raise ValidationError("story has no gold surfaces to fill from")
    if anonymized.scheme is EntityScheme.NER:
        return {
            slot.placeholder: slot.text
            for slot in anonymized.table.slots
            if anonymized.table.first_occurrence(slot)
        }
    return [slot.text for slot in anonymized.table.slots]


def deanonymize(anonymized: AnonymizedStory, fills: Fills) -> tuple[str, ...]:
    """Replace every placeholder occurrence with the word tokens of its fill.

    NER fills map placeholder id to one string used for all its occurrences;
    coref fills list one string per occurrence in textual order.
    """
    slots = anonymized.table.slots
    if anonymized.scheme is EntityScheme.NER:
        if not isinstance(fills, Mapping):
            raise ValidationError("NER fills map placeholder ids to strings")
        missing = sorted({slot.placeholder for slot in slots} - set(fills))
        if missing:
            raise MissingFillError(f"no fill for {', '.join(f'ent{i}' for i in missing)}")
        texts = [fills[slot.placeholder] for slot in slots]
    else:
        if isinstance(fills, Mapping) or len(fills) != len(slots):
            got = "a mapping" if isinstance(fills, Mapping) else f"{len(fills)} fills"
            raise MissingFillError(
                f"coref fills need exactly one string per occurrence ({len(slots)} occurrences, got {got})"
            )
        texts = list(fills)

    tokens = list(anonymized.tokens)
    for slot, text in sorted(zip(slots, texts), key=lambda item: -item[0].position):
        replacement = tokenize(text, TokenScheme.WORD)
        if not replacement:
            raise MissingFillError(f"empty fill for ent{slot.placeholder} at {slot.position}")
        tokens[slot.position:slot.position + 1] = replacement
    return tuple(tokens)
