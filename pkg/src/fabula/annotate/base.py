"""Annotation types and annotator interfaces.

Spans index word-scheme tokens of a Story, half-open: [start, end).
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum

import regex as re

from ..corpus import Story
from ..errors import AnnotationError

ROLE_PATTERN = re.compile(r"ARG[0-5]|ARGM-[A-Z]+")
CORE_ROLES = ("ARG0", "ARG1", "ARG2", "ARG3", "ARG4", "ARG5")

DEFAULT_PRONOUNS = frozenset({
    "he", "she", "it", "they", "him", "her", "them", "his", "hers", "its", "their",
})


class EntityLabel(str, Enum):
    PERSON = "PERSON"
    ORG = "ORG"
    LOC = "LOC"


def is_core_role(role: str) -> bool:
    return role in CORE_ROLES


@dataclass(frozen=True, order=True)
class Span:
    start: int
    end: int

    def __post_init__(self):
        if not 0 <= self.start < self.end:
            raise AnnotationError(f"invalid span [{self.start}, {self.end})")

    def __len__(self) -> int:
        return self.end - self.start

    def overlaps(self, other: "Span") -> bool:
        return self.start < other.end and other.start < self.end

    def contains(self, other: "Span") -> bool:
        return self.start <= other.start and other.end <= self.end

    def tokens(self, story: Story) -> tuple[str, ...]:
        return story.tokens[self.start:self.end]


@dataclass(frozen=True)
class SrlFrame:
    predicate: Span
    arguments: tuple[tuple[str, Span], ...]
    sentence_index: int

    def __post_init__(self):
        for role, _ in self.arguments:
            if not ROLE_PATTERN.fullmatch(role):
                raise AnnotationError(f"unknown role label {role!r}")

    def core_arguments(self) -> list[tuple[str, Span]]:
        """Core arguments in canonical ARG0 < ARG1 < ... < ARG5 order."""
        core = [(role, span) for role, span in self.arguments if is_core_role(role)]
        return sorted(core, key=lambda item: (CORE_ROLES.index(item[0]), item[1]))


@dataclass(frozen=True)
class EntityMention:
    span: Span
    label: EntityLabel
    surface: tuple[str, ...]

    @property
    def text(self) -> str:
        return " ".join(self.surface)


@dataclass(frozen=True)
class CorefCluster:
    mentions: tuple[Span, ...]

    def __post_init__(self):
        if len(self.mentions) < 2:
            raise AnnotationError("a coreference cluster needs at least two mentions")
        for left, right in zip(self.mentions, self.mentions[1:]):
            if right.start < left.start:
                raise AnnotationError("cluster mentions must be ordered by start index")
            if left.overlaps(right):
                raise AnnotationError(f"overlapping mentions {left} and {right} in one cluster")


@dataclass(frozen=True)
class AnnotatedStory:
    """A story with SRL frames, entity mentions and coreference clusters.

    Frames, mentions and clusters are stored in canonical order; every span
    is checked against the story on construction.
    """

    story: Story
    frames: tuple[SrlFrame, ...] = field(default=())
    mentions: tuple[EntityMention, ...] = field(default=())
    clusters: tuple[CorefCluster, ...] = field(default=())

    def __post_init__(self):
        frames = tuple(sorted(
            self.frames,
            key=lambda f: (f.sentence_index, f.predicate.start, f.predicate.end),
        ))
        mentions = tuple(sorted(self.mentions, key=lambda m: m.span))
        clusters = tuple(sorted(self.clusters, key=lambda c: c.mentions[0]))
        object.__setattr__(self, "frames", frames)
        object.__setattr__(self, "mentions", mentions)
        object.__setattr__(self, "clusters", clusters)
        self._validate()

    def _check(self, span: Span) -> None:
        if span.end > len(self.story):
            raise AnnotationError(
                f"span [{span.start}, {span.end}) exceeds story of {len(self.story)} tokens"
            )

    def _validate(self) -> None:
        for frame in self.frames:
            self._check(frame.predicate)
            if not 0 <= frame.sentence_index < self.story.num_sentences:
                raise AnnotationError(f"sentence index {frame.sentence_index} out of range")
            first, last = self.story.sentence_span(frame.sentence_index)
            if not (first <= frame.predicate.start and frame.predicate.end <= last):
                raise AnnotationError(
                    f"predicate {frame.predicate} is not in sentence {frame.sentence_index}"
                )
            for role, span in frame.arguments:
                self._check(span)
                if not (first <= span.start and span.end <= last):
                    raise AnnotationError(f"{role} {span} leaves sentence {frame.sentence_index}")
        for mention in self.mentions:
            self._check(mention.span)
            if mention.surface != mention.span.tokens(self.story):
                raise AnnotationError(f"mention surface does not match tokens at {mention.span}")
        for cluster in self.clusters:
            for span in cluster.mentions:
                self._check(span)

    def surface(self, span: Span) -> tuple[str, ...]:
        return span.tokens(self.story)


class SrlAnnotator(ABC):
    """Base class for semantic role labellers."""

    @abstractmethod
    def frames(self, story: Story) -> list[SrlFrame]:
        """Identify predicates and their arguments, in canonical order."""
        pass


class EntityRecognizer(ABC):
    """Base class for named-entity recognizers."""

    @abstractmethod
    def mentions(self, story: Story) -> list[EntityMention]:
        """Identify non-overlapping person, organization and location mentions."""
        pass


class CorefResolver(ABC):
    """Base class for coreference resolvers."""

    @abstractmethod
    def clusters(self, story: Story, mentions: list[EntityMention]) -> list[CorefCluster]:
        """Group mentions (and any further references) into clusters."""
        pass
