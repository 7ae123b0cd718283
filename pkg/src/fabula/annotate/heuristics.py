"""Rule-based fallback annotators.

These stand in for pretrained SRL, NER and coreference systems so the
pipeline runs hermetically. They are deterministic and deliberately
simple; accuracy is not a goal.
"""

import logging
from typing import Iterable, Optional

import regex as re

from ..corpus import Story, is_placeholder
from .base import (DEFAULT_PRONOUNS, AnnotatedStory, CorefCluster,
                   CorefResolver, EntityLabel, EntityMention,
                   EntityRecognizer, Span, SrlAnnotator, SrlFrame)
from .lexicon import Gazetteer, VerbLexicon

logger = logging.getLogger(__name__)

CHUNK_STOPWORDS = frozenset({
    # conjunctions and subordinators
    "and", "or", "but", "so", "then", "because", "when", "while", "if",
    "that", "which", "who", "whom", "as", "until", "than",
    # prepositions
    "to", "of", "in", "on", "at", "by", "with", "from", "for", "into",
    "onto", "over", "under", "through", "after", "before", "about",
    "against", "between", "around", "across", "behind", "toward", "towards",
    "up", "down", "out", "off", "away", "back",
    # auxiliaries and negation
    "is", "am", "are", "was", "were", "be", "been", "being", "has", "have",
    "had", "will", "would", "shall", "should", "can", "could", "may",
    "might", "must", "not", "never",
})

_WORDLIKE = re.compile(r"[\p{L}\p{N}]")
_MARKER = re.compile(r"<[^<>\s]+>")


def _is_wordlike(token: str) -> bool:
    return bool(_WORDLIKE.search(token)) and not _MARKER.fullmatch(token)


class LexiconSrl(SrlAnnotator):
    """Every lexicon verb is a predicate; ARG0 and ARG1 are the chunks around it.

    A chunk is the maximal run of tokens next to the verb that are neither
    punctuation, stopwords nor other lexicon verbs, kept inside the
    verb's sentence.
    """

    def __init__(self, lexicon: VerbLexicon):
        self.lexicon = lexicon

    def _chunkable(self, token: str) -> bool:
        return (
            _is_wordlike(token)
            and token.lower() not in CHUNK_STOPWORDS
            and not self.lexicon.is_verb(token)
        )

    def frames(self, story: Story) -> list[SrlFrame]:
        frames = []
        for sentence in range(story.num_sentences):
            first, last = story.sentence_span(sentence)
            for i in range(first, last):
                if not _is_wordlike(story.tokens[i]) or not self.lexicon.is_verb(story.tokens[i]):
                    continue
                arguments = []
                left = i
                while left > first and self._chunkable(story.tokens[left - 1]):
                    left -= 1
                if left < i:
                    arguments.append(("ARG0", Span(left, i)))
                right = i + 1
                while right < last and self._chunkable(story.tokens[right]):
                    right += 1
                if right > i + 1:
                    arguments.append(("ARG1", Span(i + 1, right)))
                frames.append(SrlFrame(
                    predicate=Span(i, i + 1),
                    arguments=tuple(arguments),
                    sentence_index=sentence,
                ))
        return frames


DETERMINERS = frozenset({
    "the", "a", "an", "this", "that", "these", "those",
    "my", "his", "her", "its", "our", "your", "their",
})

_NON_NAMES = DETERMINERS | CHUNK_STOPWORDS | DEFAULT_PRONOUNS


class CapitalizationNer(EntityRecognizer):
    """Gazetteer hits (longest first), then runs of capitalized tokens.

    Capitalized runs exclude the pronoun "I", bracketed markers and
    placeholders, and are labeled PERSON. The first word of a sentence only
    starts a run when the run continues past it, or when it repeats a name
    found elsewhere (a whole name or its first or last token); sentence
    initial function words (determiners, pronouns, stopwords) never do.
    """

    def __init__(self, gazetteer: Optional[Gazetteer] = None):
        self.gazetteer = gazetteer or Gazetteer()

    @staticmethod
    def _sentence_initial(story: Story) -> set[int]:
        initial = set()
        for sentence in range(story.num_sentences):
            first, last = story.sentence_span(sentence)
            for i in range(first, last):
                if _is_wordlike(story.tokens[i]):
                    initial.add(i)
                    break
        return initial

    @staticmethod
    def _capitalized(token: str) -> bool:
        return (
            token[:1].isupper()
            and token != "I"
            and not _MARKER.fullmatch(token)
            and not is_placeholder(token)
        )

    def mentions(self, story: Story) -> list[EntityMention]:
        tokens = story.tokens
        covered = [False] * len(tokens)
        mentions = []

        i = 0
        while i < len(tokens):
            hit = self.gazetteer.match(tokens, i)
            if hit is None:
                i += 1
                continue
            length, label = hit
            span = Span(i, i + length)
            mentions.append(EntityMention(span=span, label=label, surface=span.tokens(story)))
            covered[i:i + length] = [True] * length
            i += length

        def free(j: int) -> bool:
            return j < len(tokens) and not covered[j] and self._capitalized(tokens[j])

        initial = self._sentence_initial(story)
        runs: list[Span] = []
        pending: list[int] = []
        i = 0
        while i < len(tokens):
            if not free(i):
                i += 1
                continue
            if i in initial:
                if tokens[i].lower() in _NON_NAMES:
                    i += 1
                    continue
                if not (free(i + 1) and i + 1 not in initial):
                    pending.append(i)
                    i += 1
                    continue
            end = i + 1
            while free(end) and end not in initial:
                end += 1
            runs.append(Span(i, end))
            i = end

        names = set()
        for span in runs:
            surface = span.tokens(story)
            names.update({surface, surface[:1], surface[-1:]})
        runs.extend(Span(i, i + 1) for i in pending if (tokens[i],) in names)

        mentions.extend(
            EntityMention(span=span, label=EntityLabel.PERSON, surface=span.tokens(story))
            for span in runs
        )
        return sorted(mentions, key=lambda m: m.span)


class _UnionFind:
    def __init__(self, size: int):
        self.parent = list(range(size))

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, a: int, b: int) -> None:
        a, b = self.find(a), self.find(b)
        if a != b:
            self.parent[max(a, b)] = min(a, b)


def _head_match(a: tuple[str, ...], b: tuple[str, ...]) -> bool:
    if len(a) == 1 and len(b) > 1:
        return a[0] in (b[0], b[-1])
    if len(b) == 1 and len(a) > 1:
        return b[0] in (a[0], a[-1])
    return False


class StringMatchCoref(CorefResolver):
    """Cluster mentions by surface and head match, then attach pronouns.

    Two mentions corefer when their lowercased surfaces are equal, or when a
    single-token mention equals the first or final token of a longer one.
    Each pronoun joins the group whose most recent mention precedes it most
    closely. Groups left with one mention are dropped.
    """

    def __init__(self, pronouns: Iterable[str] = DEFAULT_PRONOUNS):
        self.pronouns = frozenset(p.lower() for p in pronouns)

    def clusters(self, story: Story, mentions: list[EntityMention]) -> list[CorefCluster]:
        mentions = sorted(mentions, key=lambda m: m.span)
        surfaces = [tuple(t.lower() for t in m.surface) for m in mentions]
        groups = _UnionFind(len(mentions))
        for i in range(len(mentions)):
            for j in range(i + 1, len(mentions)):
                if surfaces[i] == surfaces[j] or _head_match(surfaces[i], surfaces[j]):
                    groups.union(i, j)

        members: dict[int, list[Span]] = {}
        covered = set()
        events: list[tuple[int, int, Optional[int]]] = []
        for i, mention in enumerate(mentions):
            covered.update(range(mention.span.start, mention.span.end))
            events.append((mention.span.start, 0, i))
        for position, token in enumerate(story.tokens):
            if token.lower() in self.pronouns and position not in covered:
                events.append((position, 1, None))

        latest: dict[int, int] = {}
        for position, _, index in sorted(events, key=lambda e: (e[0], e[1])):
            if index is not None:
                root = groups.find(index)
                members.setdefault(root, []).append(mentions[index].span)
                latest[root] = position
                continue
            if not latest:
                continue
            root = max(latest, key=lambda r: (latest[r], -r))
            members[root].append(Span(position, position + 1))
            latest[root] = position

        clusters = [
            CorefCluster(mentions=tuple(sorted(spans)))
            for spans in members.values()
            if len(spans) >= 2
        ]
        return sorted(clusters, key=lambda c: c.mentions[0])


def heuristic_srl(story: Story, verb_lexicon: VerbLexicon) -> list[SrlFrame]:
    return LexiconSrl(verb_lexicon).frames(story)


def heuristic_ner(story: Story, gazetteer: Optional[Gazetteer] = None) -> list[EntityMention]:
    return CapitalizationNer(gazetteer).mentions(story)


def heuristic_coref(
    mentions: list[EntityMention],
    story: Story,
    pronoun_list: Iterable[str] = DEFAULT_PRONOUNS,
) -> list[CorefCluster]:
    return StringMatchCoref(pronoun_list).clusters(story, mentions)


class Annotator:
    """Runs an SRL annotator, an entity recognizer and a coref resolver over a story."""

    def __init__(
        self,
        srl: SrlAnnotator,
        ner: EntityRecognizer,
        coref: CorefResolver,
    ):
        self.srl = srl
        self.ner = ner
        self.coref = coref

    @classmethod
    def fallback(
        cls,
        lexicon: Optional[VerbLexicon] = None,
        gazetteer: Optional[Gazetteer] = None,
        pronouns: Iterable[str] = DEFAULT_PRONOUNS,
    ) -> "Annotator":
        return cls(
            srl=LexiconSrl(lexicon or VerbLexicon.load()),
            ner=CapitalizationNer(gazetteer),
            coref=StringMatchCoref(pronouns),
        )

    def annotate(self, story: Story) -> AnnotatedStory:
        mentions = self.ner.mentions(story)
        annotated = AnnotatedStory(
            story=story,
            frames=tuple(self.srl.frames(story)),
            mentions=tuple(mentions),
            clusters=tuple(self.coref.clusters(story, mentions)),
        )
        logger.debug(
            "Annotated story: %d frames, %d mentions, %d clusters",
            len(annotated.frames), len(annotated.mentions), len(annotated.clusters),
        )
        return annotated
