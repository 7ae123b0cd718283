"""Verb and entity diversity of annotated stories."""

import logging
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from ..annotate import AnnotatedStory, Annotator, VerbLexicon
from ..corpus import Story
from ..errors import ValidationError

logger = logging.getLogger(__name__)

TOP_VERBS = 5


class VerbSource(str, Enum):
    """Where verb tokens come from."""

    ANNOTATIONS = "annotations"
    LEXICON = "lexicon"


@dataclass(frozen=True)
class VerbDiversity:
    unique_verbs: float
    diverse_percent: float
    top_verbs: tuple[str, ...]
    source: VerbSource


@dataclass(frozen=True)
class CorefStats:
    chains: float
    names_per_chain: float


def _require(stories: Sequence) -> None:
    if not stories:
        raise ValidationError("no stories to evaluate")


def _name(tokens: Sequence[str]) -> str:
    return " ".join(tokens).casefold()


def story_verbs(annotated: AnnotatedStory, lexicon: VerbLexicon) -> list[str]:
    """Lemmas of every predicate, in frame order."""
    return [
        " ".join(lexicon.lemma(token.lower()) for token in annotated.surface(frame.predicate))
        for frame in annotated.frames
    ]


def annotate_verbs(stories: Sequence[Story], lexicon: VerbLexicon) -> list[AnnotatedStory]:
    """SRL-only annotation with the lexicon annotator, for stories without imports."""
    srl = Annotator.fallback(lexicon=lexicon).srl
    return [AnnotatedStory(story=story, frames=tuple(srl.frames(story))) for story in stories]


def top_verbs(verbs: Counter, n: int = TOP_VERBS) -> tuple[str, ...]:
    """The `n` most frequent lemmas; equal counts are broken alphabetically."""
    return tuple(sorted(verbs, key=lambda verb: (-verbs[verb], verb))[:n])


def verb_diversity(
    stories: Sequence[AnnotatedStory],
    lexicon: Optional[VerbLexicon] = None,
    source: VerbSource | str = VerbSource.ANNOTATIONS,
) -> VerbDiversity:
    """Mean unique verb lemmas per story and the share of verb tokens outside the top five.

    The top five are counted over the evaluated stories themselves, so the
    result does not depend on story order.
    """
    _require(stories)
    lexicon = lexicon or VerbLexicon.load()
    per_story = [story_verbs(annotated, lexicon) for annotated in stories]
    counts = Counter(verb for verbs in per_story for verb in verbs)
    top = top_verbs(counts)
    total = sum(counts.values())
    common = sum(counts[verb] for verb in top)
    diverse = 100.0 * (total - common) / total if total else 0.0
    unique = float(np.mean([len(set(verbs)) for verbs in per_story]))
    logger.debug("Verb diversity over %d stories: %.2f unique, %.1f%% diverse", len(stories), unique, diverse)
    return VerbDiversity(
        unique_verbs=unique,
        diverse_percent=diverse,
        top_verbs=top,
        source=VerbSource(source),
    )


def entity_name_diversity(stories: Sequence[AnnotatedStory]) -> float:
    """Mean count of distinct entity names per story, compared case-insensitively."""
    _require(stories)
    return float(np.mean([
        len({_name(mention.surface) for mention in annotated.mentions}) for annotated in stories
    ]))


def chain_names(annotated: AnnotatedStory) -> list[int]:
    """Distinct mention strings of every chain with at least two mentions."""
    return [
        len({_name(annotated.surface(span)) for span in cluster.mentions})
        for cluster in annotated.clusters
        if len(cluster.mentions) >= 2
    ]


def coref_cluster_stats(stories: Sequence[AnnotatedStory]) -> CorefStats:
    """Mean non-singleton chains per story and mean unique names per chain.

    A story without chains contributes 0 to the names average.
    """
    _require(stories)
    per_story = [chain_names(annotated) for annotated in stories]
    return CorefStats(
        chains=float(np.mean([len(names) for names in per_story])),
        names_per_chain=float(np.mean([np.mean(names) if names else 0.0 for names in per_story])),
    )
