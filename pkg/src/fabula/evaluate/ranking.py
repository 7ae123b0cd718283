"""Entity-ranking accuracy of a reference filler.

Every gold mention is ranked against `n - 1` distractors drawn without
replacement from the other gold reference strings of the test set. A case
counts as correct only when the true string scores strictly highest.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from ..decompose import AnonymizedStory
from ..errors import ValidationError
from ..models import DEFAULT_WINDOW, MentionContext, mention_contexts

logger = logging.getLogger(__name__)

RANKING_SIZES = (10, 50, 100)

Scorer = Callable[[MentionContext, str], float]


@dataclass(frozen=True)
class RankingCase:
    context: MentionContext
    truth: str

    @property
    def first(self) -> bool:
        return self.context.first


@dataclass(frozen=True)
class RankingAccuracy:
    n: int
    first: Optional[float]
    subsequent: Optional[float]
    first_cases: int
    subsequent_cases: int


def ranking_cases(stories: Iterable[AnonymizedStory], width: int = DEFAULT_WINDOW) -> list[RankingCase]:
    """One case per gold mention, previous references taken from the gold table."""
    cases = []
    for story in stories:
        contexts = mention_contexts(story, width=width)
        cases.extend(
            RankingCase(context=context, truth=slot.text)
            for context, slot in zip(contexts, story.table.slots)
        )
    return cases


def _accuracy(hits: list[bool]) -> Optional[float]:
    return float(np.mean(hits)) if hits else None


def entity_ranking(
    scorer: Scorer,
    cases: Sequence[RankingCase],
    n: int,
    rng: np.random.Generator,
) -> RankingAccuracy:
    """Accuracy of ranking the true reference first among `n` candidates.

    `scorer` is typically `ReferenceFiller.score`. Ties are failures.
    """
    if n < 2:
        raise ValidationError("ranking needs at least one distractor")
    pool = list(dict.fromkeys(case.truth for case in cases))
    if len(pool) - 1 < n - 1:
        raise ValidationError(
            f"ranking with n={n} needs {n - 1} distractors, the test set has {len(pool) - 1}"
        )
    hits: dict[bool, list[bool]] = {True: [], False: []}
    for case in cases:
        others = [candidate for candidate in pool if candidate != case.truth]
        chosen = rng.choice(len(others), size=n - 1, replace=False)
        truth_score = scorer(case.context, case.truth)
        best_distractor = max(scorer(case.context, others[i]) for i in chosen)
        hits[case.first].append(truth_score > best_distractor)
    result = RankingAccuracy(
        n=n,
        first=_accuracy(hits[True]),
        subsequent=_accuracy(hits[False]),
        first_cases=len(hits[True]),
        subsequent_cases=len(hits[False]),
    )
    logger.debug("Ranking n=%d: first %s, subsequent %s", n, result.first, result.subsequent)
    return result
