"""Deterministic posteriors: the intermediate z* built from an annotated story.

Training a decomposed model means training each stage separately on pairs
drawn from these posteriors; the stage losses sum to the decomposed bound
-log p(x|z*) - log p(z*).
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from ..annotate import AnnotatedStory, SrlFrame
from ..corpus import DEFAULT_PLACEHOLDERS, Prompt, Story
from ..errors import ValidationError
from .anonymize import (AnonymizedStory, EntityScheme, anonymize_coref,
                        anonymize_ner)
from .plan import SrlPlan, plan_source, serialize_srl_plan

TokenPair = tuple[tuple[str, ...], tuple[str, ...]]


class DecompositionScheme(str, Enum):
    SRL_PLAN = "srl-plan"
    NER_ANON = "ner-anon"
    COREF_ANON = "coref-anon"
    COMBINED = "combined"

    @property
    def has_plan(self) -> bool:
        return self in (DecompositionScheme.SRL_PLAN, DecompositionScheme.COMBINED)

    @property
    def has_entities(self) -> bool:
        return self is not DecompositionScheme.SRL_PLAN


@dataclass(frozen=True)
class AnnotatedExample:
    prompt: Prompt
    annotated: AnnotatedStory


@dataclass
class StageExamples:
    """Training pairs per stage for one decomposition scheme.

    `plan` holds prompt -> plan pairs, `story` holds (plan or prompt) ->
    (anonymized) story pairs and `fill` the anonymized stories whose gold
    tables supervise the reference filler.
    """

    scheme: DecompositionScheme
    plan: list[TokenPair] = field(default_factory=list)
    story: list[TokenPair] = field(default_factory=list)
    fill: list[AnonymizedStory] = field(default_factory=list)

    def extend(self, other: "StageExamples") -> None:
        self.plan.extend(other.plan)
        self.story.extend(other.story)
        self.fill.extend(other.fill)


def entity_scheme(
    scheme: DecompositionScheme | str,
    default: EntityScheme | str = EntityScheme.COREF,
) -> Optional[EntityScheme]:
    """Entity grouping used by a decomposition; `combined` takes `default`."""
    scheme = DecompositionScheme(scheme)
    if scheme is DecompositionScheme.NER_ANON:
        return EntityScheme.NER
    if scheme is DecompositionScheme.COREF_ANON:
        return EntityScheme.COREF
    if scheme is DecompositionScheme.COMBINED:
        return EntityScheme(default)
    return None


def anonymize(
    annotated: AnnotatedStory,
    scheme: EntityScheme | str,
    max_placeholders: int = DEFAULT_PLACEHOLDERS,
) -> AnonymizedStory:
    if EntityScheme(scheme) is EntityScheme.NER:
        return anonymize_ner(annotated.story, annotated.mentions, max_placeholders)
    return anonymize_coref(
        annotated.story, annotated.clusters, annotated.mentions, max_placeholders
    )


def _project_frame(
    frame: SrlFrame, anonymized: AnonymizedStory, story: Story
) -> Optional[SrlFrame]:
    predicate = anonymized.project_span(frame.predicate)
    sentence = story.sentence_of(predicate.start)
    first, last = story.sentence_span(sentence)
    if predicate.end > last:
        return None
    arguments = []
    for role, span in frame.arguments:
        projected = anonymized.project_span(span)
        if first <= projected.start and projected.end <= last:
            arguments.append((role, projected))
    return SrlFrame(predicate=predicate, arguments=tuple(arguments), sentence_index=sentence)


def anonymized_plan(annotated: AnnotatedStory, anonymized: AnonymizedStory) -> SrlPlan:
    """Plan over the anonymized story, mentions inside frames shown as placeholders."""
    story = anonymized.story()
    frames = [
        projected
        for frame in annotated.frames
        if (projected := _project_frame(frame, anonymized, story)) is not None
    ]
    return serialize_srl_plan(AnnotatedStory(story=story, frames=tuple(frames)))


def build_posterior(
    example: AnnotatedExample,
    scheme: DecompositionScheme | str,
    max_placeholders: int = DEFAULT_PLACEHOLDERS,
) -> TokenPair:
    """Return (z*, x) for one example.

    srl-plan gives the plan, ner-anon and coref-anon the anonymized story.
    combined gives the plan over the coref-anonymized story.
    """
    scheme = DecompositionScheme(scheme)
    annotated = example.annotated
    target = annotated.story.tokens
    if scheme is DecompositionScheme.SRL_PLAN:
        return serialize_srl_plan(annotated).tokens, target
    anonymized = anonymize(annotated, entity_scheme(scheme), max_placeholders)
    if scheme is DecompositionScheme.COMBINED:
        return anonymized_plan(annotated, anonymized).tokens, target
    return anonymized.tokens, target


def build_stage_examples(
    example: AnnotatedExample,
    scheme: DecompositionScheme | str,
    fill_scheme: EntityScheme | str = EntityScheme.COREF,
    max_placeholders: int = DEFAULT_PLACEHOLDERS,
) -> StageExamples:
    """Training pairs of every stage `scheme` trains.

    srl-plan: prompt -> plan -> story.
    ner-anon / coref-anon: prompt -> anonymized story, then fills.
    combined: prompt -> anonymized plan -> anonymized story, then fills
    grouped by `fill_scheme`.
    """
    scheme = DecompositionScheme(scheme)
    annotated = example.annotated
    prompt = example.prompt.tokens
    story = annotated.story.tokens
    if not prompt or not story:
        raise ValidationError("examples need a prompt and a story")

    stages = StageExamples(scheme=scheme)
    if scheme is DecompositionScheme.SRL_PLAN:
        plan = serialize_srl_plan(annotated).tokens
        stages.plan.append((prompt, plan))
        stages.story.append((plan_source(plan), story))
        return stages

    anonymized = anonymize(annotated, entity_scheme(scheme, fill_scheme), max_placeholders)
    if scheme is DecompositionScheme.COMBINED:
        plan = anonymized_plan(annotated, anonymized).tokens
        stages.plan.append((prompt, plan))
        stages.story.append((plan_source(plan), anonymized.tokens))
    else:
        stages.story.append((prompt, anonymized.tokens))
    stages.fill.append(anonymized)
    return stages
