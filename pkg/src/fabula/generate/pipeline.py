"""Prompt to story through the stages of a pipeline bundle.

    plan   = sample(plan model, prompt)                  srl-plan, combined
    anon   = sample(story model, plan or prompt)         an empty plan reads as <null>
    fills  = filler(anon)                                ner-anon, coref-anon, combined
    story  = deanonymize(anon, fills)

Every stage draws from its own random substream derived from the run
seed and the example id, so a rerun reproduces all intermediates.
"""

import logging
from typing import Optional, Sequence

from pydantic import BaseModel, Field

from ..corpus import DEFAULT_PLACEHOLDERS, Prompt, Story
from ..decompose import AnonymizedStory, deanonymize, plan_source
from ..errors import FabulaError, StageError, ValidationError
from ..models import PipelineBundle
from ..seeding import torch_generator
from .sampling import (STRUCTURAL_TOKENS, GenerationConfig, count_words,
                       generate_sequence)

logger = logging.getLogger(__name__)


class ProvenanceRecord(BaseModel):
    """All intermediates of one generation."""

    example: int = Field(..., ge=0)
    seed: int
    scheme: str
    prompt: list[str]
    plan: Optional[list[str]] = None
    anonymized: Optional[list[str]] = None
    fills: Optional[dict[int, str] | list[str]] = None
    story: list[str]
    words: int
    flagged: bool = False


def _stage(name: str, action, *args, **kwargs):
    try:
        return action(*args, **kwargs)
    except StageError:
        raise
    except FabulaError as e:
        raise StageError(name, str(e)) from e


def run_pipeline(
    prompt: Prompt | Sequence[str],
    bundle: PipelineBundle,
    config: GenerationConfig,
    seed: int,
    example: int = 0,
    max_placeholders: int = DEFAULT_PLACEHOLDERS,
) -> tuple[Story, ProvenanceRecord]:
    """Generate one story and the record of how it was made."""
    tokens = list(prompt.tokens if isinstance(prompt, Prompt) else prompt)
    if not tokens:
        raise ValidationError("prompt is empty")
    flagged = False

    source = tokens
    plan = None
    if bundle.plan is not None:
        stage = bundle.plan
        result = _stage(
            "plan", generate_sequence,
            stage.model, stage.source_vocab.encode(tokens), stage.target_vocab, config,
            torch_generator(seed, "generate", example, "plan"),
            min_words=config.plan_min_words, copy=False,
        )
        plan = list(result.tokens)
        if not plan:
            logger.debug("Example %d: empty plan", example)
        flagged |= result.flagged
        source = list(plan_source(plan))

    stage = bundle.story
    result = _stage(
        "story", generate_sequence,
        stage.model, stage.source_vocab.encode(source), stage.target_vocab, config,
        torch_generator(seed, "generate", example, "story"),
        banned_tokens=STRUCTURAL_TOKENS,
    )
    flagged |= result.flagged
    generated = list(result.tokens)

    anonymized = fills = None
    if bundle.filler is not None:
        anon = _stage(
            "fill", AnonymizedStory.from_tokens,
            generated, bundle.filler.entity_scheme, max_placeholders,
        )
        fills = _stage("fill", bundle.filler.fill, anon)
        story_tokens = _stage("fill", deanonymize, anon, fills)
        anonymized = list(anon.tokens)
    else:
        story_tokens = tuple(generated)

    story = _stage("story", Story.from_tokens, story_tokens)
    record = ProvenanceRecord(
        example=example,
        seed=seed,
        scheme=bundle.scheme.value,
        prompt=tokens,
        plan=plan,
        anonymized=anonymized,
        fills=fills if fills is None or isinstance(fills, dict) else list(fills),
        story=list(story.tokens),
        words=count_words(story.tokens),
        flagged=flagged,
    )
    logger.debug("Example %d: %d words", example, record.words)
    return story, record
