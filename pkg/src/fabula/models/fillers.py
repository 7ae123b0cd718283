"""Reference fillers: turn placeholders back into entity references.

The NER filler predicts one string per placeholder id from the whole
anonymized story. The coref filler predicts one string per occurrence,
left to right, seeing a bag-of-words window around the occurrence, the
references already produced for the same placeholder and the story with
the current occurrence marked by `<mention>`.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Sequence

import torch

from ..corpus import (MENTION, NULL, SEP, MergeTable, TokenScheme, Vocabulary,
                      detokenize, placeholder_token, tokenize)
from ..decompose import AnonymizedStory, EntityScheme, Fills
from ..errors import StageError, ValidationError
from .seq2seq import DecodingModel

logger = logging.getLogger(__name__)

DEFAULT_WINDOW = 10
DEFAULT_MAX_FILL_TOKENS = 40


class ContextMode(str, Enum):
    FULL = "full"
    LEFT = "left"
    NONE = "none"


@dataclass(frozen=True)
class MentionContext:
    placeholder: int
    position: int
    window: tuple[str, ...]
    previous: tuple[str, ...]
    story: tuple[str, ...]

    @property
    def first(self) -> bool:
        return not self.previous


def bag_of_words(tokens: Sequence[str], position: int, width: int = DEFAULT_WINDOW) -> tuple[str, ...]:
    """Sorted tokens within `width` of `position`, the position itself excluded."""
    left = tokens[max(0, position - width):position]
    right = tokens[position + 1:position + 1 + width]
    return tuple(sorted([*left, *right]))


def mention_contexts(
    anonymized: AnonymizedStory,
    references: Optional[Sequence[str]] = None,
    width: int = DEFAULT_WINDOW,
) -> list[MentionContext]:
    """One context per occurrence, previous references taken from `references`.

    `references` lists one string per occurrence in textual order; the gold
    surfaces are used when it is omitted.
    """
    slots = anonymized.table.slots
    if references is None:
        if any(slot.surface is None for slot in slots):
            raise ValidationError("story has no gold surfaces for mention contexts")
        references = [slot.text for slot in slots]
    contexts = []
    seen: dict[int, list[str]] = {}
    for slot, reference in zip(slots, references):
        previous = seen.setdefault(slot.placeholder, [])
        contexts.append(MentionContext(
            placeholder=slot.placeholder,
            position=slot.position,
            window=bag_of_words(anonymized.tokens, slot.position, width),
            previous=tuple(previous),
            story=anonymized.tokens,
        ))
        previous.append(reference)
    return contexts


def ner_source(placeholder: int, story: Sequence[str]) -> list[str]:
    return [placeholder_token(placeholder), SEP, *story]


def coref_source(context: MentionContext, mode: ContextMode | str = ContextMode.FULL) -> list[str]:
    """[entK <sep> window <sep> previous refs joined by <sep> <sep> story]."""
    mode = ContextMode(mode)
    marked = list(context.story)
    marked[context.position] = MENTION
    if mode is ContextMode.LEFT:
        marked = marked[:context.position + 1]
    elif mode is ContextMode.NONE:
        marked = []
    previous: list[str] = []
    for i, reference in enumerate(context.previous):
        if i:
            previous.append(SEP)
        previous.extend(tokenize(reference, TokenScheme.WORD))
    return [placeholder_token(context.placeholder), SEP, *context.window, SEP, *previous, SEP, *marked]


def fill_examples(
    anonymized: AnonymizedStory,
    scheme: TokenScheme | str,
    merges: Optional[MergeTable] = None,
    mode: ContextMode | str = ContextMode.FULL,
    width: int = DEFAULT_WINDOW,
) -> list[tuple[list[str], list[str]]]:
    """Filler training pairs from a story's gold placeholder table."""
    table = anonymized.table
    if anonymized.scheme is EntityScheme.NER:
        return [
            (ner_source(slot.placeholder, anonymized.tokens), tokenize(slot.text, scheme, merges))
            for slot in table.slots
            if table.first_occurrence(slot)
        ]
    return [
        (coref_source(context, mode), tokenize(slot.text, scheme, merges))
        for context, slot in zip(mention_contexts(anonymized, width=width), table.slots)
    ]


@dataclass
class ReferenceFiller:
    """A trained filler with the vocabularies and options it was trained with."""

    model: DecodingModel
    source_vocab: Vocabulary
    target_vocab: Vocabulary
    entity_scheme: EntityScheme
    merges: MergeTable = field(default_factory=list)
    context_mode: ContextMode = ContextMode.FULL
    window: int = DEFAULT_WINDOW
    max_tokens: int = DEFAULT_MAX_FILL_TOKENS
    normalize: bool = True

    def __post_init__(self):
        self.entity_scheme = EntityScheme(self.entity_scheme)
        self.context_mode = ContextMode(self.context_mode)
        vocab = self.target_vocab
        self._banned = torch.tensor(sorted(
            {vocab.pad_id, vocab.unk_id, vocab.bos_id, vocab.sent_id, vocab.frame_id,
             vocab.sep_id, vocab.mention_id, vocab.index(NULL)} | vocab.placeholder_ids
        ))

    def source_tokens(self, context: MentionContext) -> list[str]:
        if self.entity_scheme is EntityScheme.NER:
            return ner_source(context.placeholder, context.story)
        return coref_source(context, self.context_mode)

    def decode(self, source: Sequence[str]) -> str:
        """Greedy decode of one reference; never returns an empty string."""
        source_ids = self.source_vocab.encode(source)
        eos = self.target_vocab.eos_id
        prefix = [self.target_vocab.bos_id]
        for step in range(self.max_tokens):
            logits = self.model.step(source_ids, prefix).logits.clone()
            logits[self._banned] = float("-inf")
            if step == 0:
                logits[eos] = float("-inf")
            token = int(torch.argmax(logits))
            if token == eos:
                break
            prefix.append(token)
        text = detokenize(self.target_vocab.decode(prefix[1:]), self.target_vocab.scheme).strip()
        if not text:
            raise StageError("fill", "filler produced an empty reference")
        return text

    def predict_ner(self, placeholder: int, anonymized: AnonymizedStory) -> str:
        if not anonymized.table.occurrences(placeholder):
            raise ValidationError(f"ent{placeholder} does not occur in the story")
        return self.decode(ner_source(placeholder, anonymized.tokens))

    def predict_coref(self, context: MentionContext) -> str:
        return self.decode(coref_source(context, self.context_mode))

    def fill(self, anonymized: AnonymizedStory) -> Fills:
        """Fills for every placeholder (NER) or every occurrence in order (coref)."""
        if anonymized.scheme is EntityScheme.NER:
            return {
                placeholder: self.predict_ner(placeholder, anonymized)
                for placeholder in range(anonymized.table.num_placeholders)
            }
        predictions: list[str] = []
        seen: dict[int, list[str]] = {}
        for slot in anonymized.table.slots:
            previous = seen.setdefault(slot.placeholder, [])
            context = MentionContext(
                placeholder=slot.placeholder,
                position=slot.position,
                window=bag_of_words(anonymized.tokens, slot.position, self.window),
                previous=tuple(previous),
                story=anonymized.tokens,
            )
            prediction = self.predict_coref(context)
            previous.append(prediction)
            predictions.append(prediction)
        logger.debug("Filled %d mentions", len(predictions))
        return predictions

    def score(self, context: MentionContext, candidate: str, normalize: Optional[bool] = None) -> float:
        """Log-likelihood of `candidate` (plus `</s>`) under teacher forcing.

        Mean per token by default; the sum when `normalize` is False.
        """
        target = self.target_vocab.encode(tokenize(candidate, self.target_vocab.scheme, self.merges))
        if not target:
            raise ValidationError("cannot score an empty candidate")
        target.append(self.target_vocab.eos_id)
        source_ids = self.source_vocab.encode(self.source_tokens(context))
        prefix = [self.target_vocab.bos_id]
        total = 0.0
        for token in target:
            logits = self.model.step(source_ids, prefix).logits
            total += torch.log_softmax(logits, dim=-1)[token].item()
            prefix.append(token)
        normalize = self.normalize if normalize is None else normalize
        return total / len(target) if normalize else total


def ner_fill_predict(placeholder: int, anonymized: AnonymizedStory, filler: ReferenceFiller) -> str:
    return filler.predict_ner(placeholder, anonymized)


def coref_fill_predict(context: MentionContext, filler: ReferenceFiller) -> str:
    return filler.predict_coref(context)


def score_mention(
    filler: ReferenceFiller,
    context: MentionContext,
    candidate: str,
    normalize: Optional[bool] = None,
) -> float:
    return filler.score(context, candidate, normalize)


def candidate_strings(stories: Iterable[AnonymizedStory]) -> list[str]:
    """Distinct gold reference strings across stories, in first-seen order."""
    seen: dict[str, None] = {}
    for story in stories:
        for slot in story.table.slots:
            if slot.text is not None:
                seen.setdefault(slot.text)
    return list(seen)
