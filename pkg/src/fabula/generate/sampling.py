"""Top-k sampling and length-controlled autoregressive decoding.

Length rules, in words (see `count_words`):

* `</s>` is suppressed until the sequence holds `min_words` words.
* Once `max_words` is reached, decoding stops at the next sentence end;
  one extra token is drawn so a closing quote stays with its sentence.
* With no sentence end by `max_words + slack`, the sequence is cut there
  and flagged; so is a sequence that reaches `max_tokens` tokens.
"""

import logging
from dataclasses import dataclass
from typing import Collection, Optional, Sequence

import regex as re
import torch
from pydantic import BaseModel, Field, model_validator

from ..corpus import (CLOSING_QUOTES, FRAME, MENTION, NULL, SENT,
                      SENTENCE_END, SEP, Vocabulary, is_placeholder)
from ..errors import ValidationError
from ..models import DecodingModel, decode_step_with_copy

logger = logging.getLogger(__name__)

_WORDLIKE = re.compile(r"[\p{L}\p{N}]")

# Plan and filler delimiters; a story never contains them.
STRUCTURAL_TOKENS = (SENT, FRAME, SEP, MENTION, NULL)


class GenerationConfig(BaseModel):
    temperature: float = Field(0.8, gt=0)
    k: int = Field(10, ge=1)
    min_words: int = Field(150, ge=0)
    max_words: int = Field(250, ge=1)
    slack: int = Field(100, ge=0)
    max_tokens: int = Field(4000, ge=1)
    plan_min_words: int = Field(0, ge=0)
    banned_tokens: list[str] = Field(default_factory=list)
    copy_threshold: float = Field(0.5, ge=0.0, le=1.0)

    @model_validator(mode="after")
    def _check_lengths(self) -> "GenerationConfig":
        if self.min_words > self.max_words:
            raise ValueError(f"min_words {self.min_words} exceeds max_words {self.max_words}")
        return self


@dataclass(frozen=True)
class GeneratedSequence:
    tokens: tuple[str, ...]
    copied: tuple[int, ...] = ()
    flagged: bool = False


def is_word(token: str) -> bool:
    """Placeholders and tokens with a letter or digit count as words."""
    if is_placeholder(token):
        return True
    if token.startswith("<") and token.endswith(">"):
        return False
    return bool(_WORDLIKE.search(token))


def count_words(tokens: Sequence[str]) -> int:
    return sum(1 for token in tokens if is_word(token))


def trim_to_words(tokens: Sequence[str], n: int) -> tuple[str, ...]:
    """Cut right after the `n`-th counted word."""
    if n < 0:
        raise ValidationError("word limit must be non-negative")
    words = 0
    for i, token in enumerate(tokens):
        if is_word(token):
            words += 1
            if words == n:
                return tuple(tokens[:i + 1])
    return tuple(tokens)


def banned_ids(vocab: Vocabulary, extra: Collection[str] = ()) -> list[int]:
    """Ids never sampled: `<unk>`, padding, `<s>` and configured extras."""
    ids = {vocab.unk_id, vocab.pad_id, vocab.bos_id}
    for token in extra:
        if token not in vocab:
            raise ValidationError(f"banned token {token!r} is not in the vocabulary")
        ids.add(vocab.index(token))
    return sorted(ids)


def sample_top_k(
    logits: torch.Tensor,
    config: GenerationConfig,
    generator: torch.Generator,
    banned: Collection[int] = (),
) -> int:
    """Draw one id from the temperature-scaled top-k distribution.

    Banned ids are removed first. Ties at the k-th place go to the lower id.
    """
    if config.k > logits.shape[-1]:
        raise ValidationError(f"k={config.k} exceeds vocabulary size {logits.shape[-1]}")
    scores = logits.detach().to(torch.float64).clone()
    if banned:
        scores[torch.tensor(sorted(banned))] = float("-inf")
    allowed = int(torch.isfinite(scores).sum())
    if allowed == 0:
        raise ValidationError("every token is banned")
    k = min(config.k, allowed)
    order = torch.sort(scores, descending=True, stable=True).indices[:k]
    probs = torch.softmax(scores[order] / config.temperature, dim=-1)
    choice = torch.multinomial(probs, 1, generator=generator)
    return int(order[choice])


def _ends_sentence(token: str) -> bool:
    return token in SENTENCE_END or token == SENT


def position_limit(model: DecodingModel) -> Optional[int]:
    """Positions a model can embed, when it says so."""
    return getattr(getattr(model, "config", None), "max_positions", None)


def generate_sequence(
    model: DecodingModel,
    source_ids: Sequence[int],
    vocab: Vocabulary,
    config: GenerationConfig,
    generator: torch.Generator,
    min_words: Optional[int] = None,
    copy: bool = True,
    banned_tokens: Collection[str] = (),
) -> GeneratedSequence:
    """Sample a target sequence under the length rules.

    Models whose steps carry a copy probability may copy placeholders from
    the prefix; `copy=False` always samples. `banned_tokens` are banned on
    top of `config.banned_tokens`.

    A model that reports `config.max_positions` caps the output below it,
    and a longer source is cut to fit; either way the result is flagged.
    """
    min_words = config.min_words if min_words is None else min_words
    banned = banned_ids(vocab, [*config.banned_tokens, *banned_tokens])
    max_tokens = config.max_tokens
    truncated = False
    limit = position_limit(model)
    if limit is not None:
        max_tokens = max(1, min(max_tokens, limit - 1))
        if len(source_ids) > limit:
            logger.warning("Source of %d tokens exceeds %d positions; truncating", len(source_ids), limit)
            source_ids = list(source_ids[:limit])
            truncated = True
    eos = vocab.eos_id
    placeholders = vocab.placeholder_ids
    prefix = [vocab.bos_id]
    tokens: list[str] = []
    copied: list[int] = []
    words = 0
    closing = False

    def pick(blocked: Sequence[int]) -> tuple[int, bool]:
        output = model.step(source_ids, prefix)
        choose = lambda logits: sample_top_k(logits, config, generator, blocked)
        if not copy:
            return choose(output.logits), False
        decision = decode_step_with_copy(
            output, prefix, placeholders, choose, threshold=config.copy_threshold
        )
        return decision.token_id, decision.copied

    while True:
        blocked = banned if words >= min_words else [*banned, eos]
        token_id, was_copied = pick(blocked)
        if closing:
            if token_id != eos and vocab.token(token_id) in CLOSING_QUOTES:
                tokens.append(vocab.token(token_id))
            break
        if token_id == eos:
            break
        token = vocab.token(token_id)
        if was_copied:
            copied.append(len(tokens))
        tokens.append(token)
        prefix.append(token_id)
        words += is_word(token)
        if words >= config.max_words and _ends_sentence(token):
            closing = True
            continue
        if words >= config.max_words + config.slack or len(tokens) >= max_tokens:
            logger.warning("No sentence end within %d words; cutting hard", words)
            return GeneratedSequence(tuple(tokens), tuple(copied), flagged=True)
    return GeneratedSequence(tuple(tokens), tuple(copied), flagged=truncated)
