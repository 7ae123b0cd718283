"""Verb-attention masks and the pointer-copy decision."""

from dataclasses import dataclass
from typing import Callable, Collection, Iterable, Sequence

import torch

from ..errors import ValidationError
from ..neuralcore import AttentionMask, positions_mask
from .seq2seq import StepOutput

DEFAULT_COPY_THRESHOLD = 0.5


def build_verb_mask(prefix: int | Sequence[str], verb_positions: Iterable[int]) -> AttentionMask:
    """Mask letting row t see only the verbs generated before t, plus null.

    `prefix` is the generated plan (or its length); `verb_positions` index
    into it.
    """
    length = prefix if isinstance(prefix, int) else len(prefix)
    return positions_mask(length, verb_positions)


def pointer_copy_prob(state: torch.Tensor, copy_weight: torch.Tensor) -> torch.Tensor:
    """sigmoid(w_copy . h) over the last dimension."""
    if state.shape[-1] != copy_weight.shape[-1]:
        raise ValidationError(
            f"state of size {state.shape[-1]} does not match copy weight {copy_weight.shape[-1]}"
        )
    return torch.sigmoid((state * copy_weight).sum(-1))


@dataclass(frozen=True)
class CopyDecision:
    token_id: int
    copied: bool


def decode_step_with_copy(
    output: StepOutput,
    prefix_ids: Sequence[int],
    placeholder_ids: Collection[int],
    generate: Callable[[torch.Tensor], int],
    threshold: float = DEFAULT_COPY_THRESHOLD,
) -> CopyDecision:
    """Copy a previous placeholder or fall back to `generate`.

    The copy branch fires when p_copy >= threshold and the prefix already
    holds a placeholder; it emits the placeholder at the pointer head's
    highest-weighted prefix position (earliest on ties). Otherwise the
    token comes from `generate(logits)`, which may open a new placeholder.
    """
    if output.p_copy is not None and output.pointer_row is not None and output.p_copy >= threshold:
        candidates = [i for i, token in enumerate(prefix_ids) if token in placeholder_ids]
        if candidates:
            row = output.pointer_row
            best = max(candidates, key=lambda i: (row[i].item(), -i))
            return CopyDecision(token_id=prefix_ids[best], copied=True)
    return CopyDecision(token_id=generate(output.logits), copied=False)
