"""Scripted stand-ins for trained decoding models."""
from typing import Callable, Optional, Sequence

import torch

from fabula.models import StepOutput


class MockScriptedModel:
    """Mock decoding model that emits a fixed token sequence, then `</s>`.

    A script entry may be a list of ids in order of preference.

    `by_source` picks the script from the source ids, so one stub can play
    a model whose output depends on its input. `p_copy` and `pointer`
    (called with the prefix) make it look like a pointer-head model.
    """

    def __init__(
        self,
        vocab_size: int,
        script: Sequence[int] = (),
        eos_id: int = 3,
        by_source: Optional[Callable[[tuple[int, ...]], Sequence[int]]] = None,
        p_copy: Optional[float] = None,
        pointer: Optional[Callable[[Sequence[int]], Sequence[float]]] = None,
        margin: float = 10.0,
    ):
        self.vocab_size = vocab_size
        self.script = list(script)
        self.eos_id = eos_id
        self.by_source = by_source
        self.p_copy = p_copy
        self.pointer = pointer
        self.margin = margin
        self.calls: list[tuple[tuple[int, ...], tuple[int, ...]]] = []

    def step(self, source_ids: Sequence[int], prefix_ids: Sequence[int]) -> StepOutput:
        self.calls.append((tuple(source_ids), tuple(prefix_ids)))
        script = self.script if self.by_source is None else list(self.by_source(tuple(source_ids)))
        i = len(prefix_ids) - 1
        entry = script[i] if i < len(script) else self.eos_id
        logits = torch.zeros(self.vocab_size)
        for rank, token in enumerate([entry] if isinstance(entry, int) else entry):
            logits[token] = self.margin - rank
        if self.p_copy is None:
            return StepOutput(logits=logits)
        row = torch.tensor(list(self.pointer(prefix_ids)) if self.pointer else [0.0] * len(prefix_ids))
        return StepOutput(logits=logits, p_copy=self.p_copy, pointer_row=row)


class MockLogitsModel:
    """Mock decoding model that always returns the same logits."""

    def __init__(self, logits: torch.Tensor):
        self.logits = logits

    def step(self, source_ids: Sequence[int], prefix_ids: Sequence[int]) -> StepOutput:
        return StepOutput(logits=self.logits.clone())
