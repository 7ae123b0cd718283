"""SRL action plans: the predicate-argument intermediate of the plan stage."""

from dataclasses import dataclass
from typing import Sequence

from ..annotate import AnnotatedStory
from ..corpus import FRAME, NULL, SENT
from ..errors import ValidationError


@dataclass(frozen=True)
class SrlPlan:
    """Serialized frames, `<frame> verb args...` per frame, `<sent>` per sentence.

    `verb_positions` marks the first token after every frame delimiter, which
    is where the predicate sits.
    """

    tokens: tuple[str, ...]
    verb_positions: tuple[int, ...]

    def __post_init__(self):
        expected = verb_positions(self.tokens)
        if tuple(self.verb_positions) != expected:
            raise ValidationError("verb positions must mark every token after a frame delimiter")

    @classmethod
    def from_tokens(cls, tokens: Sequence[str]) -> "SrlPlan":
        tokens = tuple(tokens)
        return cls(tokens=tokens, verb_positions=verb_positions(tokens))

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def verbs(self) -> list[str]:
        return [self.tokens[p] for p in self.verb_positions]


def verb_positions(tokens: Sequence[str]) -> tuple[int, ...]:
    """Indices right after each `<frame>` that hold a real token."""
    return tuple(
        i + 1
        for i, token in enumerate(tokens)
        if token == FRAME and i + 1 < len(tokens) and tokens[i + 1] not in (FRAME, SENT)
    )


def plan_source(plan: Sequence[str]) -> tuple[str, ...]:
    """Story-stage source for a plan; a frameless plan becomes a lone `<null>`."""
    return tuple(plan) if plan else (NULL,)


def serialize_srl_plan(annotated: AnnotatedStory) -> SrlPlan:
    """Flatten frames into a plan.

    Every frame contributes `<frame>`, its predicate tokens and then its core
    arguments in ARG0..ARG5 order; modifiers are dropped. A `<sent>` closes
    each sentence that produced at least one frame.
    """
    tokens: list[str] = []
    positions: list[int] = []
    current = None
    for frame in annotated.frames:
        if current is not None and frame.sentence_index != current:
            tokens.append(SENT)
        current = frame.sentence_index
        tokens.append(FRAME)
        positions.append(len(tokens))
        tokens.extend(annotated.surface(frame.predicate))
        for _, span in frame.core_arguments():
            tokens.extend(annotated.surface(span))
    if current is not None:
        tokens.append(SENT)
    return SrlPlan(tokens=tuple(tokens), verb_positions=tuple(positions))
