"""Serialized annotation schema, import and export.

One JSON record per story line:

    {"frames": [{"predicate": [s, e], "sentence": i,
                 "args": [{"role": "ARG0", "span": [s, e]}]}],
     "mentions": [{"span": [s, e], "label": "PERSON"}],
     "clusters": [[[s, e], [s, e]]]}

Token indices refer to the word-scheme tokenization of the paired story.
"""

from pathlib import Path
from typing import Iterable

import pydantic
from pydantic import BaseModel, ConfigDict, Field

from ..corpus import Story, read_lines, write_lines
from ..errors import AnnotationError
from .base import (AnnotatedStory, CorefCluster, EntityLabel, EntityMention,
                   Span, SrlFrame)


class ArgumentRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    role: str
    span: tuple[int, int]


class FrameRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    predicate: tuple[int, int]
    sentence: int = Field(..., ge=0)
    args: list[ArgumentRecord] = Field(default_factory=list)


class MentionRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    span: tuple[int, int]
    label: EntityLabel


class AnnotationRecord(BaseModel):
    """Annotations of one story as produced by external SRL/NER/coref systems."""

    model_config = ConfigDict(extra="forbid")

    frames: list[FrameRecord] = Field(default_factory=list)
    mentions: list[MentionRecord] = Field(default_factory=list)
    clusters: list[list[tuple[int, int]]] = Field(default_factory=list)


def _span(pair: tuple[int, int]) -> Span:
    return Span(pair[0], pair[1])


def import_annotations(story: Story, record: AnnotationRecord | dict) -> AnnotatedStory:
    """Range-check an annotation record against `story` and canonicalize it."""
    if not isinstance(record, AnnotationRecord):
        try:
            record = AnnotationRecord.model_validate(record)
        except pydantic.ValidationError as e:
            raise AnnotationError(f"annotation record does not match schema: {e}") from e

    frames = [
        SrlFrame(
            predicate=_span(frame.predicate),
            arguments=tuple((arg.role, _span(arg.span)) for arg in frame.args),
            sentence_index=frame.sentence,
        )
        for frame in record.frames
    ]
    mentions = []
    for mention in record.mentions:
        span = _span(mention.span)
        if span.end > len(story):
            raise AnnotationError(
                f"mention span [{span.start}, {span.end}) exceeds story of {len(story)} tokens"
            )
        mentions.append(EntityMention(span=span, label=mention.label, surface=span.tokens(story)))
    clusters = [
        CorefCluster(mentions=tuple(sorted(_span(pair) for pair in cluster)))
        for cluster in record.clusters
    ]
    return AnnotatedStory(
        story=story,
        frames=tuple(frames),
        mentions=tuple(mentions),
        clusters=tuple(clusters),
    )


def export_annotations(annotated: AnnotatedStory) -> AnnotationRecord:
    return AnnotationRecord(
        frames=[
            FrameRecord(
                predicate=(frame.predicate.start, frame.predicate.end),
                sentence=frame.sentence_index,
                args=[
                    ArgumentRecord(role=role, span=(span.start, span.end))
                    for role, span in frame.arguments
                ],
            )
            for frame in annotated.frames
        ],
        mentions=[
            MentionRecord(span=(m.span.start, m.span.end), label=m.label)
            for m in annotated.mentions
        ],
        clusters=[
            [(span.start, span.end) for span in cluster.mentions]
            for cluster in annotated.clusters
        ],
    )


def read_annotation_file(path: Path) -> list[AnnotationRecord]:
    records = []
    for number, line in enumerate(read_lines(path), start=1):
        try:
            records.append(AnnotationRecord.model_validate_json(line))
        except pydantic.ValidationError as e:
            raise AnnotationError(f"invalid annotation record: {e}", line=number) from e
    return records


def write_annotation_file(path: Path, records: Iterable[AnnotationRecord]) -> None:
    write_lines(path, (record.model_dump_json() for record in records))
