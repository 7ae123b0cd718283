"""Decomposition files: one token line per example plus sidecar table records.

Plans and anonymized stories are written one example per line, tokens
space-separated. Placeholder tables go to a JSON-lines sidecar, one record
per anonymized story keyed by its line number (1-based).
"""

from pathlib import Path
from typing import Iterable, Optional

import pydantic
from pydantic import BaseModel, ConfigDict, Field

from ..annotate import Span
from ..corpus import (DEFAULT_PLACEHOLDERS, read_lines, read_token_lines,
                      write_lines, write_token_lines)
from ..errors import ValidationError
from .anonymize import (AnonymizedStory, EntityScheme, PlaceholderSlot,
                        PlaceholderTable)


class SlotRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    placeholder: int = Field(..., ge=0)
    position: int = Field(..., ge=0)
    surface: Optional[str] = None
    source: Optional[tuple[int, int]] = None


class PlaceholderTableRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    line: int = Field(..., ge=1)
    scheme: EntityScheme
    max_placeholders: int = DEFAULT_PLACEHOLDERS
    slots: list[SlotRecord] = Field(default_factory=list)


def table_to_record(anonymized: AnonymizedStory, line: int) -> PlaceholderTableRecord:
    return PlaceholderTableRecord(
        line=line,
        scheme=anonymized.scheme,
        max_placeholders=anonymized.max_placeholders,
        slots=[
            SlotRecord(
                placeholder=slot.placeholder,
                position=slot.position,
                surface=slot.text,
                source=None if slot.source is None else (slot.source.start, slot.source.end),
            )
            for slot in anonymized.table.slots
        ],
    )


def table_from_record(record: PlaceholderTableRecord) -> PlaceholderTable:
    return PlaceholderTable(tuple(
        PlaceholderSlot(
            placeholder=slot.placeholder,
            position=slot.position,
            surface=None if slot.surface is None else tuple(slot.surface.split(" ")),
            source=None if slot.source is None else Span(*slot.source),
        )
        for slot in record.slots
    ))


def write_decomposition(
    tokens_path: Path,
    sequences: Iterable[Iterable[str]],
    tables_path: Optional[Path] = None,
    anonymized: Optional[Iterable[AnonymizedStory]] = None,
) -> None:
    """Write plan or anonymized-story lines and, if given, their table sidecar."""
    write_token_lines(tokens_path, [list(tokens) for tokens in sequences])
    if tables_path is not None and anonymized is not None:
        write_lines(tables_path, (
            table_to_record(story, line).model_dump_json()
            for line, story in enumerate(anonymized, start=1)
        ))


def read_decomposition(tokens_path: Path, tables_path: Path) -> list[AnonymizedStory]:
    """Rebuild anonymized stories from their token lines and table sidecar."""
    sequences = read_token_lines(tokens_path)
    records: dict[int, PlaceholderTableRecord] = {}
    for number, line in enumerate(read_lines(tables_path), start=1):
        try:
            record = PlaceholderTableRecord.model_validate_json(line)
        except pydantic.ValidationError as e:
            raise ValidationError(f"invalid placeholder table: {e}", line=number) from e
        records[record.line] = record

    stories = []
    for number, tokens in enumerate(sequences, start=1):
        if number not in records:
            raise ValidationError("no placeholder table for this line", line=number)
        record = records[number]
        try:
            stories.append(AnonymizedStory(
                tokens=tuple(tokens),
                table=table_from_record(record),
                scheme=record.scheme,
                max_placeholders=record.max_placeholders,
            ))
        except ValidationError as e:
            raise ValidationError(str(e), line=number) from e
    return stories
