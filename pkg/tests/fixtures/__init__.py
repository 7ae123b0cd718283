"""Checked-in story fixtures.

`golden/` holds ten hand-annotated stories; `corpus/` a larger corpus of
plain stories for round-trip tests.
"""

from pathlib import Path

from fabula.annotate import (AnnotatedStory, import_annotations,
                             read_annotation_file)
from fabula.corpus import Story, read_lines

FIXTURES = Path(__file__).parent
GOLDEN = FIXTURES / "golden"


def load_golden() -> list[AnnotatedStory]:
    stories = [Story.from_text(line) for line in read_lines(GOLDEN / "stories.txt")]
    records = read_annotation_file(GOLDEN / "annotations.jsonl")
    return [import_annotations(story, record) for story, record in zip(stories, records, strict=True)]
