"""Dataset ingestion and preprocessing.

The dataset is two line-aligned UTF-8 files: prompts (source) and stories
(target), one example per line. In-story line breaks are encoded by the
literal `<newline>` token, which is kept as an ordinary token.
"""

import logging
from pathlib import Path
from typing import Iterable, Optional, Sequence

from ..errors import AlignmentError, ValidationError
from .base import ParallelExample, Prompt, Story

logger = logging.getLogger(__name__)

DEFAULT_MAX_WORDS = 1000


def read_lines(path: Path) -> list[str]:
    """Read a UTF-8 file as a list of lines without their terminators."""
    try:
        text = Path(path).read_bytes().decode("utf-8")
    except UnicodeDecodeError as e:
        raise ValidationError(f"{path} is not valid UTF-8: {e}") from e
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return [line.rstrip("\r") for line in lines]


def write_lines(path: Path, lines: Iterable[str]) -> None:
    Path(path).write_text("".join(f"{line}\n" for line in lines), encoding="utf-8")


def write_token_lines(path: Path, sequences: Iterable[Sequence[str]]) -> None:
    write_lines(path, (" ".join(tokens) for tokens in sequences))


def read_token_lines(path: Path) -> list[list[str]]:
    return [line.split(" ") if line else [] for line in read_lines(path)]


def truncate_story(story: Story, max_words: int) -> Story:
    """Keep the first `max_words` tokens and recompute sentence boundaries."""
    if max_words < 1:
        raise ValidationError("max_words must be at least 1")
    if len(story) <= max_words:
        return story
    return Story.from_tokens(story.tokens[:max_words])


def load_dataset(
    source_path: Path,
    target_path: Path,
    max_words: Optional[int] = None,
) -> list[ParallelExample]:
    """Load line-aligned prompts and stories.

    Args:
        source_path: File of prompts, one per line
        target_path: File of stories, one per line
        max_words: Truncate stories to this many tokens when given

    Returns:
        List of ParallelExample in file order
    """
    prompts = read_lines(source_path)
    stories = read_lines(target_path)
    if len(prompts) != len(stories):
        raise AlignmentError(
            f"{source_path} has {len(prompts)} lines but {target_path} has {len(stories)}"
        )

    examples: list[ParallelExample] = []
    for number, (prompt_line, story_line) in enumerate(zip(prompts, stories), start=1):
        prompt = Prompt.from_text(prompt_line)
        story = Story.from_text(story_line)
        if max_words is not None:
            story = truncate_story(story, max_words)
        try:
            examples.append(ParallelExample(prompt=prompt, story=story))
        except ValidationError as e:
            raise ValidationError(str(e), line=number) from e

    logger.info("Loaded %d examples from %s / %s", len(examples), source_path, target_path)
    return examples
