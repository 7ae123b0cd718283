"""Shared fixtures for fabula tests.

The reference story, tokenized:

    0 Gandalf  1 met  2 Bilbo  3 Baggins  4 at  5 the  6 inn  7 .
    8 He  9 ate  10 the  11 cake  12 .
    13 Bilbo  14 laughed  15 .
"""

import pytest
import torch

from fabula.annotate import Annotator, VerbLexicon
from fabula.corpus import Story

STORY_TEXT = "Gandalf met Bilbo Baggins at the inn . He ate the cake . Bilbo laughed ."


@pytest.fixture(autouse=True)
def double_precision():
    """Run numerical tests in float64."""
    previous = torch.get_default_dtype()
    torch.set_default_dtype(torch.float64)
    yield
    torch.set_default_dtype(previous)


@pytest.fixture
def story() -> Story:
    return Story.from_text(STORY_TEXT)


@pytest.fixture
def lexicon() -> VerbLexicon:
    return VerbLexicon.load()


@pytest.fixture
def annotated(story, lexicon):
    """The reference story run through the fallback annotators."""
    return Annotator.fallback(lexicon=lexicon).annotate(story)
