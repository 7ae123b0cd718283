"""Longest common subsequence of a story against a training corpus.

Training stories are padded into an integer matrix and the DP runs one
generated token at a time over every training story at once. Each row of
the table is

    c[j]   = prev[j-1] + 1 if story[i] == train[j] else prev[j]
    row[j] = max(c[1..j])

which is the usual recurrence with the left neighbour folded into a
running maximum. Padding uses -1, an id no story token gets.
"""

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

logger = logging.getLogger(__name__)

PAD_ID = -1
DEFAULT_SHARD_SIZE = 1024


@dataclass(frozen=True)
class LcsStats:
    max: float
    mean: float


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    """LCS length of two token sequences in O(len(a) * len(b)) time, one row of memory."""
    return int(lcs_lengths(a, [b])[0])


def _encode(story: Sequence[str], training: Sequence[Sequence[str]]) -> tuple[np.ndarray, np.ndarray]:
    ids: dict[str, int] = {}
    query = np.array([ids.setdefault(token, len(ids)) for token in story], dtype=np.int64)
    width = max((len(tokens) for tokens in training), default=0)
    matrix = np.full((len(training), width), PAD_ID, dtype=np.int64)
    for row, tokens in enumerate(training):
        # tokens absent from the story can never match
        matrix[row, :len(tokens)] = [ids.get(token, PAD_ID) for token in tokens]
    return query, matrix


def _lcs_shard(query: np.ndarray, matrix: np.ndarray) -> np.ndarray:
    rows, width = matrix.shape
    previous = np.zeros((rows, width + 1), dtype=np.int32)
    for token in query:
        candidates = np.where(matrix == token, previous[:, :-1] + 1, previous[:, 1:])
        current = np.zeros_like(previous)
        current[:, 1:] = np.maximum.accumulate(candidates, axis=1)
        previous = current
    return previous[:, -1]


def lcs_lengths(
    story: Sequence[str],
    training: Sequence[Sequence[str]],
    shard_size: int = DEFAULT_SHARD_SIZE,
) -> np.ndarray:
    """LCS of `story` with every training story, in training order."""
    if shard_size < 1:
        raise ValueError("shard_size must be positive")
    if not training:
        return np.zeros(0, dtype=np.int64)
    query, matrix = _encode(story, training)
    if len(query) == 0 or matrix.shape[1] == 0:
        return np.zeros(len(training), dtype=np.int64)
    shards = [
        _lcs_shard(query, matrix[start:start + shard_size])
        for start in range(0, len(training), shard_size)
    ]
    return np.concatenate(shards).astype(np.int64)


def lcs_stats(
    story: Sequence[str],
    training: Sequence[Sequence[str]],
    shard_size: int = DEFAULT_SHARD_SIZE,
) -> LcsStats:
    """Max and mean LCS, in raw tokens, of one story against the training set."""
    lengths = lcs_lengths(story, training, shard_size)
    if len(lengths) == 0:
        return LcsStats(max=0.0, mean=0.0)
    return LcsStats(max=float(lengths.max()), mean=float(lengths.mean()))


def corpus_lcs_stats(
    stories: Sequence[Sequence[str]],
    training: Sequence[Sequence[str]],
    shard_size: int = DEFAULT_SHARD_SIZE,
) -> LcsStats:
    """Per-story max and mean LCS, each averaged over the generated stories."""
    if not stories:
        return LcsStats(max=0.0, mean=0.0)
    per_story = [lcs_stats(story, training, shard_size) for story in stories]
    logger.debug("Computed LCS for %d stories against %d training stories", len(stories), len(training))
    return LcsStats(
        max=float(np.mean([stats.max for stats in per_story])),
        mean=float(np.mean([stats.mean for stats in per_story])),
    )
