"""Test cases for stage training."""

import math
import random

import pytest
import torch

from fabula.annotate import AnnotatedStory
from fabula.corpus import NULL, Prompt, Story, Vocabulary
from fabula.decompose import (AnnotatedExample, DecompositionScheme,
                              build_stage_examples)
from fabula.errors import EmptyDatasetError
from fabula.models import (Seq2SeqConfig, TrainConfig, build_model, collate,
                           copy_targets, encode_pairs, evaluate_nll,
                           stage_losses, train_model)

ENT0, ENT1 = 9, 10
FRAME = 5


def _config(**overrides):
    values = dict(
        source_vocab_size=20, target_vocab_size=20, dim=8, heads=2,
        encoder_layers=1, decoder_layers=1, frame_id=5,
        placeholder_ids=[9, 10, 11, 12],
    )
    values.update(overrides)
    return Seq2SeqConfig(**values)


def _copy_pairs(count, seed=0, length=5):
    rng = random.Random(seed)
    pairs = []
    for _ in range(count):
        tokens = [rng.randint(13, 19) for _ in range(length)]
        pairs.append((tokens, list(tokens)))
    return pairs


def test_empty_dataset_is_rejected():
    """Test training without pairs raises before building anything."""
    with pytest.raises(EmptyDatasetError):
        train_model([], _config(), TrainConfig(), seed=0)


def test_collate_adds_begin_and_end_tokens():
    """Test decoder input starts with <s> and output ends with </s>, padded with 0."""
    batch = collate([([13, 14], [15]), ([13], [15, 16])], _config())
    assert batch.source.tolist() == [[13, 14], [13, 0]]
    assert batch.target_in.tolist() == [[2, 15, 0], [2, 15, 16]]
    assert batch.target_out.tolist() == [[15, 3, 0], [15, 16, 3]]


def test_copy_targets_mark_repeated_placeholders():
    """Test only placeholders already in the gold prefix are copy targets."""
    batch = collate([([13], [ENT0, 14, ENT0, ENT1])], _config())
    copy, sources = copy_targets(batch, [9, 10, 11, 12])
    assert copy[0].tolist() == [False, False, True, False, False]
    assert sources[0, 2].tolist() == [False, True, False, False, False]


def test_pointer_models_add_copy_losses():
    """Test pointer-head models report copy and pointer terms."""
    model = build_model(_config(pointer_head=1), seed=0)
    batch = collate([([13, 14], [ENT0, 15, ENT0])], model.config)
    losses = stage_losses(model, batch, TrainConfig())
    assert set(losses) == {"nll", "copy", "pointer", "total"}
    assert all(torch.isfinite(value) for value in losses.values())
    assert losses["total"] > losses["nll"]


def test_uniform_model_scores_log_vocabulary():
    """Test a model with a zero output layer has NLL ln V per token."""
    model = build_model(_config(), seed=0)
    with torch.no_grad():
        model.output.weight.zero_()
        model.output.bias.zero_()
    assert math.isclose(evaluate_nll(model, _copy_pairs(4)), math.log(20), rel_tol=1e-9)


def test_training_is_deterministic():
    """Test the same seed reproduces the loss curve and parameters exactly."""
    config = TrainConfig(epochs=3, batch_size=2)
    pairs = _copy_pairs(6)
    a = train_model(pairs, _config(verb_head=0, pointer_head=1), config, seed=11)
    b = train_model(pairs, _config(verb_head=0, pointer_head=1), config, seed=11)
    assert a.epoch_nll == b.epoch_nll
    assert a.steps == b.steps == 9
    state = b.model.state_dict()
    assert all(torch.equal(value, state[name]) for name, value in a.model.state_dict().items())


def test_training_reduces_loss():
    """Test a few epochs lower the training NLL."""
    result = train_model(
        _copy_pairs(8), _config(), TrainConfig(epochs=15, batch_size=4, learning_rate=1e-2), seed=3
    )
    assert result.epoch_nll[-1] < result.epoch_nll[0]


def test_max_steps_stops_early():
    """Test the step budget cuts training short."""
    result = train_model(_copy_pairs(8), _config(), TrainConfig(epochs=10, batch_size=2, max_steps=5), seed=0)
    assert result.steps == 5
    assert len(result.epoch_nll) == 2


@pytest.mark.slow
def test_overfits_small_copy_task():
    """Test a desk-scale model memorizes 50 synthetic pairs."""
    pairs = _copy_pairs(50, seed=4)
    config = _config(dim=32, heads=2, encoder_layers=2, decoder_layers=2)
    result = train_model(
        pairs, config, TrainConfig(epochs=400, batch_size=10, learning_rate=3e-3, max_steps=2000), seed=0
    )
    assert evaluate_nll(result.model, pairs) < 0.1


def _verb_chain_pairs(count, seed, frames=4, noise=6):
    """Plans whose every verb is fixed by the previous verb, several noise tokens back."""
    rng = random.Random(seed)
    pairs = []
    for _ in range(count):
        verb = rng.randint(13, 20)
        target = []
        for _ in range(frames):
            target += [FRAME, verb] + [rng.randint(21, 29) for _ in range(noise)]
            verb = 13 + (verb - 13 + 3) % 8
        pairs.append(([rng.randint(21, 29)], target))
    return pairs


@pytest.mark.slow
def test_verb_attention_lowers_plan_nll():
    """Test the verb head beats the ablated model on long-range verb dependencies."""
    wins = 0
    for seed in range(5):
        train, held_out = _verb_chain_pairs(200, seed), _verb_chain_pairs(50, seed + 100)
        scores = []
        for verb_head in (0, None):
            config = _config(target_vocab_size=30, source_vocab_size=30, dim=16, heads=2, verb_head=verb_head)
            result = train_model(
                train, config, TrainConfig(epochs=30, batch_size=20, learning_rate=3e-3), seed=seed
            )
            scores.append(evaluate_nll(result.model, held_out))
        wins += scores[0] < scores[1]
    assert wins >= 4


def test_frameless_story_trains_on_null_plan():
    """Test a story with no frames decomposes to a <null> plan source and still trains."""
    story = Story.from_text("the wind blew .")
    example = AnnotatedExample(Prompt.from_text("wind"), AnnotatedStory(story=story))
    stages = build_stage_examples(example, DecompositionScheme.SRL_PLAN)
    assert stages.plan == [(("wind",), ())]
    assert stages.story == [((NULL,), ("the", "wind", "blew", "."))]

    vocab = Vocabulary.build([["wind", "the", "blew", "."]], "word", max_size=30, num_placeholders=4)
    config = _config(
        source_vocab_size=len(vocab), target_vocab_size=len(vocab),
        placeholder_ids=sorted(vocab.placeholder_ids),
    )
    pairs = encode_pairs(stages.story, vocab, vocab)
    result = train_model(pairs, config, TrainConfig(epochs=1), seed=0, stage="story")
    assert math.isfinite(result.epoch_nll[0])
