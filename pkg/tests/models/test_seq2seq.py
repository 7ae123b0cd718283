"""Test cases for the convolutional encoder-decoder."""

import random

import pytest
import torch
from pydantic import ValidationError

from fabula.errors import ValidationError as FabulaValidationError
from fabula.models import Seq2SeqConfig, Seq2SeqModel, build_model
from fabula.neuralcore import grad_check

FRAME = 5
PLACEHOLDERS = [9, 10, 11, 12]


def _config(**overrides):
    values = dict(
        source_vocab_size=20, target_vocab_size=20, dim=8, heads=2,
        encoder_layers=1, decoder_layers=2, frame_id=FRAME,
        placeholder_ids=PLACEHOLDERS,
    )
    values.update(overrides)
    return Seq2SeqConfig(**values)


def test_config_rejects_shared_special_head():
    """Test the verb and pointer heads must differ."""
    with pytest.raises(ValidationError):
        _config(verb_head=0, pointer_head=0)


def test_config_rejects_out_of_range_head():
    """Test special heads must be below the head count."""
    with pytest.raises(ValidationError):
        _config(verb_head=2)


def test_config_rejects_indivisible_dimension():
    """Test the head count must divide the model dimension."""
    with pytest.raises(ValidationError):
        _config(dim=9)


def test_forward_shapes():
    """Test logits, copy logits and pointer weights have the expected shapes."""
    model = build_model(_config(verb_head=0, pointer_head=1), seed=1)
    source = torch.tensor([[13, 14, 15, 0], [13, 16, 0, 0]])
    target = torch.tensor([[2, 5, 14, 9], [2, 5, 15, 0]])
    output = model(source, target)
    assert output.logits.shape == (2, 4, 20)
    assert output.copy_logits.shape == (2, 4)
    assert output.pointer_weights.shape == (2, 4, 5)
    assert output.verb_weights.shape == (2, 4, 5)


def test_verb_head_attends_only_to_prior_verbs():
    """Test verb-head weights vanish off earlier verbs and the null slot."""
    model = build_model(_config(verb_head=0), seed=2)
    target = torch.tensor([[2, 5, 14, 15, 4, 5, 16, 17, 4]])
    weights = model(torch.tensor([[13, 14]]), target).verb_weights[0]
    verbs = {2, 6}
    for t in range(target.shape[1]):
        allowed = {j for j in verbs if j <= t}
        for j in range(target.shape[1]):
            if j not in allowed:
                assert weights[t, j].item() == 0.0
    assert weights[1, -1].item() == 1.0
    assert torch.allclose(weights.sum(-1), torch.ones(target.shape[1]), atol=1e-6)


def test_verb_head_mass_over_random_plans():
    """Test 1000 random plans put verb-head mass only on prior verbs and the null slot."""
    rng = random.Random(0)
    models = [build_model(_config(verb_head=0), seed=seed) for seed in range(4)]
    for i in range(1000):
        length = rng.randint(1, 32)
        target = [2] + [FRAME if rng.random() < 0.25 else rng.randint(6, 19) for _ in range(length - 1)]
        source = [rng.randint(13, 19) for _ in range(rng.randint(1, 8))]
        with torch.no_grad():
            weights = models[i % 4](torch.tensor([source]), torch.tensor([target])).verb_weights[0]
        assert weights.shape == (length, length + 1)
        assert torch.allclose(weights.sum(-1), torch.ones(length, dtype=weights.dtype), atol=1e-6)
        for t in range(length):
            allowed = {j for j in range(1, t + 1) if target[j - 1] == FRAME} | {length}
            off = [j for j in range(length + 1) if j not in allowed]
            assert weights[t, off].abs().max().item() == 0.0
            if len(allowed) == 1:
                assert weights[t, length].item() == pytest.approx(1.0, abs=1e-6)


def test_decoder_is_causal():
    """Test logits at t do not depend on target tokens after t."""
    model = build_model(_config(verb_head=0, pointer_head=1), seed=3)
    source = torch.tensor([[13, 14, 15]])
    a = model(source, torch.tensor([[2, 5, 14, 9, 16, 17]])).logits
    b = model(source, torch.tensor([[2, 5, 14, 10, 18, 3]])).logits
    assert torch.allclose(a[0, :3], b[0, :3], atol=1e-12)


def test_step_matches_full_forward():
    """Test incremental scoring equals the last row of a forward pass."""
    model = build_model(_config(pointer_head=1), seed=4)
    model.eval()
    source, prefix = [13, 14, 15], [2, 9, 14, 9]
    output = model(torch.tensor([source]), torch.tensor([prefix]))
    step = model.step(source, prefix)
    assert torch.allclose(step.logits, output.logits[0, -1])
    assert step.pointer_row.shape == (4,)
    assert 0.0 < step.p_copy < 1.0


def test_seeded_initialization_is_reproducible():
    """Test the same seed builds identical parameters without touching global RNG."""
    state = torch.random.get_rng_state()
    a = build_model(_config(), seed=7).state_dict()
    b = build_model(_config(), seed=7).state_dict()
    assert torch.equal(state, torch.random.get_rng_state())
    assert all(torch.equal(a[name], b[name]) for name in a)


def test_model_rejects_too_long_sequences():
    """Test sequences past the position table are refused."""
    model = Seq2SeqModel(_config(max_positions=4))
    with pytest.raises(FabulaValidationError):
        model(torch.tensor([[13, 14, 15, 16, 17]]), torch.tensor([[2]]))


def test_copy_classifier_gradient():
    """Test the pointer-copy classifier against central differences."""
    model = build_model(_config(pointer_head=1), seed=5)
    states = torch.randn(2, 3, 8, generator=torch.Generator().manual_seed(0))
    error = grad_check(
        lambda h, w: torch.sigmoid(torch.nn.functional.linear(h, w)),
        [states, model.copy.weight.detach()],
    )
    assert error < 1e-4
