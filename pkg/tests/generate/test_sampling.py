"""Test cases for top-k sampling and the length rules."""

import random
from types import SimpleNamespace

import pytest
import torch

from fabula.corpus import Vocabulary
from fabula.errors import ValidationError
from fabula.generate import (STRUCTURAL_TOKENS, GenerationConfig, count_words,
                             generate_sequence, sample_top_k, trim_to_words)
from fabula.models import Seq2SeqConfig, build_model
from tests.mocks.models import MockLogitsModel, MockScriptedModel

WORDS = ["a", "b", "c", ".", "!", '"', ","]


@pytest.fixture
def vocab():
    return Vocabulary.build([WORDS], "word", max_size=30, num_placeholders=4)


def _generator(seed=0):
    return torch.Generator().manual_seed(seed)


def _greedy(**overrides):
    values = dict(k=1, temperature=1.0, min_words=150, max_words=250, slack=100)
    values.update(overrides)
    return GenerationConfig(**values)


def _generate(vocab, script, config):
    model = MockScriptedModel(len(vocab), [
        vocab.encode(entry) if isinstance(entry, list) else vocab.index(entry) for entry in script
    ])
    return generate_sequence(model, [vocab.index("a")], vocab, config, _generator())


def test_count_words_skips_punctuation_and_markers():
    """Test words are tokens with letters or digits, placeholders count once."""
    assert count_words(["ent0", "met", "3", ".", ",", "<sent>", '"', "don't"]) == 4


def test_trim_to_words():
    """Test trimming cuts right after the n-th word."""
    assert trim_to_words(["a", ",", "b", "c", "."], 2) == ("a", ",", "b")
    assert trim_to_words(["a", "."], 5) == ("a", ".")


def test_config_rejects_inverted_lengths():
    """Test min_words may not exceed max_words."""
    with pytest.raises(ValueError):
        GenerationConfig(min_words=300, max_words=250)


def test_k_one_is_argmax():
    """Test k=1 always returns the best id."""
    logits = torch.tensor([0.1, 2.0, 1.9, -1.0])
    config = GenerationConfig(k=1)
    generator = _generator()
    assert all(sample_top_k(logits, config, generator) == 1 for _ in range(200))


def test_ties_at_the_boundary_go_to_lower_ids():
    """Test equal logits at the k-th place keep the lower ids."""
    logits = torch.tensor([1.0, 1.0, 1.0, 0.0])
    config = GenerationConfig(k=2, temperature=1.0)
    generator = _generator()
    assert {sample_top_k(logits, config, generator) for _ in range(500)} == {0, 1}


def test_banned_ids_are_never_drawn():
    """Test banned ids are masked before the top-k cut."""
    logits = torch.tensor([5.0, 4.0, 0.0, 0.0])
    config = GenerationConfig(k=2)
    generator = _generator()
    draws = {sample_top_k(logits, config, generator, banned=[0]) for _ in range(2000)}
    assert 0 not in draws
    assert draws <= {1, 2}


def test_all_banned_is_an_error():
    """Test sampling with nothing allowed raises."""
    with pytest.raises(ValidationError):
        sample_top_k(torch.zeros(3), GenerationConfig(k=1), _generator(), banned=[0, 1, 2])


def test_k_larger_than_vocabulary_is_an_error():
    """Test k must not exceed the vocabulary."""
    with pytest.raises(ValidationError):
        sample_top_k(torch.zeros(3), GenerationConfig(k=4), _generator())


def test_sampling_is_seeded():
    """Test the same generator seed gives the same draws."""
    logits = torch.randn(20, generator=_generator(3))
    config = GenerationConfig(k=10)
    g1, g2 = _generator(9), _generator(9)
    assert [sample_top_k(logits, config, g1) for _ in range(100)] == [
        sample_top_k(logits, config, g2) for _ in range(100)
    ]


@pytest.mark.slow
def test_sampler_matches_truncated_distribution():
    """Test empirical top-k frequencies over 100k draws are within TV 0.02."""
    logits = torch.randn(30, generator=_generator(5))
    config = GenerationConfig(k=10, temperature=0.8)
    top = torch.topk(logits, 10).indices
    expected = torch.zeros(30)
    expected[top] = torch.softmax(logits[top] / 0.8, dim=-1)
    counts = torch.zeros(30)
    generator = _generator(6)
    draws = 100_000
    for _ in range(draws):
        counts[sample_top_k(logits, config, generator)] += 1
    assert 0.5 * (counts / draws - expected).abs().sum().item() < 0.02


def test_full_vocabulary_at_temperature_one_is_softmax():
    """Test k=V, temperature 1 samples from the full softmax."""
    logits = torch.tensor([0.0, 1.0, 2.0])
    config = GenerationConfig(k=3, temperature=1.0)
    generator = _generator(2)
    counts = torch.zeros(3)
    for _ in range(20_000):
        counts[sample_top_k(logits, config, generator)] += 1
    assert torch.allclose(counts / 20_000, torch.softmax(logits, -1), atol=0.02)


def test_unknown_token_is_never_generated(vocab):
    """Test a model that prefers <unk> never emits it."""
    logits = torch.zeros(len(vocab))
    logits[vocab.unk_id] = 50.0
    logits[vocab.index("a")] = 1.0
    config = GenerationConfig(k=3, min_words=20, max_words=40, slack=10)
    result = generate_sequence(MockLogitsModel(logits), [4], vocab, config, _generator())
    assert "<unk>" not in result.tokens


def test_early_end_is_suppressed(vocab):
    """Test </s> proposed at word 100 is replaced and decoding continues."""
    script = ["a"] * 100 + [["</s>", "b"]] + ["a"] * 60 + ["."]
    result = _generate(vocab, script, _greedy())
    assert result.tokens == tuple(["a"] * 100 + ["b"] + ["a"] * 60 + ["."])
    assert not result.flagged


def test_cut_at_first_sentence_end_past_maximum(vocab):
    """Test 262 words and a period give a story cut right after the period."""
    result = _generate(vocab, ["a"] * 262 + ["."] + ["a"] * 30, _greedy())
    assert result.tokens == tuple(["a"] * 262 + ["."])
    assert count_words(result.tokens) == 262


def test_closing_quote_stays_with_its_sentence(vocab):
    """Test a quote right after the final period is kept."""
    result = _generate(vocab, ["a"] * 250 + ["!", '"', "a", "."], _greedy())
    assert result.tokens[-2:] == ("!", '"')


def test_hard_cut_is_flagged(vocab):
    """Test a sentence that never ends is cut at max_words + slack."""
    result = _generate(vocab, ["a"] * 500, _greedy())
    assert result.flagged
    assert count_words(result.tokens) == 350


def test_token_cap_stops_wordless_loops(vocab):
    """Test a model stuck on punctuation is cut at the token cap."""
    result = _generate(vocab, [","] * 100, _greedy(max_tokens=50))
    assert result.flagged and len(result.tokens) == 50


def test_length_contract_over_many_generations(vocab):
    """Test 500 scripted generations all follow the length rules."""
    rng = random.Random(0)
    config = _greedy()
    for _ in range(500):
        script = [rng.choice(["a", "b", "c", ","]) if rng.random() > 0.1 else "." for _ in range(600)]
        script = [
            ["</s>", token] if i < 100 and rng.random() < 0.05 else token
            for i, token in enumerate(script)
        ]
        tokens = _generate(vocab, script, config).tokens
        assert count_words(tokens) >= config.min_words
        assert tokens[-1] == "."
        ends = [i for i, token in enumerate(tokens) if token == "."]
        assert count_words(tokens) >= config.max_words
        assert all(count_words(tokens[:i + 1]) < config.max_words for i in ends[:-1])


def test_story_bans_structural_tokens(vocab):
    """Test plan and filler delimiters are never emitted when banned."""
    script = [["<frame>", "a"], ["<sent>", "<null>", "b"], "."]
    config = _greedy(min_words=0, max_words=5)
    model = MockScriptedModel(len(vocab), [
        vocab.encode(entry) if isinstance(entry, list) else vocab.index(entry) for entry in script
    ])
    result = generate_sequence(model, [4], vocab, config, _generator(), banned_tokens=STRUCTURAL_TOKENS)
    assert result.tokens == ("a", "b", ".")
    assert not set(result.tokens) & set(STRUCTURAL_TOKENS)
    assert _generate(vocab, script, config).tokens == ("<frame>", "<sent>", ".")


def test_output_is_capped_below_model_positions(vocab):
    """Test a model with 11 positions gets a flagged 10-token story, never a longer prefix."""
    model = MockScriptedModel(len(vocab), [vocab.index("a")] * 500)
    model.config = SimpleNamespace(max_positions=11)
    result = generate_sequence(model, [4], vocab, _greedy(), _generator())
    assert result.flagged and len(result.tokens) == 10
    assert max(len(prefix) for _, prefix in model.calls) <= 11


def test_long_source_is_cut_to_model_positions(vocab):
    """Test a source past the position limit is truncated and flagged."""
    model = MockScriptedModel(len(vocab), [vocab.index("a"), vocab.index(".")])
    model.config = SimpleNamespace(max_positions=8)
    config = _greedy(min_words=0, max_words=1)
    result = generate_sequence(model, [4] * 20, vocab, config, _generator())
    assert result.tokens == ("a", ".")
    assert result.flagged
    assert all(len(source) == 8 for source, _ in model.calls)


def test_real_model_with_few_positions_is_flagged_not_failed(vocab):
    """Test decoding past max_positions of a built model ends flagged instead of raising."""
    model = build_model(Seq2SeqConfig.for_vocabularies(
        vocab, vocab, dim=8, heads=2, encoder_layers=1, decoder_layers=1, max_positions=6,
    ), seed=0)
    result = generate_sequence(model, [4, 5], vocab, _greedy(), _generator())
    assert result.flagged
    assert len(result.tokens) == 5
