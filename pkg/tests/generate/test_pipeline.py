"""Test cases for running prompts through the pipeline stages."""

import pytest

from fabula.corpus import (FRAME, NULL, SENT, SPACE_MARKER, Vocabulary,
                           tokenize)
from fabula.decompose import DecompositionScheme, EntityScheme
from fabula.errors import StageError, ValidationError
from fabula.generate import GenerationConfig, run_pipeline
from fabula.models import (PipelineBundle, ReferenceFiller, Seq2SeqConfig,
                           StageModel, build_model)
from tests.mocks.models import MockScriptedModel

PROMPT = ["a", "hobbit", "goes", "home"]
PLAN = [FRAME, "went", "ent0", SENT]
ANONYMIZED = ["ent0", "went", "home", ".", "ent0", "slept", "."]


@pytest.fixture
def words():
    return Vocabulary.build(
        [PROMPT, PLAN, ANONYMIZED, ["Bilbo", "he"]], "word", max_size=60, num_placeholders=4
    )


@pytest.fixture
def chars():
    return Vocabulary.build(
        [tokenize(name, "character") for name in ["Bilbo Baggins", "he"]],
        "character", max_size=60, num_placeholders=4,
    )


@pytest.fixture
def config():
    return GenerationConfig(k=1, temperature=1.0, min_words=0, max_words=50, slack=10)


def _scripted(vocab, tokens):
    return MockScriptedModel(len(vocab), vocab.encode(tokens))


def _spelling_filler(words, chars, spell):
    """Coref filler whose output is `spell(source tokens)` in characters."""
    model = MockScriptedModel(
        len(chars),
        by_source=lambda ids: chars.encode(tokenize(spell(words.decode(ids)), "character")),
    )
    return ReferenceFiller(
        model=model, source_vocab=words, target_vocab=chars, entity_scheme=EntityScheme.COREF
    )


def _combined(words, chars, plan=PLAN, spell=None):
    spell = spell or (lambda source: "he" if "Bilbo" in source else "Bilbo")
    return PipelineBundle(
        scheme=DecompositionScheme.COMBINED,
        plan=StageModel(_scripted(words, plan), words, words),
        story=StageModel(_scripted(words, ANONYMIZED), words, words),
        filler=_spelling_filler(words, chars, spell),
    )


def test_combined_pipeline(words, chars, config):
    """Test plan, anonymized story and fills all reach the final story."""
    story, record = run_pipeline(PROMPT, _combined(words, chars), config, seed=4, example=2)
    assert story.text == "Bilbo went home . he slept ."
    assert record.plan == PLAN
    assert record.anonymized == ANONYMIZED
    assert record.fills == ["Bilbo", "he"]
    assert record.words == 5
    assert record.example == 2 and record.scheme == "combined"
    assert not record.flagged


def test_story_model_is_fed_the_plan(words, chars, config):
    """Test the story stage conditions on the generated plan."""
    bundle = _combined(words, chars)
    run_pipeline(PROMPT, bundle, config, seed=4)
    assert words.decode(bundle.story.model.calls[0][0]) == PLAN
    assert words.decode(bundle.plan.model.calls[0][0]) == PROMPT


def test_plan_only_scheme(words, config):
    """Test srl-plan generates the story directly from the plan."""
    bundle = PipelineBundle(
        scheme=DecompositionScheme.SRL_PLAN,
        plan=StageModel(_scripted(words, PLAN), words, words),
        story=StageModel(_scripted(words, ["he", "went", "home", "."]), words, words),
    )
    story, record = run_pipeline(PROMPT, bundle, config, seed=1)
    assert story.tokens == ("he", "went", "home", ".")
    assert record.anonymized is None and record.fills is None


def test_empty_plan_feeds_null_to_the_story_stage(words, chars, config):
    """Test a frameless plan reaches the story model as a lone <null>, as in training."""
    bundle = _combined(words, chars, plan=[])
    story, record = run_pipeline(PROMPT, bundle, config, seed=0)
    assert record.plan == []
    assert words.decode(bundle.story.model.calls[0][0]) == [NULL]
    assert story.text == "Bilbo went home . he slept ."


def test_empty_fill_fails_the_fill_stage(words, chars, config):
    """Test a filler that spells only whitespace raises a fill stage error."""
    bundle = _combined(words, chars, spell=lambda source: " ")
    with pytest.raises(StageError) as excinfo:
        run_pipeline(PROMPT, bundle, config, seed=0)
    assert excinfo.value.stage == "fill"
    assert SPACE_MARKER in chars


def test_empty_prompt_is_rejected(words, chars, config):
    """Test an empty prompt never reaches the models."""
    with pytest.raises(ValidationError):
        run_pipeline([], _combined(words, chars), config, seed=0)


def test_pipeline_is_reproducible(words):
    """Test the same seed and example give identical provenance records."""
    def stage(seed, **heads):
        model_config = Seq2SeqConfig.for_vocabularies(
            words, words, dim=8, heads=2, encoder_layers=1, decoder_layers=1, **heads
        )
        return StageModel(build_model(model_config, seed), words, words)

    bundle = PipelineBundle(
        scheme=DecompositionScheme.SRL_PLAN,
        plan=stage(1, verb_head=True),
        story=stage(2),
    )
    config = GenerationConfig(k=5, min_words=3, max_words=8, slack=4, max_tokens=30, plan_min_words=1)
    first = [run_pipeline(PROMPT, bundle, config, seed=11, example=i)[1] for i in range(3)]
    second = [run_pipeline(PROMPT, bundle, config, seed=11, example=i)[1] for i in range(3)]
    assert first == second
