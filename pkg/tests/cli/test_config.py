"""Test cases for fabula run configuration."""

import pytest

from fabula.cli.config import RunLayout, Settings, load_settings, parse_overrides
from fabula.decompose import DecompositionScheme
from fabula.errors import ValidationError
from fabula.models import ContextMode


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    """Keep FABULA_ variables from the environment out of these tests."""
    for name in ("FABULA_SEED", "FABULA_SCHEME", "FABULA_GENERATION__K"):
        monkeypatch.delenv(name, raising=False)


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "fabula.toml"
    path.write_text(
        'seed = 7\nscheme = "srl-plan"\n\n[generation]\nk = 3\ntemperature = 0.5\n', encoding="utf-8"
    )
    return path


def test_defaults():
    """Test desk-scale defaults and per-stage heads."""
    settings = load_settings(seed=1)
    assert settings.scheme is DecompositionScheme.COMBINED
    assert settings.plan.verb_head and settings.story.pointer_head
    assert settings.fill.decoder_layers == 2
    assert (settings.story.dim, settings.story.heads, settings.story.kernel_width) == (128, 4, 3)
    assert settings.fill.context_mode is ContextMode.FULL
    assert settings.evaluate.ranking_sizes == [10, 50, 100]
    assert settings.generation.min_words == 150


def test_seed_is_mandatory():
    """Test settings without a seed are rejected."""
    with pytest.raises(ValidationError):
        load_settings()


def test_toml_file(config_file):
    """Test values come from the TOML file."""
    settings = load_settings(config_file)
    assert settings.seed == 7
    assert settings.scheme is DecompositionScheme.SRL_PLAN
    assert settings.generation.k == 3
    assert settings.generation.temperature == 0.5


def test_source_priority(config_file, monkeypatch):
    """Test --set beats --seed, which beats the environment, which beats the file."""
    monkeypatch.setenv("FABULA_GENERATION__K", "4")
    monkeypatch.setenv("FABULA_SEED", "8")
    settings = load_settings(config_file)
    assert (settings.seed, settings.generation.k) == (8, 4)
    assert settings.generation.temperature == 0.5

    settings = load_settings(config_file, seed=9, overrides=["seed=10", "generation.k=6"])
    assert (settings.seed, settings.generation.k) == (10, 6)
    assert load_settings(config_file, seed=9).seed == 9


def test_missing_config_file(tmp_path):
    """Test a config path that does not exist is a validation error."""
    with pytest.raises(ValidationError):
        load_settings(tmp_path / "missing.toml", seed=1)


def test_parse_overrides():
    """Test dotted keys nest and values parse as JSON when possible."""
    assert parse_overrides(["generation.temperature=0.5", "scheme=ner-anon", "evaluate.ranking_sizes=[10]"]) == {
        "generation": {"temperature": 0.5},
        "scheme": "ner-anon",
        "evaluate": {"ranking_sizes": [10]},
    }


@pytest.mark.parametrize("override", ["generation.k", "=3", "nothing.k=3"])
def test_bad_overrides(override):
    """Test malformed or unknown overrides are rejected."""
    with pytest.raises(ValidationError):
        parse_overrides([override])


def test_invalid_values_are_validation_errors():
    """Test schema violations surface as fabula validation errors."""
    with pytest.raises(ValidationError):
        load_settings(seed=1, overrides=["generation.min_words=300"])
    with pytest.raises(ValidationError):
        load_settings(seed=1, overrides=["plan.unknown=1"])


def test_config_hash():
    """Test the hash is short, stable and sensitive to every setting."""
    first = load_settings(seed=1).config_hash()
    assert len(first) == 12
    assert load_settings(seed=1).config_hash() == first
    assert load_settings(seed=2).config_hash() != first
    assert load_settings(seed=1, overrides=["generation.k=5"]).config_hash() != first


def test_check_paths(tmp_path):
    """Test missing command inputs are reported and present ones pass."""
    settings = load_settings(seed=1, out_dir=tmp_path)
    with pytest.raises(ValidationError, match="annotate is missing inputs"):
        settings.check_paths("annotate")
    with pytest.raises(ValidationError):
        settings.check_paths("preprocess")
    settings.layout.data.mkdir()
    settings.layout.prompts.write_text("a\n")
    settings.layout.stories.write_text("b .\n")
    settings.check_paths("annotate")


def test_layout(tmp_path):
    """Test artifacts are grouped by scheme under the output directory."""
    layout = RunLayout(tmp_path, "ner-anon")
    assert layout.models == tmp_path / "models" / "ner-anon"
    assert layout.pairs("story") == (
        tmp_path / "decomposed" / "ner-anon" / "story.src",
        tmp_path / "decomposed" / "ner-anon" / "story.tgt",
    )
    assert layout.report.parent == tmp_path / "reports" / "ner-anon"
    assert isinstance(load_settings(seed=1).layout, RunLayout)
    assert Settings.model_fields["seed"].is_required()


def test_partial_model_override_keeps_stage_defaults():
    """Test overriding one model field keeps the stage's other defaults."""
    settings = load_settings(seed=1, overrides=["fill.dim=16", "plan.dim=16"])
    assert (settings.fill.dim, settings.fill.decoder_layers) == (16, 2)
    assert settings.plan.verb_head
