"""Run configuration for fabula commands.

Settings come from, highest priority first: `--set dotted.key=value`
overrides, the `--seed` / `--out` flags, `FABULA_` environment variables
(nested keys joined with `__`), a `.env` file and the TOML file given with
`--config`.
"""

import hashlib
import json
import os
from pathlib import Path
from typing import Any, Iterable, Optional

import pydantic
from pydantic import BaseModel, ConfigDict, Field
from pydantic_settings import (BaseSettings, PydanticBaseSettingsSource,
                               SettingsConfigDict, TomlConfigSettingsSource)

from ..corpus import DEFAULT_MAX_WORDS, TokenScheme
from ..decompose import DecompositionScheme, EntityScheme
from ..errors import ValidationError
from ..evaluate import RANKING_SIZES
from ..generate import GenerationConfig
from ..models import DEFAULT_WINDOW, ContextMode, Stage, TrainConfig
from ..models.fillers import DEFAULT_MAX_FILL_TOKENS


class PathsConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    dataset_source: Optional[Path] = None
    dataset_target: Optional[Path] = None
    annotations: Optional[Path] = None
    out_dir: Path = Path("runs")


class CorpusConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    max_story_words: int = Field(DEFAULT_MAX_WORDS, ge=1)
    prompt_vocab_size: int = Field(19025, ge=1)
    story_vocab_size: int = Field(104960, ge=1)
    fill_vocab_size: int = Field(2000, ge=1)
    num_placeholders: int = Field(64, ge=1)
    fill_scheme: TokenScheme = TokenScheme.CHARACTER
    bpe_merges: int = Field(1000, ge=0)
    entity_scheme: EntityScheme = EntityScheme.COREF


class AnnotateConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    verb_lexicon: Optional[Path] = None
    gazetteer: Optional[Path] = None
    pronouns: Optional[list[str]] = None


class ModelConfig(BaseModel):
    """Architecture of one stage model.

    The verb head only applies to the plan stage and the pointer head only to
    the story stage of schemes with entities.
    """

    model_config = ConfigDict(extra="forbid")

    encoder_layers: int = Field(2, ge=1)
    decoder_layers: int = Field(4, ge=1)
    dim: int = Field(128, ge=1)
    heads: int = Field(4, ge=1)
    kernel_width: int = Field(3, ge=1)
    verb_head: bool = True
    pointer_head: bool = True
    context_mode: ContextMode = ContextMode.FULL
    window: int = Field(DEFAULT_WINDOW, ge=0)
    max_fill_tokens: int = Field(DEFAULT_MAX_FILL_TOKENS, ge=1)

    def architecture(self) -> dict[str, int]:
        return {
            "encoder_layers": self.encoder_layers,
            "decoder_layers": self.decoder_layers,
            "dim": self.dim,
            "heads": self.heads,
            "kernel_width": self.kernel_width,
        }


class EvaluateConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    ranking_sizes: list[int] = Field(default_factory=lambda: list(RANKING_SIZES))
    max_ranking_cases: Optional[int] = Field(None, ge=1)
    lcs_shard_size: int = Field(1024, ge=1)
    batch_size: int = Field(16, ge=1)


FILL_DEFAULTS = {"decoder_layers": 2}


class Settings(BaseSettings):
    """Settings of one run; `seed` has no default."""

    seed: int
    scheme: DecompositionScheme = DecompositionScheme.COMBINED
    paths: PathsConfig = Field(default_factory=PathsConfig)
    corpus: CorpusConfig = Field(default_factory=CorpusConfig)
    annotate: AnnotateConfig = Field(default_factory=AnnotateConfig)
    plan: ModelConfig = Field(default_factory=ModelConfig)
    story: ModelConfig = Field(default_factory=ModelConfig)
    fill: ModelConfig = Field(default_factory=lambda: ModelConfig(**FILL_DEFAULTS))
    train: TrainConfig = Field(default_factory=TrainConfig)
    generation: GenerationConfig = Field(default_factory=GenerationConfig)
    evaluate: EvaluateConfig = Field(default_factory=EvaluateConfig)

    model_config = SettingsConfigDict(
        env_prefix="FABULA_",
        env_nested_delimiter="__",
        env_file=".env" if not bool(int(os.getenv("TEST_MODE", "0"))) else None,
        env_file_encoding="utf-8",
        extra="ignore",
        protected_namespaces=("settings_",),
    )

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> tuple[PydanticBaseSettingsSource, ...]:
        return (init_settings, env_settings, dotenv_settings, TomlConfigSettingsSource(settings_cls))

    @pydantic.field_validator("fill", mode="before")
    @classmethod
    def _fill_defaults(cls, value: Any) -> Any:
        if isinstance(value, dict):
            return {**FILL_DEFAULTS, **value}
        return value

    @property
    def layout(self) -> "RunLayout":
        return RunLayout(self.paths.out_dir, self.scheme)

    def stage_model(self, stage: Stage | str) -> ModelConfig:
        return getattr(self, Stage(stage).value)

    def config_hash(self) -> str:
        """First 12 hex digits of the sha256 of the canonical JSON dump."""
        canonical = json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]

    def required_paths(self, command: str) -> list[Path]:
        layout = self.layout
        if command == "preprocess":
            if self.paths.dataset_source is None or self.paths.dataset_target is None:
                raise ValidationError("preprocess needs paths.dataset_source and paths.dataset_target")
            return [self.paths.dataset_source, self.paths.dataset_target]
        if command == "annotate":
            return [layout.prompts, layout.stories]
        if command == "decompose":
            return [layout.prompts, layout.stories, layout.annotations]
        if command == "train":
            return [layout.decomposed]
        if command == "generate":
            return [layout.models / Stage.STORY.value]
        if command == "evaluate":
            return [layout.stories, layout.generated_stories]
        return []

    def check_paths(self, command: str) -> None:
        """Raise ValidationError naming every input `command` reads that is missing."""
        missing = [str(path) for path in self.required_paths(command) if not path.exists()]
        if missing:
            raise ValidationError(f"{command} is missing inputs: {', '.join(missing)}")


class RunLayout:
    """Where each command reads and writes under the output directory."""

    def __init__(self, out_dir: Path, scheme: DecompositionScheme | str):
        self.root = Path(out_dir)
        self.scheme = DecompositionScheme(scheme)

    @property
    def data(self) -> Path:
        return self.root / "data"

    @property
    def prompts(self) -> Path:
        return self.data / "prompts.txt"

    @property
    def stories(self) -> Path:
        return self.data / "stories.txt"

    @property
    def annotations(self) -> Path:
        return self.root / "annotations.jsonl"

    @property
    def decomposed(self) -> Path:
        return self.root / "decomposed" / self.scheme.value

    def pairs(self, stage: Stage | str) -> tuple[Path, Path]:
        name = Stage(stage).value
        return self.decomposed / f"{name}.src", self.decomposed / f"{name}.tgt"

    @property
    def fill_tokens(self) -> Path:
        return self.decomposed / "fill.tokens"

    @property
    def fill_tables(self) -> Path:
        return self.decomposed / "fill.tables.jsonl"

    @property
    def models(self) -> Path:
        return self.root / "models" / self.scheme.value

    @property
    def generated(self) -> Path:
        return self.root / "generated" / self.scheme.value

    @property
    def generated_stories(self) -> Path:
        return self.generated / "stories.txt"

    @property
    def provenance(self) -> Path:
        return self.generated / "provenance.jsonl"

    @property
    def report(self) -> Path:
        return self.root / "reports" / self.scheme.value / "report"


def _parse_value(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def parse_overrides(overrides: Iterable[str]) -> dict[str, Any]:
    """Turn `a.b=value` strings into a nested dict; values parse as JSON when they can."""
    nested: dict[str, Any] = {}
    for override in overrides:
        key, sep, value = override.partition("=")
        if not sep or not key.strip():
            raise ValidationError(f"override {override!r} is not of the form key=value")
        parts = key.strip().split(".")
        if parts[0] not in Settings.model_fields:
            raise ValidationError(f"unknown setting {parts[0]!r}")
        target = nested
        for part in parts[:-1]:
            target = target.setdefault(part, {})
            if not isinstance(target, dict):
                raise ValidationError(f"override {override!r} conflicts with an earlier one")
        target[parts[-1]] = _parse_value(value.strip())
    return nested


def _deep_merge(base: dict[str, Any], top: dict[str, Any]) -> dict[str, Any]:
    merged = dict(base)
    for key, value in top.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_settings(
    config_file: Optional[Path] = None,
    seed: Optional[int] = None,
    out_dir: Optional[Path] = None,
    overrides: Iterable[str] = (),
) -> Settings:
    """Resolve settings from every source; schema errors become ValidationError."""
    if config_file is not None and not Path(config_file).exists():
        raise ValidationError(f"config file {config_file} does not exist")
    flags: dict[str, Any] = {}
    if seed is not None:
        flags["seed"] = seed
    if out_dir is not None:
        flags["paths"] = {"out_dir": str(out_dir)}
    values = _deep_merge(flags, parse_overrides(overrides))

    settings_cls = Settings
    if config_file is not None:
        class FileSettings(Settings):
            model_config = SettingsConfigDict(toml_file=Path(config_file))

        settings_cls = FileSettings
    try:
        return settings_cls(**values)
    except pydantic.ValidationError as e:
        raise ValidationError(f"invalid configuration: {e}") from e
