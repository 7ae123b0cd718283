"""Trained stage models on disk and the pipeline bundle built from them.

Each stage lives in its own directory:

    <models>/<stage>/manifest.json
    <models>/<stage>/model.ckpt
    <models>/<stage>/source.vocab
    <models>/<stage>/target.vocab
    <models>/<stage>/merges.txt      (BPE fillers only)
"""

import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Optional

import pydantic
from pydantic import BaseModel, ConfigDict, Field

from ..corpus import MergeTable, TokenScheme, Vocabulary, load_merges, save_merges
from ..decompose import DecompositionScheme, EntityScheme
from ..errors import ValidationError
from ..neuralcore import FORMAT_VERSION, load_checkpoint, save_checkpoint
from .config import Seq2SeqConfig
from .fillers import DEFAULT_WINDOW, ContextMode, ReferenceFiller
from .seq2seq import Seq2SeqModel

logger = logging.getLogger(__name__)

MANIFEST = "manifest.json"


class Stage(str, Enum):
    PLAN = "plan"
    STORY = "story"
    FILL = "fill"


class ModelManifest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    format_version: int = FORMAT_VERSION
    stage: Stage
    scheme: DecompositionScheme
    entity_scheme: Optional[EntityScheme] = None
    seed: int
    config: Seq2SeqConfig
    checkpoint: str = "model.ckpt"
    source_vocab: str = "source.vocab"
    target_vocab: str = "target.vocab"
    source_scheme: TokenScheme = TokenScheme.WORD
    merges: Optional[str] = None
    context_mode: ContextMode = ContextMode.FULL
    window: int = Field(DEFAULT_WINDOW, ge=0)
    epoch_nll: list[float] = Field(default_factory=list)


@dataclass
class StageModel:
    model: Seq2SeqModel
    source_vocab: Vocabulary
    target_vocab: Vocabulary


@dataclass
class PipelineBundle:
    """The models one decomposition scheme needs, with shared vocabularies.

    `plan` exists for srl-plan and combined, `filler` for every scheme
    with entity placeholders.
    """

    scheme: DecompositionScheme
    story: StageModel
    plan: Optional[StageModel] = None
    filler: Optional[ReferenceFiller] = None

    def __post_init__(self):
        self.scheme = DecompositionScheme(self.scheme)
        if self.scheme.has_plan != (self.plan is not None):
            raise ValidationError(f"scheme {self.scheme.value} plan model mismatch")
        if self.scheme.has_entities != (self.filler is not None):
            raise ValidationError(f"scheme {self.scheme.value} fill model mismatch")
        if self.plan is not None and self.plan.target_vocab.entries != self.story.source_vocab.entries:
            raise ValidationError("plan target vocabulary must equal the story source vocabulary")
        if self.filler is not None and self.story.target_vocab.num_placeholders == 0:
            raise ValidationError("story vocabulary has no placeholder tokens")

    @property
    def entity_scheme(self) -> Optional[EntityScheme]:
        return None if self.filler is None else self.filler.entity_scheme


def save_stage(
    directory: Path,
    manifest: ModelManifest,
    model: Seq2SeqModel,
    source_vocab: Vocabulary,
    target_vocab: Vocabulary,
    merges: Optional[MergeTable] = None,
) -> Path:
    """Write a trained stage under `directory/<stage>` and return that path."""
    stage_dir = directory / manifest.stage.value
    stage_dir.mkdir(parents=True, exist_ok=True)
    if merges is not None:
        manifest = manifest.model_copy(update={"merges": "merges.txt"})
        save_merges(merges, stage_dir / "merges.txt")
    save_checkpoint(
        stage_dir / manifest.checkpoint,
        model.state_dict(),
        {"stage": manifest.stage.value, "seed": manifest.seed},
    )
    source_vocab.save(stage_dir / manifest.source_vocab)
    target_vocab.save(stage_dir / manifest.target_vocab)
    (stage_dir / MANIFEST).write_text(manifest.model_dump_json(indent=2), encoding="utf-8")
    logger.info("Saved %s model to %s", manifest.stage.value, stage_dir)
    return stage_dir


def read_manifest(stage_dir: Path) -> ModelManifest:
    path = stage_dir / MANIFEST
    if not path.exists():
        raise ValidationError(f"no model manifest in {stage_dir}")
    try:
        manifest = ModelManifest.model_validate_json(path.read_text(encoding="utf-8"))
    except pydantic.ValidationError as e:
        raise ValidationError(f"invalid manifest {path}: {e}") from e
    if manifest.format_version != FORMAT_VERSION:
        raise ValidationError(f"unsupported manifest version {manifest.format_version}")
    return manifest


def load_stage(stage_dir: Path) -> tuple[ModelManifest, StageModel, Optional[MergeTable]]:
    manifest = read_manifest(stage_dir)
    tensors, _ = load_checkpoint(stage_dir / manifest.checkpoint)
    model = Seq2SeqModel(manifest.config)
    model.load_state_dict({
        name: tensors[name].to(param.dtype) for name, param in model.state_dict().items()
    })
    model.eval()
    stage = StageModel(
        model=model,
        source_vocab=Vocabulary.load(stage_dir / manifest.source_vocab, manifest.source_scheme),
        target_vocab=Vocabulary.load(stage_dir / manifest.target_vocab, manifest.config.target_scheme),
    )
    merges = load_merges(stage_dir / manifest.merges) if manifest.merges else None
    return manifest, stage, merges


def load_bundle(directory: Path) -> PipelineBundle:
    """Rebuild the pipeline from the stage directories under `directory`."""
    story_manifest, story, _ = load_stage(directory / Stage.STORY.value)
    plan = None
    if (directory / Stage.PLAN.value / MANIFEST).exists():
        _, plan, _ = load_stage(directory / Stage.PLAN.value)
    filler = None
    if (directory / Stage.FILL.value / MANIFEST).exists():
        fill_manifest, fill, merges = load_stage(directory / Stage.FILL.value)
        filler = ReferenceFiller(
            model=fill.model,
            source_vocab=fill.source_vocab,
            target_vocab=fill.target_vocab,
            entity_scheme=fill_manifest.entity_scheme,
            merges=merges or [],
            context_mode=fill_manifest.context_mode,
            window=fill_manifest.window,
        )
    return PipelineBundle(scheme=story_manifest.scheme, story=story, plan=plan, filler=filler)
