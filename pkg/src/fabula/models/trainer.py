"""Teacher-forced training of one pipeline stage.

Each stage trains on its own pairs, so the stage losses add up to the
decomposed objective -log p(x|z*) - log p(z*). Models with a pointer head
get two extra terms: binary cross-entropy on the copy decision and the
negative log of the pointer attention mass on earlier occurrences of the
placeholder being copied.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import torch
import torch.nn.functional as F
from pydantic import BaseModel, Field

from ..corpus import Vocabulary
from ..errors import EmptyDatasetError, ValidationError
from ..neuralcore import AdamConfig, adam_step, cross_entropy, make_optimizer
from ..seeding import derive_seed, torch_generator
from .config import Seq2SeqConfig
from .seq2seq import Seq2SeqModel, build_model

logger = logging.getLogger(__name__)

EncodedPair = tuple[list[int], list[int]]


class TrainConfig(BaseModel):
    epochs: int = Field(20, ge=1)
    max_steps: Optional[int] = Field(None, ge=1)
    batch_size: int = Field(16, ge=1)
    learning_rate: float = Field(1e-3, gt=0)
    betas: tuple[float, float] = (0.9, 0.999)
    eps: float = 1e-8
    clip_norm: Optional[float] = 1.0
    copy_loss_weight: float = 1.0
    pointer_loss_weight: float = 1.0

    @property
    def adam(self) -> AdamConfig:
        return AdamConfig(
            learning_rate=self.learning_rate,
            betas=self.betas,
            eps=self.eps,
            clip_norm=self.clip_norm,
        )


@dataclass
class TrainResult:
    model: Seq2SeqModel
    epoch_nll: list[float] = field(default_factory=list)
    steps: int = 0


@dataclass(frozen=True)
class Batch:
    source: torch.Tensor
    target_in: torch.Tensor
    target_out: torch.Tensor


def encode_pairs(
    pairs: Sequence[tuple[Sequence[str], Sequence[str]]],
    source_vocab: Vocabulary,
    target_vocab: Vocabulary,
) -> list[EncodedPair]:
    return [(source_vocab.encode(src), target_vocab.encode(tgt)) for src, tgt in pairs]


def collate(pairs: Sequence[EncodedPair], config: Seq2SeqConfig) -> Batch:
    """Pad a batch; decoder input starts with `<s>`, output ends with `</s>`."""
    src_len = max(len(src) for src, _ in pairs)
    tgt_len = max(len(tgt) for _, tgt in pairs) + 1
    source = torch.full((len(pairs), src_len), config.pad_id, dtype=torch.long)
    target_in = torch.full((len(pairs), tgt_len), config.pad_id, dtype=torch.long)
    target_out = torch.full((len(pairs), tgt_len), config.pad_id, dtype=torch.long)
    for i, (src, tgt) in enumerate(pairs):
        if not src:
            raise ValidationError("training pairs need a non-empty source")
        source[i, :len(src)] = torch.tensor(src)
        target_in[i, :len(tgt) + 1] = torch.tensor([config.bos_id, *tgt])
        target_out[i, :len(tgt) + 1] = torch.tensor([*tgt, config.eos_id])
    return Batch(source=source, target_in=target_in, target_out=target_out)


def copy_targets(batch: Batch, placeholder_ids: Sequence[int]) -> tuple[torch.Tensor, torch.Tensor]:
    """Copy labels per output position and the prefix positions to copy from.

    A position is a copy when its gold token is a placeholder already in
    the gold decoder input at or before it.
    """
    is_placeholder = torch.isin(batch.target_out, torch.tensor(list(placeholder_ids)))
    length = batch.target_in.shape[1]
    causal = torch.ones(length, length, dtype=torch.bool).tril()
    sources = (batch.target_in[:, None, :] == batch.target_out[:, :, None]) & causal
    sources &= is_placeholder[..., None]
    return sources.any(-1), sources


def stage_losses(model: Seq2SeqModel, batch: Batch, config: TrainConfig) -> dict[str, torch.Tensor]:
    output = model(batch.source, batch.target_in)
    pad = model.config.pad_id
    losses = {"nll": cross_entropy(output.logits, batch.target_out, ignore_index=pad)}
    total = losses["nll"]
    if output.copy_logits is not None:
        valid = batch.target_out != pad
        copy, sources = copy_targets(batch, model.config.placeholder_ids)
        losses["copy"] = F.binary_cross_entropy_with_logits(
            output.copy_logits[valid], copy[valid].to(output.copy_logits.dtype)
        )
        if bool(copy.any()):
            mass = (output.pointer_weights[..., :-1] * sources).sum(-1)[copy]
            losses["pointer"] = -torch.log(mass.clamp_min(1e-12)).mean()
        else:
            losses["pointer"] = output.copy_logits.new_zeros(())
        total = (
            total
            + config.copy_loss_weight * losses["copy"]
            + config.pointer_loss_weight * losses["pointer"]
        )
    losses["total"] = total
    return losses


def _token_count(batch: Batch, pad: int) -> int:
    return int((batch.target_out != pad).sum())


def train_model(
    pairs: Sequence[EncodedPair],
    model_config: Seq2SeqConfig,
    config: TrainConfig,
    seed: int,
    stage: str = "model",
    on_epoch: Optional[Callable[[int, float], None]] = None,
) -> TrainResult:
    """Train a fresh model on encoded pairs; returns it with per-epoch NLL.

    Initialization and batch order derive from `seed` and `stage` only, so
    a rerun reproduces the loss curve exactly.
    """
    if not pairs:
        raise EmptyDatasetError(f"no training pairs for stage {stage}")
    model = build_model(model_config, derive_seed(seed, "init", stage))
    optimizer = make_optimizer(model.parameters(), config.adam)
    generator = torch_generator(seed, "batches", stage)
    result = TrainResult(model=model)

    model.train()
    for epoch in range(config.epochs):
        order = torch.randperm(len(pairs), generator=generator).tolist()
        weighted, tokens = 0.0, 0
        for start in range(0, len(order), config.batch_size):
            batch = collate([pairs[i] for i in order[start:start + config.batch_size]], model_config)
            losses = stage_losses(model, batch, config)
            losses["total"].backward()
            adam_step(optimizer, config.adam)
            count = _token_count(batch, model_config.pad_id)
            weighted += losses["nll"].item() * count
            tokens += count
            result.steps += 1
            if config.max_steps is not None and result.steps >= config.max_steps:
                break
        nll = weighted / max(tokens, 1)
        result.epoch_nll.append(nll)
        logger.info("%s epoch %d/%d: nll %.4f nats/token", stage, epoch + 1, config.epochs, nll)
        if on_epoch is not None:
            on_epoch(epoch, nll)
        if config.max_steps is not None and result.steps >= config.max_steps:
            break
    model.eval()
    return result


@torch.no_grad()
def evaluate_nll(model: Seq2SeqModel, pairs: Sequence[EncodedPair], batch_size: int = 16) -> float:
    """Mean per-token NLL in nats under teacher forcing."""
    if not pairs:
        raise EmptyDatasetError("no pairs to evaluate")
    model.eval()
    pad = model.config.pad_id
    weighted, tokens = 0.0, 0
    for start in range(0, len(pairs), batch_size):
        batch = collate(pairs[start:start + batch_size], model.config)
        output = model(batch.source, batch.target_in)
        count = _token_count(batch, pad)
        weighted += cross_entropy(output.logits, batch.target_out, ignore_index=pad).item() * count
        tokens += count
    return weighted / tokens
