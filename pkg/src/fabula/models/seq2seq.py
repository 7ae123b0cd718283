"""Convolutional encoder-decoder with gated multi-head self-attention.

The encoder is a stack of gated convolutions over token plus position
embeddings. Every decoder layer runs a causal gated convolution, gated
self-attention and attention over the encoder output, each with a
residual connection. One self-attention head may be restricted to
previously generated verbs, another may drive the pointer-copy branch.
"""

from dataclasses import dataclass
from typing import Optional, Protocol, Sequence

import torch
from torch import nn

from ..errors import ValidationError
from ..neuralcore import (AttentionMask, Conv1dGlu, EncoderAttention,
                          GatedSelfAttention, marked_key_mask)
from .config import Seq2SeqConfig


@dataclass
class DecoderOutput:
    logits: torch.Tensor
    states: torch.Tensor
    copy_logits: Optional[torch.Tensor] = None
    pointer_weights: Optional[torch.Tensor] = None
    verb_weights: Optional[torch.Tensor] = None


@dataclass(frozen=True)
class StepOutput:
    """Next-token scores for the last prefix position.

    `pointer_row` holds the pointer head's attention over the prefix
    positions, `p_copy` the copy probability; both are None for models
    without a pointer head.
    """

    logits: torch.Tensor
    p_copy: Optional[float] = None
    pointer_row: Optional[torch.Tensor] = None


class DecodingModel(Protocol):
    """Anything that scores the next token given a source and a prefix."""

    def step(self, source_ids: Sequence[int], prefix_ids: Sequence[int]) -> StepOutput:
        ...


class DecoderLayer(nn.Module):
    def __init__(self, config: Seq2SeqConfig):
        super().__init__()
        self.conv = Conv1dGlu(config.dim, config.dim, config.kernel_width, causal=True)
        self.self_attention = GatedSelfAttention(config.dim, config.heads)
        self.encoder_attention = EncoderAttention(config.dim, config.heads)

    def forward(
        self,
        states: torch.Tensor,
        encoded: torch.Tensor,
        source_valid: torch.Tensor,
        head_masks: Sequence[Optional[AttentionMask]],
    ) -> tuple[torch.Tensor, torch.Tensor]:
        states = self.conv(states)
        attended, weights = self.self_attention(states, head_masks)
        states = states + attended
        context, _ = self.encoder_attention(states, encoded, source_valid)
        return states + context, weights


class Seq2SeqModel(nn.Module):
    def __init__(self, config: Seq2SeqConfig):
        super().__init__()
        self.config = config
        dim = config.dim
        self.source_embedding = nn.Embedding(config.source_vocab_size, dim, padding_idx=config.pad_id)
        self.source_positions = nn.Embedding(config.max_positions, dim)
        self.target_embedding = nn.Embedding(config.target_vocab_size, dim, padding_idx=config.pad_id)
        self.target_positions = nn.Embedding(config.max_positions, dim)
        self.encoder = nn.ModuleList(
            Conv1dGlu(dim, dim, config.kernel_width) for _ in range(config.encoder_layers)
        )
        self.decoder = nn.ModuleList(DecoderLayer(config) for _ in range(config.decoder_layers))
        self.output = nn.Linear(dim, config.target_vocab_size)
        self.copy = (
            nn.Linear(dim, 1, bias=False) if config.pointer_head is not None else None
        )
        self._cache: Optional[tuple[tuple[int, ...], torch.Tensor, torch.Tensor]] = None

    def _embed(self, ids: torch.Tensor, tokens: nn.Embedding, positions: nn.Embedding) -> torch.Tensor:
        length = ids.shape[1]
        if length > self.config.max_positions:
            raise ValidationError(
                f"sequence of {length} tokens exceeds {self.config.max_positions} positions"
            )
        return tokens(ids) + positions(torch.arange(length, device=ids.device))[None]

    def encode(self, source_ids: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        """Encoder states and the (batch, length) mask of real source tokens."""
        valid = source_ids != self.config.pad_id
        states = self._embed(source_ids, self.source_embedding, self.source_positions)
        for conv in self.encoder:
            states = conv(states) * valid[..., None]
        return states, valid

    def head_masks(self, target_in: torch.Tensor) -> list[Optional[AttentionMask]]:
        masks: list[Optional[AttentionMask]] = [None] * self.config.heads
        if self.config.verb_head is not None:
            masks[self.config.verb_head] = marked_key_mask(target_in, self.config.frame_id)
        return masks

    def decode(
        self,
        encoded: torch.Tensor,
        source_valid: torch.Tensor,
        target_in: torch.Tensor,
    ) -> DecoderOutput:
        states = self._embed(target_in, self.target_embedding, self.target_positions)
        masks = self.head_masks(target_in)
        weights = None
        for layer in self.decoder:
            states, weights = layer(states, encoded, source_valid, masks)

        output = DecoderOutput(logits=self.output(states), states=states)
        if self.config.verb_head is not None:
            output.verb_weights = weights[:, self.config.verb_head]
        if self.copy is not None:
            output.copy_logits = self.copy(states).squeeze(-1)
            output.pointer_weights = weights[:, self.config.pointer_head]
        return output

    def forward(self, source_ids: torch.Tensor, target_in: torch.Tensor) -> DecoderOutput:
        return self.decode(*self.encode(source_ids), target_in)

    @torch.no_grad()
    def step(self, source_ids: Sequence[int], prefix_ids: Sequence[int]) -> StepOutput:
        """Score the token after `prefix_ids`, which starts with `<s>`."""
        if not prefix_ids:
            raise ValidationError("decoding prefix must start with the begin token")
        if not source_ids:
            raise ValidationError("cannot decode from an empty source")
        if self.training:
            self.eval()
        source = tuple(source_ids)
        if self._cache is None or self._cache[0] != source:
            encoded, valid = self.encode(torch.tensor([source], dtype=torch.long))
            self._cache = (source, encoded, valid)
        _, encoded, valid = self._cache
        output = self.decode(encoded, valid, torch.tensor([list(prefix_ids)], dtype=torch.long))
        if output.copy_logits is None:
            return StepOutput(logits=output.logits[0, -1])
        return StepOutput(
            logits=output.logits[0, -1],
            p_copy=torch.sigmoid(output.copy_logits[0, -1]).item(),
            pointer_row=output.pointer_weights[0, -1, :-1],
        )

    def train(self, mode: bool = True) -> "Seq2SeqModel":
        self._cache = None
        return super().train(mode)


def build_model(config: Seq2SeqConfig, seed: int) -> Seq2SeqModel:
    """Initialize a model from `seed` without touching the global RNG state."""
    with torch.random.fork_rng(devices=[]):
        torch.manual_seed(seed)
        return Seq2SeqModel(config)
