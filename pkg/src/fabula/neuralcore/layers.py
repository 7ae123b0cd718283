"""Parameterized layers: gated convolutions and multi-head attention."""

from typing import Optional, Sequence

import torch
from torch import nn

from ..errors import ValidationError
from . import functional
from .masks import AttentionMask, causal_mask, full_mask


class Conv1dGlu(nn.Module):
    def __init__(self, in_channels: int, out_channels: int, width: int, causal: bool = False):
        super().__init__()
        if not causal and width % 2 == 0:
            raise ValidationError("non-causal kernels must have odd width")
        self.causal = causal
        self.weight = nn.Parameter(torch.empty(2 * out_channels, in_channels, width))
        self.bias = nn.Parameter(torch.zeros(2 * out_channels))
        nn.init.xavier_uniform_(self.weight)

    def forward(self, inputs: torch.Tensor) -> torch.Tensor:
        return functional.conv1d_glu(inputs, self.weight, self.bias, causal=self.causal)


def _split_heads(x: torch.Tensor, heads: int) -> torch.Tensor:
    batch, length, dim = x.shape
    return x.view(batch, length, heads, dim // heads).transpose(1, 2)


def _merge_heads(x: torch.Tensor) -> torch.Tensor:
    batch, heads, length, head_dim = x.shape
    return x.transpose(1, 2).reshape(batch, length, heads * head_dim)


def stack_head_masks(
    masks: Sequence[AttentionMask], batch: int
) -> AttentionMask:
    """Broadcast per-head masks to (batch, heads, queries, keys + 1)."""
    allowed = [
        m.allowed.expand(batch, *m.allowed.shape[-2:]) for m in masks
    ]
    return AttentionMask(torch.stack(allowed, dim=1))


class GatedSelfAttention(nn.Module):
    """Multi-head self-attention whose output is gated by the input state.

    Each head gets its own mask; heads without one use the causal mask.
    The output projection is multiplied elementwise by
    sigmoid(gate(states)) before the caller adds the residual.
    """

    def __init__(self, dim: int, heads: int):
        super().__init__()
        if dim % heads:
            raise ValidationError(f"{heads} heads do not divide model dimension {dim}")
        self.heads = heads
        self.query = nn.Linear(dim, dim)
        self.key = nn.Linear(dim, dim)
        self.value = nn.Linear(dim, dim)
        self.output = nn.Linear(dim, dim)
        self.gate = nn.Linear(dim, dim)

    def forward(
        self,
        states: torch.Tensor,
        head_masks: Optional[Sequence[Optional[AttentionMask]]] = None,
    ) -> tuple[torch.Tensor, torch.Tensor]:
        batch, length, _ = states.shape
        default = causal_mask(length)
        head_masks = list(head_masks or [])
        if len(head_masks) > self.heads:
            raise ValidationError(f"{len(head_masks)} masks for {self.heads} heads")
        head_masks += [None] * (self.heads - len(head_masks))
        mask = stack_head_masks([m if m is not None else default for m in head_masks], batch)

        q = _split_heads(self.query(states), self.heads)
        k = _split_heads(self.key(states), self.heads)
        v = _split_heads(self.value(states), self.heads)
        attended, weights = functional.attention(q, k, v, mask)
        gated = self.output(_merge_heads(attended)) * torch.sigmoid(self.gate(states))
        return gated, weights


class EncoderAttention(nn.Module):
    """Multi-head attention from decoder states onto encoder outputs."""

    def __init__(self, dim: int, heads: int):
        super().__init__()
        if dim % heads:
            raise ValidationError(f"{heads} heads do not divide model dimension {dim}")
        self.heads = heads
        self.query = nn.Linear(dim, dim)
        self.key = nn.Linear(dim, dim)
        self.value = nn.Linear(dim, dim)
        self.output = nn.Linear(dim, dim)

    def forward(
        self,
        states: torch.Tensor,
        encoded: torch.Tensor,
        source_valid: Optional[torch.Tensor] = None,
    ) -> tuple[torch.Tensor, torch.Tensor]:
        mask = full_mask(states.shape[1], encoded.shape[1], source_valid)
        allowed = mask.allowed
        allowed = allowed[:, None] if allowed.dim() == 3 else allowed[None, None]
        q = _split_heads(self.query(states), self.heads)
        k = _split_heads(self.key(encoded), self.heads)
        v = _split_heads(self.value(encoded), self.heads)
        attended, weights = functional.attention(q, k, v, AttentionMask(allowed))
        return self.output(_merge_heads(attended)), weights
