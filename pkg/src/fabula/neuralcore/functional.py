"""Stateless layer operations on torch tensors.

Gradients come from torch autograd; `gradcheck.grad_check` verifies each of
these against central differences.
"""

import math
from typing import Optional

import torch
import torch.nn.functional as F

from ..errors import ValidationError
from .masks import AttentionMask


def embedding_lookup(table: torch.Tensor, indices: torch.Tensor) -> torch.Tensor:
    if indices.numel() and (int(indices.min()) < 0 or int(indices.max()) >= table.shape[0]):
        raise ValidationError(f"embedding index out of range for {table.shape[0]} rows")
    return F.embedding(indices, table)


def conv1d_glu(
    inputs: torch.Tensor,
    weight: torch.Tensor,
    bias: Optional[torch.Tensor] = None,
    causal: bool = False,
    residual: bool = True,
) -> torch.Tensor:
    """Gated 1D convolution over (batch, time, channels).

    `weight` is (2 * out_channels, in_channels, width). The convolution
    output is split into halves (a, b) and gated as a * sigmoid(b). Causal
    convolutions pad width - 1 steps on the left, so position t only sees
    t and earlier; otherwise the kernel is centred and must be odd.
    """
    if inputs.dim() != 3:
        raise ValidationError("conv1d_glu expects (batch, time, channels) input")
    out2, in_channels, width = weight.shape
    if in_channels != inputs.shape[-1]:
        raise ValidationError(
            f"input has {inputs.shape[-1]} channels, kernel expects {in_channels}"
        )
    if out2 % 2:
        raise ValidationError("GLU kernel needs an even number of output channels")
    if causal:
        padding = (width - 1, 0)
    else:
        if width % 2 == 0:
            raise ValidationError("non-causal kernels must have odd width")
        padding = ((width - 1) // 2, (width - 1) // 2)

    x = F.pad(inputs.transpose(1, 2), padding)
    gate_a, gate_b = F.conv1d(x, weight, bias).transpose(1, 2).chunk(2, dim=-1)
    outputs = gate_a * torch.sigmoid(gate_b)
    if residual and outputs.shape == inputs.shape:
        outputs = outputs + inputs
    return outputs


def attention(
    queries: torch.Tensor,
    keys: torch.Tensor,
    values: torch.Tensor,
    mask: Optional[AttentionMask] = None,
) -> tuple[torch.Tensor, torch.Tensor]:
    """Scaled dot-product attention with a null slot.

    The null slot is an extra key scoring 0 whose value is the zero vector.
    Returns the outputs and the weights, whose last column is the null slot.
    """
    scores = queries @ keys.transpose(-1, -2) / math.sqrt(queries.shape[-1])
    null = torch.zeros(*scores.shape[:-1], 1, dtype=scores.dtype, device=scores.device)
    scores = torch.cat([scores, null], dim=-1)
    if mask is not None:
        scores = scores.masked_fill(~mask.allowed, float("-inf"))
    weights = torch.softmax(scores, dim=-1)
    return weights[..., :-1] @ values, weights


def linear(
    inputs: torch.Tensor,
    weight: torch.Tensor,
    bias: Optional[torch.Tensor] = None,
) -> torch.Tensor:
    if inputs.shape[-1] != weight.shape[-1]:
        raise ValidationError(
            f"linear expects {weight.shape[-1]} input features, got {inputs.shape[-1]}"
        )
    return F.linear(inputs, weight, bias)


def softmax(logits: torch.Tensor, dim: int = -1) -> torch.Tensor:
    return torch.softmax(logits, dim=dim)


def log_softmax(logits: torch.Tensor, dim: int = -1) -> torch.Tensor:
    return torch.log_softmax(logits, dim=dim)


def cross_entropy(
    logits: torch.Tensor,
    targets: torch.Tensor,
    ignore_index: Optional[int] = None,
) -> torch.Tensor:
    """Mean per-token negative log likelihood in nats.

    `logits` is (..., vocab) and `targets` the matching (...) ids; targets
    equal to `ignore_index` (padding) are left out of the mean.
    """
    if logits.shape[:-1] != targets.shape:
        raise ValidationError(
            f"logits {tuple(logits.shape)} do not match targets {tuple(targets.shape)}"
        )
    return F.cross_entropy(
        logits.reshape(-1, logits.shape[-1]),
        targets.reshape(-1),
        ignore_index=-100 if ignore_index is None else ignore_index,
    )
