"""Boolean attention masks with a trailing null-slot column.

Every mask has shape (..., queries, keys + 1). The last column is the null
slot: an extra key with score 0 and a zero value vector. It is always
allowed, so every query row can normalize even when no real key is.
"""

from dataclasses import dataclass
from typing import Iterable, Optional

import torch

from ..errors import ValidationError


@dataclass(frozen=True)
class AttentionMask:
    allowed: torch.Tensor

    def __post_init__(self):
        if self.allowed.dtype != torch.bool or self.allowed.dim() < 2:
            raise ValidationError("attention mask must be a boolean tensor of rank >= 2")
        if not bool(self.allowed.any(dim=-1).all()):
            raise ValidationError("every query row needs at least one allowed key")

    @property
    def num_queries(self) -> int:
        return self.allowed.shape[-2]

    @property
    def num_keys(self) -> int:
        return self.allowed.shape[-1] - 1

    def allowed_keys(self, query: int) -> set[int | str]:
        """Allowed key indices of one query row (unbatched), "null" for the slot."""
        row = self.allowed[..., query, :]
        if row.dim() != 1:
            raise ValidationError("allowed_keys needs an unbatched mask")
        keys: set[int | str] = {i for i in range(self.num_keys) if bool(row[i])}
        if bool(row[-1]):
            keys.add("null")
        return keys


def _with_null(allowed: torch.Tensor) -> AttentionMask:
    null = torch.ones(*allowed.shape[:-1], 1, dtype=torch.bool, device=allowed.device)
    return AttentionMask(torch.cat([allowed, null], dim=-1))


def causal_mask(length: int) -> AttentionMask:
    """Query t sees keys 0..t."""
    return _with_null(torch.ones(length, length, dtype=torch.bool).tril())


def full_mask(
    num_queries: int,
    num_keys: int,
    key_padding: Optional[torch.Tensor] = None,
) -> AttentionMask:
    """Every query sees every key; `key_padding` (batch, keys) marks valid keys."""
    if key_padding is None:
        return _with_null(torch.ones(num_queries, num_keys, dtype=torch.bool))
    allowed = key_padding[:, None, :].expand(-1, num_queries, -1)
    return _with_null(allowed.to(torch.bool))


def positions_mask(length: int, positions: Iterable[int]) -> AttentionMask:
    """Query t sees the listed key positions strictly before t."""
    positions = sorted(set(positions))
    if any(not 0 <= p < length for p in positions):
        raise ValidationError(f"key positions must lie in [0, {length})")
    allowed = torch.zeros(length, length, dtype=torch.bool)
    for p in positions:
        allowed[p + 1:, p] = True
    return _with_null(allowed)


def marked_key_mask(input_ids: torch.Tensor, marker_id: int) -> AttentionMask:
    """Batched causal mask over keys that directly follow `marker_id`.

    `input_ids` is (batch, length) decoder input. Key j is allowed for
    query t when j <= t and input_ids[j - 1] == marker_id.
    """
    batch, length = input_ids.shape
    follows = torch.zeros(batch, length, dtype=torch.bool, device=input_ids.device)
    follows[:, 1:] = input_ids[:, :-1] == marker_id
    causal = torch.ones(length, length, dtype=torch.bool, device=input_ids.device).tril()
    return _with_null(causal[None, :, :] & follows[:, None, :])
