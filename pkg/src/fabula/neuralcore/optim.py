from dataclasses import dataclass
from typing import Iterable, Optional

import torch
from torch import nn


@dataclass(frozen=True)
class AdamConfig:
    learning_rate: float = 1e-3
    betas: tuple[float, float] = (0.9, 0.999)
    eps: float = 1e-8
    clip_norm: Optional[float] = 1.0


def make_optimizer(parameters: Iterable[nn.Parameter], config: AdamConfig) -> torch.optim.Adam:
    return torch.optim.Adam(
        parameters, lr=config.learning_rate, betas=config.betas, eps=config.eps
    )


def adam_step(optimizer: torch.optim.Adam, config: AdamConfig) -> None:
    """Clip, apply one bias-corrected Adam update and clear the gradients."""
    if config.clip_norm is not None:
        params = [p for group in optimizer.param_groups for p in group["params"]]
        nn.utils.clip_grad_norm_(params, config.clip_norm)
    optimizer.step()
    optimizer.zero_grad(set_to_none=False)
