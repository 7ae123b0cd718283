"""Central-difference verification of reverse-mode gradients."""

from typing import Callable, Sequence

import torch
from torch import nn
from torch.func import functional_call

from ..errors import ValidationError

DEFAULT_EPS = 1e-5


def _project(outputs, projections: list[torch.Tensor]) -> torch.Tensor:
    if isinstance(outputs, torch.Tensor):
        outputs = (outputs,)
    return sum((out * proj).sum() for out, proj in zip(outputs, projections))


def grad_check(
    operation: Callable[..., torch.Tensor | tuple[torch.Tensor, ...]],
    inputs: Sequence[torch.Tensor],
    eps: float = DEFAULT_EPS,
    seed: int = 0,
) -> float:
    """Max relative error between autograd and central differences.

    Outputs are reduced to a scalar through a fixed random projection, so
    every output coordinate contributes. The relative error per coordinate
    is |a - n| / max(|a|, |n|, 1e-2).
    """
    if any(x.dtype != torch.float64 for x in inputs):
        raise ValidationError("gradient checks run in double precision")
    inputs = [x.detach().clone().requires_grad_(True) for x in inputs]

    generator = torch.Generator().manual_seed(seed)
    outputs = operation(*inputs)
    flat = (outputs,) if isinstance(outputs, torch.Tensor) else tuple(outputs)
    projections = [
        torch.randn(out.shape, generator=generator, dtype=torch.float64) for out in flat
    ]

    analytic = torch.autograd.grad(
        _project(outputs, projections), inputs, allow_unused=True
    )

    worst = 0.0
    with torch.no_grad():
        for x, grad in zip(inputs, analytic):
            grad = torch.zeros_like(x) if grad is None else grad
            values = x.view(-1)
            for i in range(values.numel()):
                original = values[i].item()
                values[i] = original + eps
                plus = _project(operation(*inputs), projections).item()
                values[i] = original - eps
                minus = _project(operation(*inputs), projections).item()
                values[i] = original
                numeric = (plus - minus) / (2 * eps)
                a = grad.view(-1)[i].item()
                error = abs(a - numeric) / max(abs(a), abs(numeric), 1e-2)
                worst = max(worst, error)
    return worst


def grad_check_module(
    module: nn.Module,
    inputs: Sequence[torch.Tensor],
    eps: float = DEFAULT_EPS,
    seed: int = 0,
    differentiable_inputs: bool = True,
    **kwargs,
) -> float:
    """grad_check over a module's parameters and, optionally, its inputs.

    Keyword arguments (masks, flags) are passed to the module unchanged.
    """
    names = [name for name, _ in module.named_parameters()]
    params = [p.detach().to(torch.float64) for _, p in module.named_parameters()]
    inputs = list(inputs)

    if differentiable_inputs:
        def operation(*args):
            values = dict(zip(names, args[len(inputs):]))
            return functional_call(module, values, tuple(args[:len(inputs)]), kwargs)
        return grad_check(operation, [*inputs, *params], eps=eps, seed=seed)

    def operation(*args):
        return functional_call(module, dict(zip(names, args)), tuple(inputs), kwargs)
    return grad_check(operation, params, eps=eps, seed=seed)
