from .checkpoint import FORMAT_VERSION, load_checkpoint, save_checkpoint
from .functional import (attention, conv1d_glu, cross_entropy, embedding_lookup,
                         linear, log_softmax, softmax)
from .gradcheck import DEFAULT_EPS, grad_check, grad_check_module
from .layers import (Conv1dGlu, EncoderAttention, GatedSelfAttention,
                     stack_head_masks)
from .masks import (AttentionMask, causal_mask, full_mask, marked_key_mask,
                    positions_mask)
from .optim import AdamConfig, adam_step, make_optimizer

__all__ = [
    'FORMAT_VERSION', 'load_checkpoint', 'save_checkpoint',
    'attention', 'conv1d_glu', 'cross_entropy', 'embedding_lookup', 'linear',
    'log_softmax', 'softmax',
    'DEFAULT_EPS', 'grad_check', 'grad_check_module',
    'Conv1dGlu', 'EncoderAttention', 'GatedSelfAttention', 'stack_head_masks',
    'AttentionMask', 'causal_mask', 'full_mask', 'marked_key_mask',
    'positions_mask',
    'AdamConfig', 'adam_step', 'make_optimizer',
]
