"""Named random substreams derived from a single run seed."""

import hashlib

import numpy as np
import torch


def derive_seed(seed: int, *names: object) -> int:
    """Derive a 63-bit seed for the substream identified by `names`."""
    key = ":".join([str(seed), *(str(n) for n in names)]).encode("utf-8")
    return int.from_bytes(hashlib.sha256(key).digest()[:8], "little") >> 1


def torch_generator(seed: int, *names: object) -> torch.Generator:
    generator = torch.Generator()
    generator.manual_seed(derive_seed(seed, *names))
    return generator


def numpy_generator(seed: int, *names: object) -> np.random.Generator:
    return np.random.default_rng(derive_seed(seed, *names))
