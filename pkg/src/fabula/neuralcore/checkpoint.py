"""Named-tensor checkpoint files.

Layout (version 1):

    magic     b"FBCK"
    version   uint32, little-endian
    length    uint64, little-endian, size of the JSON header in bytes
    header    UTF-8 JSON: {"tensors": [{"name", "dtype", "shape", "offset"}], "metadata": {...}}
    payload   raw little-endian values, tensors back to back; offsets are
              relative to the start of the payload

Supported dtypes are float32, float64 and int64.
"""

import json
from pathlib import Path
from typing import Any, Mapping, Optional

import numpy as np
import torch

from ..errors import ValidationError

MAGIC = b"FBCK"
FORMAT_VERSION = 1

_DTYPES = {
    "float32": (torch.float32, np.dtype("<f4")),
    "float64": (torch.float64, np.dtype("<f8")),
    "int64": (torch.int64, np.dtype("<i8")),
}
_NAMES = {torch_dtype: name for name, (torch_dtype, _) in _DTYPES.items()}


def save_checkpoint(
    path: Path,
    tensors: Mapping[str, torch.Tensor],
    metadata: Optional[Mapping[str, Any]] = None,
) -> None:
    entries = []
    chunks = []
    offset = 0
    for name, tensor in tensors.items():
        if tensor.dtype not in _NAMES:
            raise ValidationError(f"cannot checkpoint {name} with dtype {tensor.dtype}")
        dtype = _NAMES[tensor.dtype]
        data = tensor.detach().cpu().contiguous().numpy().astype(_DTYPES[dtype][1]).tobytes()
        entries.append({
            "name": name, "dtype": dtype, "shape": list(tensor.shape), "offset": offset,
        })
        chunks.append(data)
        offset += len(data)

    header = json.dumps(
        {"tensors": entries, "metadata": dict(metadata or {})}, sort_keys=True
    ).encode("utf-8")
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(np.array([FORMAT_VERSION], dtype="<u4").tobytes())
        f.write(np.array([len(header)], dtype="<u8").tobytes())
        f.write(header)
        for chunk in chunks:
            f.write(chunk)


def load_checkpoint(path: Path) -> tuple[dict[str, torch.Tensor], dict[str, Any]]:
    """Return the named tensors and the metadata of a checkpoint file."""
    data = Path(path).read_bytes()
    if data[:4] != MAGIC:
        raise ValidationError(f"{path} is not a fabula checkpoint")
    version = int(np.frombuffer(data, dtype="<u4", count=1, offset=4)[0])
    if version != FORMAT_VERSION:
        raise ValidationError(f"unsupported checkpoint version {version}")
    length = int(np.frombuffer(data, dtype="<u8", count=1, offset=8)[0])
    try:
        header = json.loads(data[16:16 + length].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise ValidationError(f"corrupt checkpoint header in {path}") from e

    payload = 16 + length
    tensors = {}
    for entry in header["tensors"]:
        torch_dtype, np_dtype = _DTYPES[entry["dtype"]]
        count = int(np.prod(entry["shape"], dtype=np.int64))
        start = payload + entry["offset"]
        if start + count * np_dtype.itemsize > len(data):
            raise ValidationError(f"checkpoint {path} is truncated at {entry['name']}")
        values = np.frombuffer(data, dtype=np_dtype, count=count, offset=start)
        tensors[entry["name"]] = torch.from_numpy(
            values.astype(np_dtype.newbyteorder("="), copy=True).reshape(entry["shape"])
        ).to(torch_dtype)
    return tensors, header["metadata"]
