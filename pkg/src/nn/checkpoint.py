"""Parameter checkpoints.

Binary layout (all little-endian):
    u64 tensor count
    u64 rows, u64 cols        for each tensor, in order
    f64 payload (row-major)   for each tensor, in the same order

A JSON header next to the payload names the model type, its config, the
parameter order with original shapes, and any extra state (vocabularies).
"""
from pathlib import Path
from typing import Any, Dict, List, Tuple

import numpy as np
import orjson

from src.errors import CheckpointError

PARAMS_FILE = "params.bin"
HEADER_FILE = "header.json"

_U64 = np.dtype("<u8")
_F64 = np.dtype("<f8")


def save_parameters(path: Path, tensors: List[np.ndarray]) -> None:
    shapes = []
    for tensor in tensors:
        if tensor.ndim > 2:
            raise CheckpointError(f"only 1-D and 2-D tensors are stored, got shape {tensor.shape}")
        shapes.extend(tensor.reshape(tensor.shape[0] if tensor.ndim == 2 else 1, -1).shape)
    with Path(path).open("wb") as handle:
        handle.write(np.array([len(tensors)], dtype=_U64).tobytes())
        handle.write(np.array(shapes, dtype=_U64).tobytes())
        for tensor in tensors:
            handle.write(np.ascontiguousarray(tensor, dtype=_F64).tobytes())


def load_parameters(path: Path) -> List[np.ndarray]:
    """Read tensors back as 2-D float64 arrays."""
    data = Path(path).read_bytes()
    if len(data) < 8:
        raise CheckpointError(f"{path}: truncated header")
    count = int(np.frombuffer(data, dtype=_U64, count=1)[0])
    header_end = 8 + 16 * count
    if len(data) < header_end:
        raise CheckpointError(f"{path}: truncated shape table for {count} tensors")
    shapes = np.frombuffer(data, dtype=_U64, count=2 * count, offset=8).reshape(count, 2)

    tensors, offset = [], header_end
    for rows, cols in shapes:
        size = int(rows) * int(cols)
        if len(data) < offset + 8 * size:
            raise CheckpointError(f"{path}: payload ends before tensor of shape ({rows}, {cols})")
        tensors.append(np.frombuffer(data, dtype=_F64, count=size, offset=offset).reshape(int(rows), int(cols)).copy())
        offset += 8 * size
    if offset != len(data):
        raise CheckpointError(f"{path}: {len(data) - offset} trailing bytes")
    return tensors


def save_checkpoint(directory: Path, model_type: str, config: Dict[str, Any],
                    params: Dict[str, np.ndarray], extra: Dict[str, Any] | None = None) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    header = {
        "model_type": model_type,
        "config": config,
        "parameters": [{"name": name, "shape": list(array.shape)} for name, array in params.items()],
        "extra": extra or {},
    }
    save_parameters(directory / PARAMS_FILE, list(params.values()))
    (directory / HEADER_FILE).write_bytes(orjson.dumps(header, option=orjson.OPT_INDENT_2 | orjson.OPT_SERIALIZE_NUMPY))


def read_header(directory: Path) -> Dict[str, Any]:
    path = Path(directory) / HEADER_FILE
    if not path.exists():
        raise CheckpointError(f"No checkpoint header at {path}")
    try:
        return orjson.loads(path.read_bytes())
    except orjson.JSONDecodeError as e:
        raise CheckpointError(f"{path}: {e}") from e


def load_checkpoint(directory: Path) -> Tuple[Dict[str, Any], Dict[str, np.ndarray]]:
    header = read_header(directory)
    tensors = load_parameters(Path(directory) / PARAMS_FILE)
    entries = header["parameters"]
    if len(entries) != len(tensors):
        raise CheckpointError(f"header lists {len(entries)} parameters, payload has {len(tensors)}")
    params = {}
    for entry, tensor in zip(entries, tensors):
        if tensor.size != int(np.prod(entry["shape"])):
            raise CheckpointError(f"parameter {entry['name']} does not match its header shape {entry['shape']}")
        params[entry["name"]] = tensor.reshape(entry["shape"])
    return header, params
