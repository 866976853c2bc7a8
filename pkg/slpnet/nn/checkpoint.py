"""Self-describing checkpoint container.

Layout (all integers little-endian uint32)::

    magic "SLPNETCK" | version | config length | config JSON
    | entry count | entries... | sha256 of every preceding byte

Each entry is: name length, UTF-8 name, rank, dims..., float32 payload.
The bytes are a pure function of the parameters and the config, so equal
runs produce identical files.
"""

import hashlib
import json
import logging
import struct
from pathlib import Path
from typing import Dict, Optional, Tuple, Union

import numpy as np
from pydantic import ValidationError

from slpnet.core.errors import CheckpointError
from slpnet.nn.model import SLPNet, build
from slpnet.schemas.model import ModelConfig

logger = logging.getLogger(__name__)

MAGIC = b"SLPNETCK"
FORMAT_VERSION = 1
_U32 = struct.Struct("<I")
_DIGEST_SIZE = hashlib.sha256().digest_size


def encode(model: SLPNet) -> bytes:
    config_bytes = model.config.model_dump_json().encode("utf-8")
    store = model.param_store()
    parts = [MAGIC, _U32.pack(FORMAT_VERSION), _U32.pack(len(config_bytes)), config_bytes, _U32.pack(len(store))]
    for entry in store:
        name = entry.name.encode("utf-8")
        data = np.ascontiguousarray(entry.tensor.data, dtype="<f4")
        parts.append(_U32.pack(len(name)))
        parts.append(name)
        parts.append(_U32.pack(data.ndim))
        parts.extend(_U32.pack(d) for d in data.shape)
        parts.append(data.tobytes())
    body = b"".join(parts)
    return body + hashlib.sha256(body).digest()


class _Reader:
    def __init__(self, buf: bytes):
        self.buf = buf
        self.pos = 0

    def take(self, size: int) -> bytes:
        if self.pos + size > len(self.buf):
            raise CheckpointError("checkpoint is truncated")
        chunk = self.buf[self.pos : self.pos + size]
        self.pos += size
        return chunk

    def u32(self) -> int:
        return _U32.unpack(self.take(4))[0]


def decode(buf: bytes) -> Tuple[ModelConfig, Dict[str, np.ndarray]]:
    if len(buf) < len(MAGIC) + _DIGEST_SIZE or not buf.startswith(MAGIC):
        raise CheckpointError("not an SLP-Net checkpoint")
    body, digest = buf[:-_DIGEST_SIZE], buf[-_DIGEST_SIZE:]
    if hashlib.sha256(body).digest() != digest:
        raise CheckpointError("checksum mismatch; the checkpoint is corrupted")

    reader = _Reader(body)
    reader.take(len(MAGIC))
    version = reader.u32()
    if version != FORMAT_VERSION:
        raise CheckpointError(f"unsupported checkpoint version {version} (expected {FORMAT_VERSION})")
    try:
        config = ModelConfig(**json.loads(reader.take(reader.u32()).decode("utf-8")))
    except (ValueError, ValidationError) as e:
        raise CheckpointError(f"invalid model config in checkpoint: {e}") from e

    state: Dict[str, np.ndarray] = {}
    for _ in range(reader.u32()):
        name = reader.take(reader.u32()).decode("utf-8")
        shape = tuple(reader.u32() for _ in range(reader.u32()))
        count = int(np.prod(shape)) if shape else 1
        state[name] = np.frombuffer(reader.take(4 * count), dtype="<f4").reshape(shape).astype(np.float32)
    if reader.pos != len(body):
        raise CheckpointError("trailing bytes after the last entry")
    return config, state


def save_checkpoint(model: SLPNet, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode(model))
    logger.info("saved checkpoint %s", path)
    return path


def load_checkpoint(
    path: Union[str, Path],
    config: Optional[ModelConfig] = None,
    dtype=np.float32,
) -> SLPNet:
    """Rebuild the model stored at ``path``.

    When ``config`` is given its architecture must match the stored one.
    """
    path = Path(path)
    if not path.is_file():
        raise CheckpointError(f"checkpoint not found: {path}")
    stored, state = decode(path.read_bytes())
    if config is not None and config.architecture() != stored.architecture():
        raise CheckpointError(f"checkpoint architecture {stored.architecture()} is incompatible with {config.architecture()}")
    model = build(stored, dtype=dtype)
    model.param_store().load_state(state)
    return model


def load_into(model: SLPNet, path: Union[str, Path]) -> SLPNet:
    """Load stored parameters into an existing, architecture-compatible model."""
    path = Path(path)
    if not path.is_file():
        raise CheckpointError(f"checkpoint not found: {path}")
    stored, state = decode(path.read_bytes())
    if stored.architecture() != model.config.architecture():
        raise CheckpointError("checkpoint architecture is incompatible with the model")
    model.param_store().load_state(state)
    return model
