"""
Checkpoint file format.

    offset 0   b"FSEGCKPT"            magic (8 bytes)
    offset 8   uint32 LE              format version
    offset 12  uint32 LE              config JSON length L
    offset 16  L bytes                UNetConfig JSON (UTF-8)
    then       float32 LE blocks      one per parameter, in parameter_shapes order

Block sizes follow from the embedded config, so the file carries no
per-block headers.
"""

from __future__ import annotations

import logging
import struct
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from fusionseg_core.exceptions import IoError, MissingFile, ShapeMismatch, VersionMismatch
from fusionseg_nngraph import Tensor5
from fusionseg_unet.config import UNetConfig
from fusionseg_unet.model import UNetModel, parameter_shapes

logger = logging.getLogger(__name__)

MAGIC = b"FSEGCKPT"
FORMAT_VERSION = 1
_PREFIX = struct.Struct("<8sII")


def save_checkpoint(model: UNetModel, path: Path | str) -> None:
    config_json = model.config.model_dump_json().encode("utf-8")
    blocks = []
    for name, shape in parameter_shapes(model.config):
        data = model.params[name].data
        if tuple(data.shape) != shape:
            raise ShapeMismatch(f"Parameter {name} has shape {data.shape}, expected {shape}")
        blocks.append(np.ascontiguousarray(data, dtype="<f4").tobytes())
    try:
        with open(path, "wb") as f:
            f.write(_PREFIX.pack(MAGIC, FORMAT_VERSION, len(config_json)))
            f.write(config_json)
            for block in blocks:
                f.write(block)
    except OSError as e:
        raise IoError(f"Cannot write checkpoint {path}: {e}") from e
    logger.debug(f"Saved checkpoint {path}")


def load_checkpoint(path: Path | str, expected: UNetConfig | None = None) -> UNetModel:
    """
    Read a checkpoint written by save_checkpoint.

    Args:
        path: checkpoint file
        expected: architecture the caller needs; parameter shapes must match

    Raises:
        MissingFile, IoError (unreadable, not a checkpoint, truncated),
        VersionMismatch, ShapeMismatch (against `expected` or trailing data)
    """
    p = Path(path)
    if not p.exists():
        raise MissingFile(p, "checkpoint")
    try:
        raw = p.read_bytes()
    except OSError as e:
        raise IoError(f"Cannot read checkpoint {p}: {e}") from e

    if len(raw) < _PREFIX.size:
        raise IoError(f"{p}: file too short for a checkpoint header")
    magic, version, config_len = _PREFIX.unpack_from(raw, 0)
    if magic != MAGIC:
        raise IoError(f"{p}: not a fusionseg checkpoint")
    if version != FORMAT_VERSION:
        raise VersionMismatch(f"{p}: checkpoint version {version}, expected {FORMAT_VERSION}")

    offset = _PREFIX.size
    if len(raw) < offset + config_len:
        raise IoError(f"{p}: truncated config block")
    try:
        config = UNetConfig.model_validate_json(raw[offset:offset + config_len])
    except ValidationError as e:
        raise IoError(f"{p}: embedded config is invalid: {e}") from e
    offset += config_len

    shapes = parameter_shapes(config)
    if expected is not None:
        wanted = parameter_shapes(expected)
        for (name, shape), (want_name, want_shape) in zip(shapes, wanted):
            if name != want_name or shape != want_shape:
                raise ShapeMismatch(
                    f"{p}: parameter {want_name} expected {want_shape}, "
                    f"checkpoint has {name} {shape}"
                )
        if len(shapes) != len(wanted):
            raise ShapeMismatch(
                f"{p}: checkpoint has {len(shapes)} parameters, expected {len(wanted)}"
            )

    params: dict[str, Tensor5] = {}
    for name, shape in shapes:
        count = int(np.prod(shape))
        nbytes = 4 * count
        if len(raw) < offset + nbytes:
            raise IoError(f"{p}: truncated at parameter {name}")
        block = np.frombuffer(raw, dtype="<f4", count=count, offset=offset)
        params[name] = Tensor5(block.astype(np.float32).reshape(shape), requires_grad=True)
        offset += nbytes
    if offset != len(raw):
        raise ShapeMismatch(f"{p}: {len(raw) - offset} unexpected trailing bytes")
    return UNetModel(config, params)
