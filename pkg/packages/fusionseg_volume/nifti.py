"""
NIfTI-1 reader and writer for axis-aligned 3-D volumes.

Only uncompressed single-file (.nii, magic "n+1") and header/image pairs
(.hdr/.img, magic "ni1") are handled. Gzipped input must be decompressed
first (for example with `gunzip -k scan.nii.gz`).

Writes always produce a little-endian single-file image: 348-byte header,
4 zero extension bytes, float32 payload at vox_offset 352.
"""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np

from fusionseg_core.exceptions import (
    BadMagic,
    IoError,
    MissingFile,
    SchemaError,
    UnsupportedDatatype,
    UnsupportedDim,
    UnsupportedOrientation,
)
from fusionseg_volume.volume import SpaceTag, Volume

logger = logging.getLogger(__name__)

HEADER_SIZE = 348
VOX_OFFSET = 352

header_dtd = [
    ("sizeof_hdr", "i4"),
    ("data_type", "S10"),
    ("db_name", "S18"),
    ("extents", "i4"),
    ("session_error", "i2"),
    ("regular", "S1"),
    ("dim_info", "u1"),
    ("dim", "i2", (8,)),
    ("intent_p1", "f4"),
    ("intent_p2", "f4"),
    ("intent_p3", "f4"),
    ("intent_code", "i2"),
    ("datatype", "i2"),
    ("bitpix", "i2"),
    ("slice_start", "i2"),
    ("pixdim", "f4", (8,)),
    ("vox_offset", "f4"),
    ("scl_slope", "f4"),
    ("scl_inter", "f4"),
    ("slice_end", "i2"),
    ("slice_code", "u1"),
    ("xyzt_units", "u1"),
    ("cal_max", "f4"),
    ("cal_min", "f4"),
    ("slice_duration", "f4"),
    ("toffset", "f4"),
    ("glmax", "i4"),
    ("glmin", "i4"),
    ("descrip", "S80"),
    ("aux_file", "S24"),
    ("qform_code", "i2"),
    ("sform_code", "i2"),
    ("quatern_b", "f4"),
    ("quatern_c", "f4"),
    ("quatern_d", "f4"),
    ("qoffset_x", "f4"),
    ("qoffset_y", "f4"),
    ("qoffset_z", "f4"),
    ("srow_x", "f4", (4,)),
    ("srow_y", "f4", (4,)),
    ("srow_z", "f4", (4,)),
    ("intent_name", "S16"),
    ("magic", "S4"),
]

HEADER_DTYPE_LE = np.dtype(header_dtd).newbyteorder("<")
HEADER_DTYPE_BE = HEADER_DTYPE_LE.newbyteorder(">")

# datatype code -> numpy scalar type
DATATYPES: dict[int, type[np.generic]] = {
    2: np.uint8,
    4: np.int16,
    8: np.int32,
    16: np.float32,
    64: np.float64,
}

NIFTI_UNITS_MM = 2
ORIENTATION_TOL = 1e-6


def _parse_header(raw: bytes, path: Path) -> tuple[np.ndarray, str]:
    if len(raw) < HEADER_SIZE:
        raise BadMagic(f"{path}: {len(raw)} bytes is too short for a NIfTI-1 header")
    hdr = np.frombuffer(raw[:HEADER_SIZE], dtype=HEADER_DTYPE_LE)[0]
    byteorder = "<"
    if int(hdr["sizeof_hdr"]) != HEADER_SIZE:
        swapped = np.frombuffer(raw[:HEADER_SIZE], dtype=HEADER_DTYPE_BE)[0]
        if int(swapped["sizeof_hdr"]) == HEADER_SIZE:
            hdr, byteorder = swapped, ">"
    magic = bytes(hdr["magic"])
    if magic not in (b"n+1", b"ni1"):
        raise BadMagic(f"{path}: bad NIfTI magic {magic!r} at offset 344")
    return hdr, byteorder


def _origin_from_header(hdr: np.ndarray, spacing: tuple[float, float, float], path: Path):
    if int(hdr["sform_code"]) > 0:
        srow = np.stack([hdr["srow_x"], hdr["srow_y"], hdr["srow_z"]]).astype(np.float64)
        linear = srow[:, :3]
        off_diag = linear - np.diag(np.diag(linear))
        scale = max(float(np.max(np.abs(linear))), 1.0)
        if np.max(np.abs(off_diag)) > ORIENTATION_TOL * scale:
            raise UnsupportedOrientation(f"{path}: oblique sform is not supported")
        if np.any(np.diag(linear) <= 0):
            raise UnsupportedOrientation(f"{path}: flipped sform axes are not supported")
        if not np.allclose(np.diag(linear), spacing, rtol=1e-4, atol=1e-6):
            logger.warning(f"{path}: sform scaling {np.diag(linear)} differs from pixdim {spacing}")
        return tuple(float(v) for v in srow[:, 3])
    if int(hdr["qform_code"]) > 0:
        quat = np.array([hdr["quatern_b"], hdr["quatern_c"], hdr["quatern_d"]], dtype=np.float64)
        if np.max(np.abs(quat)) > ORIENTATION_TOL or float(hdr["pixdim"][0]) < 0:
            raise UnsupportedOrientation(f"{path}: rotated qform is not supported")
        return (float(hdr["qoffset_x"]), float(hdr["qoffset_y"]), float(hdr["qoffset_z"]))
    return (0.0, 0.0, 0.0)


def nifti_read(path: Path | str, space_tag: SpaceTag = SpaceTag.OTHER) -> Volume:
    """
    Read an uncompressed NIfTI-1 volume.

    Args:
        path: .nii file, or .hdr with a sibling .img
        space_tag: space to tag the resulting volume with

    Returns:
        float32 Volume with scl_slope/scl_inter applied when slope != 0

    Raises:
        MissingFile, BadMagic, UnsupportedDim, UnsupportedDatatype,
        UnsupportedOrientation, IoError (truncated payload)
    """
    p = Path(path)
    if not p.exists():
        raise MissingFile(p, "NIfTI file")
    try:
        raw = p.read_bytes()
    except OSError as e:
        raise IoError(f"Cannot read {p}: {e}") from e

    hdr, byteorder = _parse_header(raw, p)

    dim = [int(d) for d in hdr["dim"]]
    if dim[0] != 3:
        raise UnsupportedDim(f"{p}: dim[0]={dim[0]}, only 3-D volumes are supported")
    nx, ny, nz = dim[1], dim[2], dim[3]
    if min(nx, ny, nz) < 1:
        raise SchemaError(f"{p}: non-positive dimensions {dim[1:4]}")

    code = int(hdr["datatype"])
    if code not in DATATYPES:
        raise UnsupportedDatatype(f"{p}: datatype code {code} is not supported")
    dtype = np.dtype(DATATYPES[code]).newbyteorder(byteorder)

    spacing = tuple(float(v) for v in hdr["pixdim"][1:4])
    if not all(s > 0 for s in spacing):
        raise SchemaError(f"{p}: non-positive pixdim {spacing}")
    origin = _origin_from_header(hdr, spacing, p)  # type: ignore[arg-type]

    if bytes(hdr["magic"]) == b"ni1":
        img_path = p.with_suffix(".img")
        if not img_path.exists():
            raise MissingFile(img_path, "NIfTI image file")
        payload = img_path.read_bytes()
        offset = int(hdr["vox_offset"])
    else:
        payload = raw
        offset = max(int(hdr["vox_offset"]), VOX_OFFSET)

    count = nx * ny * nz
    nbytes = count * dtype.itemsize
    if len(payload) < offset + nbytes:
        raise IoError(f"{p}: payload truncated ({len(payload) - offset} of {nbytes} bytes)")
    data = np.frombuffer(payload, dtype=dtype, count=count, offset=offset)

    slope = float(hdr["scl_slope"])
    inter = float(hdr["scl_inter"])
    if slope != 0.0 and np.isfinite(slope) and not (slope == 1.0 and inter == 0.0):
        values = (data.astype(np.float64) * slope + inter).astype(np.float32)
    else:
        values = data.astype(np.float32)

    return Volume(values.reshape(nz, ny, nx), spacing, origin, space_tag)  # type: ignore[arg-type]


def nifti_write(vol: Volume, path: Path | str) -> None:
    """
    Write a volume as a single-file little-endian float32 NIfTI-1 image.

    sform_code = 1 with srow rows diag(spacing) | origin; qform_code = 1
    with a zero quaternion and the same offsets.
    """
    hdr = np.zeros((), dtype=HEADER_DTYPE_LE)
    nx, ny, nz = vol.dims
    sx, sy, sz = vol.spacing
    ox, oy, oz = vol.origin

    hdr["sizeof_hdr"] = HEADER_SIZE
    hdr["regular"] = b"r"
    hdr["dim"] = [3, nx, ny, nz, 1, 1, 1, 1]
    hdr["datatype"] = 16
    hdr["bitpix"] = 32
    hdr["pixdim"] = [1.0, sx, sy, sz, 0.0, 0.0, 0.0, 0.0]
    hdr["vox_offset"] = VOX_OFFSET
    hdr["scl_slope"] = 1.0
    hdr["scl_inter"] = 0.0
    hdr["xyzt_units"] = NIFTI_UNITS_MM
    hdr["descrip"] = f"fusionseg {vol.space_tag.value}".encode("ascii")
    hdr["qform_code"] = 1
    hdr["sform_code"] = 1
    hdr["qoffset_x"], hdr["qoffset_y"], hdr["qoffset_z"] = ox, oy, oz
    hdr["srow_x"] = [sx, 0.0, 0.0, ox]
    hdr["srow_y"] = [0.0, sy, 0.0, oy]
    hdr["srow_z"] = [0.0, 0.0, sz, oz]
    hdr["magic"] = b"n+1"

    payload = np.ascontiguousarray(vol.data, dtype="<f4").tobytes(order="C")
    try:
        with open(path, "wb") as f:
            f.write(hdr.tobytes())
            f.write(b"\x00" * (VOX_OFFSET - HEADER_SIZE))
            f.write(payload)
    except OSError as e:
        raise IoError(f"Cannot write {path}: {e}") from e
