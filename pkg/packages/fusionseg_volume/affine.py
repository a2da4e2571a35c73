"""
Physical-space affine transforms.

An Affine3 maps points in mm to points in mm: y = L @ x + t, stored as a
row-major 3x4 matrix [L | t]. On disk it is a JSON array of 12 numbers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.typing import ArrayLike, NDArray

from fusionseg_core.exceptions import IoError, MissingFile, SchemaError, SingularTransform

DET_EPS = 1e-9


@dataclass(frozen=True, slots=True, eq=False)
class Affine3:
    """
    Immutable 3x4 affine transform in physical space.

    Example:
        >>> t = Affine3.translation((3.0, -2.0, 1.0))
        >>> t.apply([0.0, 0.0, 0.0]).tolist()
        [3.0, -2.0, 1.0]
    """

    matrix: NDArray[np.float64]

    def __post_init__(self) -> None:
        m = np.array(self.matrix, dtype=np.float64).reshape(3, 4)
        if not np.all(np.isfinite(m)):
            raise SchemaError("Affine matrix contains NaN or Inf")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls) -> Affine3:
        return cls(np.hstack([np.eye(3), np.zeros((3, 1))]))

    @classmethod
    def translation(cls, t: ArrayLike) -> Affine3:
        return cls(np.hstack([np.eye(3), np.asarray(t, dtype=np.float64).reshape(3, 1)]))

    @classmethod
    def from_linear(cls, linear: ArrayLike, translation: ArrayLike = (0.0, 0.0, 0.0)) -> Affine3:
        lin = np.asarray(linear, dtype=np.float64).reshape(3, 3)
        tr = np.asarray(translation, dtype=np.float64).reshape(3, 1)
        return cls(np.hstack([lin, tr]))

    @property
    def linear(self) -> NDArray[np.float64]:
        return self.matrix[:, :3]

    @property
    def offset(self) -> NDArray[np.float64]:
        return self.matrix[:, 3]

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.linear))

    def homogeneous(self) -> NDArray[np.float64]:
        return np.vstack([self.matrix, [0.0, 0.0, 0.0, 1.0]])

    def apply(self, points: ArrayLike) -> NDArray[np.float64]:
        """Transform points; the last axis of `points` has length 3."""
        pts = np.asarray(points, dtype=np.float64)
        return pts @ self.linear.T + self.offset

    def allclose(self, other: Affine3, atol: float = 1e-9) -> bool:
        return bool(np.allclose(self.matrix, other.matrix, atol=atol, rtol=0.0))

    # --- serialization ----------------------------------------------------

    def to_list(self) -> list[float]:
        return [float(v) for v in self.matrix.reshape(-1)]

    def to_json(self) -> str:
        # repr round-trips float64 exactly
        return json.dumps(self.to_list())

    @classmethod
    def from_list(cls, values: list[float]) -> Affine3:
        if len(values) != 12:
            raise SchemaError(f"Affine3 needs 12 numbers, got {len(values)}")
        return cls(np.asarray(values, dtype=np.float64))

    @classmethod
    def from_json(cls, text: str) -> Affine3:
        try:
            values = json.loads(text)
        except json.JSONDecodeError as e:
            raise SchemaError(f"Invalid JSON for Affine3: {e}") from e
        if not isinstance(values, list):
            raise SchemaError("Affine3 JSON must be an array of 12 numbers")
        return cls.from_list(values)

    def save(self, path: Path | str) -> None:
        try:
            Path(path).write_text(self.to_json(), encoding="utf-8")
        except OSError as e:
            raise IoError(f"Cannot write transform {path}: {e}") from e

    @classmethod
    def load(cls, path: Path | str) -> Affine3:
        p = Path(path)
        if not p.exists():
            raise MissingFile(p, "transform file")
        return cls.from_json(p.read_text(encoding="utf-8"))


def compose(a: Affine3, b: Affine3) -> Affine3:
    """Transform that applies `b` first, then `a`."""
    return Affine3((a.homogeneous() @ b.homogeneous())[:3])


def invert(a: Affine3) -> Affine3:
    """Inverse transform; SingularTransform when |det| <= 1e-9."""
    if abs(a.det) <= DET_EPS:
        raise SingularTransform(f"Affine linear part is singular (det={a.det:.3e})")
    inv_lin = np.linalg.inv(a.linear)
    return Affine3.from_linear(inv_lin, -inv_lin @ a.offset)
