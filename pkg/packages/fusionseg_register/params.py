"""
Twelve-parameter affine convention.

    params = [tx, ty, tz, rx, ry, rz, log sx, log sy, log sz, hxy, hxz, hyz]

The transform about a center c is

    T(p) = c + t + Rz(rz) Ry(ry) Rx(rx) S H (p - c)

with S = diag(exp(log s)) and H unit upper triangular holding the shears.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.spatial.transform import Rotation

from fusionseg_core.exceptions import SingularTransform
from fusionseg_volume import Affine3

N_PARAMS = 12


def rotation_matrix(rx: float, ry: float, rz: float) -> NDArray[np.float64]:
    """Intrinsic z-y-x Euler rotation Rz @ Ry @ Rx."""
    return np.asarray(Rotation.from_euler("ZYX", [rz, ry, rx]).as_matrix(), dtype=np.float64)


def params_to_affine(params: ArrayLike, center: ArrayLike) -> Affine3:
    p = np.asarray(params, dtype=np.float64).reshape(N_PARAMS)
    c = np.asarray(center, dtype=np.float64).reshape(3)
    scale = np.diag(np.exp(p[6:9]))
    shear = np.array([[1.0, p[9], p[10]], [0.0, 1.0, p[11]], [0.0, 0.0, 1.0]])
    linear = rotation_matrix(*p[3:6]) @ scale @ shear
    return Affine3.from_linear(linear, c + p[0:3] - linear @ c)


def affine_to_params(transform: Affine3, center: ArrayLike) -> NDArray[np.float64]:
    """
    Decompose an affine into the 12-parameter convention.

    Raises:
        SingularTransform: linear part is singular or contains a reflection
    """
    linear = transform.linear
    if transform.det <= 1e-9:
        raise SingularTransform(f"Cannot decompose transform with det={transform.det:.3e}")
    q, upper = np.linalg.qr(linear)
    signs = np.sign(np.diag(upper))
    q = q * signs
    upper = signs[:, None] * upper
    scales = np.diag(upper)
    shear = upper / scales[:, None]

    rz, ry, rx = Rotation.from_matrix(q).as_euler("ZYX")

    c = np.asarray(center, dtype=np.float64).reshape(3)
    t = transform.offset - c + linear @ c
    return np.concatenate(
        [t, [rx, ry, rz], np.log(scales), [shear[0, 1], shear[0, 2], shear[1, 2]]]
    )
