"""JSON encodings for complex matrices and density matrices.

Complex numbers are two-element ``[re, im]`` arrays.  A density matrix is
``{"dim_a": .., "dim_b": .., "rows": [[[re, im], ...], ...]}``.
"""
from __future__ import annotations

import json

import numpy as np

from .errors import DimensionMismatch


def encode_matrix(M) -> list:
    A = np.asarray(M, dtype=np.complex128)
    return [[[float(z.real), float(z.imag)] for z in row] for row in A]


def _decode_entry(x) -> complex:
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise ValueError(f"complex entry must be [re, im], got {x!r}")
        return complex(float(x[0]), float(x[1]))
    return complex(float(x))


def decode_matrix(rows, square: bool = True) -> np.ndarray:
    """Inverse of :func:`encode_matrix`; plain real entries are also accepted."""
    out = np.array([[_decode_entry(x) for x in row] for row in rows], dtype=np.complex128)
    if out.ndim != 2 or (square and out.shape[0] != out.shape[1]):
        raise DimensionMismatch(f"matrix rows do not form a square matrix: shape {out.shape}")
    return out


def encode_density(rho, dim_a: int, dim_b: int) -> dict:
    return {"dim_a": int(dim_a), "dim_b": int(dim_b), "rows": encode_matrix(rho)}


def decode_density(obj: dict) -> tuple[np.ndarray, int, int]:
    rho = decode_matrix(obj["rows"])
    dA, dB = int(obj["dim_a"]), int(obj["dim_b"])
    if rho.shape[0] != dA * dB:
        raise DimensionMismatch(f"rows give dimension {rho.shape[0]}, expected {dA} * {dB}")
    return rho, dA, dB


def dumps(obj) -> str:
    # float repr is the shortest string that round-trips (at most 17 significant digits)
    return json.dumps(obj, indent=2, sort_keys=False, allow_nan=True) + "\n"
