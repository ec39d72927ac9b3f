"""Dense complex linear algebra used by every detector.

Composite indices are row-major: basis state ``|i>|k>`` of a ``dA x dB``
system sits at position ``i * dB + k``.
"""
from __future__ import annotations

import numpy as np

from ._backend import kernels
from .errors import DimensionMismatch, NonHermitianInput

HERMITIAN_RTOL = 1e-12


def as_matrix(M) -> np.ndarray:
    """Return ``M`` as a C-contiguous square complex128 array."""
    A = np.ascontiguousarray(M, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise DimensionMismatch(f"expected a non-empty square matrix, got shape {A.shape}")
    return A


def hermiticity_defect(M) -> float:
    A = np.asarray(M)
    return float(np.max(np.abs(A - A.conj().T))) if A.size else 0.0


def is_hermitian(M, rtol: float = HERMITIAN_RTOL) -> bool:
    A = np.asarray(M)
    scale = max(1.0, float(np.max(np.abs(A))))
    return hermiticity_defect(A) <= rtol * scale


def _checked_hermitian(M) -> np.ndarray:
    A = as_matrix(M)
    if not is_hermitian(A):
        raise NonHermitianInput(f"matrix is not Hermitian (defect {hermiticity_defect(A):.3e})")
    return 0.5 * (A + A.conj().T)


def kron(A, B) -> np.ndarray:
    return np.kron(as_matrix(A), as_matrix(B))


def hermitian_eigenvalues(M) -> np.ndarray:
    """Ascending real spectrum of a Hermitian matrix."""
    return np.linalg.eigvalsh(_checked_hermitian(M))


def hermitian_eigh(M) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and eigenvectors with a fixed phase convention.

    Each eigenvector is rotated so that its largest-magnitude component is
    real and positive, which makes downstream constructions deterministic.
    """
    w, V = np.linalg.eigh(_checked_hermitian(M))
    idx = np.argmax(np.abs(V), axis=0)
    pivots = V[idx, np.arange(V.shape[1])]
    V = V * (np.abs(pivots) / pivots)[None, :]
    return w, V


def _check_bipartite(rho, dA: int, dB: int) -> np.ndarray:
    A = as_matrix(rho)
    if dA < 1 or dB < 1 or A.shape[0] != dA * dB:
        raise DimensionMismatch(f"matrix of size {A.shape[0]} is not {dA} x {dB}")
    return A


def partial_transpose(rho, dA: int, dB: int, subsystem: str = "A") -> np.ndarray:
    A = _check_bipartite(rho, dA, dB)
    if subsystem not in ("A", "B"):
        raise ValueError(f"subsystem must be 'A' or 'B', got {subsystem!r}")
    return kernels.partial_transpose(A, dA, dB, subsystem == "A")


def swap_subsystems(rho, dA: int, dB: int) -> np.ndarray:
    """Reorder ``rho`` on ``A x B`` into the same operator on ``B x A``."""
    A = _check_bipartite(rho, dA, dB)
    return np.ascontiguousarray(A.reshape(dA, dB, dA, dB).transpose(1, 0, 3, 2).reshape(dA * dB, dA * dB))


def partial_trace(rho, dA: int, dB: int, keep: str = "A") -> np.ndarray:
    t = _check_bipartite(rho, dA, dB).reshape(dA, dB, dA, dB)
    if keep == "A":
        return np.einsum("iaja->ij", t)
    return np.einsum("iaib->ab", t)


def apply_blockwise(func, rho, dA: int, dB: int) -> np.ndarray:
    """Generic ``(id x func)(rho)``: replace every ``dB x dB`` block by ``func(block)``.

    ``func`` may change the block size (e.g. to ``dB + 1``).
    """
    A = _check_bipartite(rho, dA, dB)
    t = A.reshape(dA, dB, dA, dB)
    blocks = [[np.asarray(func(np.ascontiguousarray(t[i, :, j, :]))) for j in range(dA)] for i in range(dA)]
    return np.block(blocks).astype(np.complex128, copy=False)


def apply_to_second(map_action, rho, dA: int, dB: int) -> np.ndarray:
    """Apply ``id_A x map_action`` to ``rho``.

    ``map_action`` is a :class:`posmap.maps.PositiveMap` (using its fast
    blockwise kernel when it has one) or any callable on ``dB x dB`` arrays.
    """
    A = _check_bipartite(rho, dA, dB)
    blockwise = getattr(map_action, "apply_to_second", None)
    if blockwise is not None:
        if getattr(map_action, "d", dB) != dB:
            raise DimensionMismatch(f"map acts on dimension {map_action.d}, blocks have dimension {dB}")
        return blockwise(A, dA)
    return apply_blockwise(map_action, A, dA, dB)


def trace_norm(M) -> float:
    return float(np.sum(np.abs(hermitian_eigenvalues(M))))


def spectrum_power_sums(eigenvalues, n_max: int) -> np.ndarray:
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    ev = np.ascontiguousarray(eigenvalues, dtype=np.float64)
    return np.asarray(kernels.power_sums(ev, n_max))


def trace_powers(M, n_max: int) -> np.ndarray:
    """``(Tr M, Tr M^2, ..., Tr M^n_max)`` from the spectrum of Hermitian ``M``."""
    return spectrum_power_sums(hermitian_eigenvalues(M), n_max)
