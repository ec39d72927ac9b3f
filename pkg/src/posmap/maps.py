"""Positive (but not completely positive) maps on ``d x d`` matrices.

Every map can be written as ``mu * Tr(X) * I - Phi(X)`` with ``Phi``
completely positive; :meth:`PositiveMap.general_form` returns that pair.
Maps are stored by their parameters and applied directly; Choi matrices
are derived on demand.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import linalg
from ._backend import kernels
from .errors import InvalidU, ParameterOutOfRange
from .serialization import decode_matrix, encode_matrix

#: Real antisymmetric generator on the first two levels of a qutrit.
ANTISYMMETRIC_U3 = np.array([[0, -1, 0], [1, 0, 0], [0, 0, 0]], dtype=np.complex128)


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=np.complex128)
    a.setflags(write=False)
    return a


class PositiveMap:
    """Base class: a linear map ``M_d -> M_{d_out}``."""

    name = "abstract"
    d: int

    @property
    def d_out(self) -> int:
        return self.d

    def apply(self, X) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, X) -> np.ndarray:
        return self.apply(X)

    def apply_to_second(self, rho, dA: int) -> np.ndarray:
        return linalg.apply_blockwise(self.apply, rho, dA, self.d)

    def choi_matrix(self) -> np.ndarray:
        return linalg.apply_to_second(self, max_entangled_projector(self.d), self.d, self.d)

    def mu(self) -> float:
        return mu_of(self)

    def general_form(self) -> tuple[float, Callable[[np.ndarray], np.ndarray]]:
        raise NotImplementedError(f"{self.name} has no tabulated general form")

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Identity(PositiveMap):
    d: int
    name = "identity"

    def apply(self, X):
        return np.array(X, dtype=np.complex128)

    def apply_to_second(self, rho, dA):
        return np.array(rho, dtype=np.complex128)

    def to_dict(self):
        return {"map": self.name, "d": self.d}


@dataclass(frozen=True)
class Transpose(PositiveMap):
    d: int
    name = "transpose"

    def apply(self, X):
        return np.array(X, dtype=np.complex128).T.copy()

    def apply_to_second(self, rho, dA):
        return kernels.partial_transpose(linalg.as_matrix(rho), dA, self.d, False)

    def to_dict(self):
        return {"map": self.name, "d": self.d}


@dataclass(frozen=True)
class Reduction(PositiveMap):
    """``X -> Tr(X) I - k X``; r-positive exactly for ``1/(r+1) < k <= 1/r``."""

    d: int
    k: float = 1.0
    name = "reduction"

    def __post_init__(self):
        if not self.k > 0:
            raise ParameterOutOfRange(f"reduction parameter k must be positive, got {self.k}")

    @classmethod
    def for_schmidt(cls, d: int, r: int) -> "Reduction":
        """The r-positive, not (r+1)-positive member with ``k = 1/r``."""
        return cls(d, k_default_for_r(r))

    def apply(self, X):
        return reduction_apply(self.k, X)

    def apply_to_second(self, rho, dA):
        return kernels.reduction_second(linalg.as_matrix(rho), dA, self.d, float(self.k))

    def general_form(self):
        return 1.0, lambda X: self.k * np.asarray(X)

    def to_dict(self):
        return {"map": self.name, "d": self.d, "k": self.k}


@dataclass(frozen=True, eq=False)
class BreuerHall(PositiveMap):
    U: np.ndarray = field(default_factory=lambda: ANTISYMMETRIC_U3)
    name = "breuer_hall"

    def __post_init__(self):
        U = _frozen(self.U)
        validate_breuer_hall_u(U)
        object.__setattr__(self, "U", U)

    @property
    def d(self) -> int:
        return self.U.shape[0]

    def apply(self, X):
        return breuer_hall_apply(self.U, X)

    def apply_to_second(self, rho, dA):
        return kernels.breuer_hall_second(linalg.as_matrix(rho), dA, self.d, self.U)

    def general_form(self):
        U = self.U

        def phi(X):
            X = np.asarray(X)
            return np.trace(X) * np.eye(self.d) + X + U @ X.T @ U.conj().T

        return 2.0, phi

    def to_dict(self):
        return {"map": self.name, "U": encode_matrix(self.U)}


@dataclass(frozen=True)
class GeneralizedChoi(PositiveMap):
    d: int
    kk: int = 1
    name = "gen_choi"

    def __post_init__(self):
        if int(self.kk) != self.kk or not 1 <= self.kk <= self.d - 1:
            raise ParameterOutOfRange(f"generalized Choi needs integer 1 <= k <= d-1, got k={self.kk}, d={self.d}")

    def apply(self, X):
        return generalized_choi_apply(self.d, self.kk, X)

    def apply_to_second(self, rho, dA):
        return kernels.gen_choi_second(linalg.as_matrix(rho), dA, self.d, int(self.kk))

    def general_form(self):
        m = float(self.d - self.kk)
        return m, lambda X: m * np.trace(X) * np.eye(self.d) - self.apply(X)

    def to_dict(self):
        return {"map": self.name, "d": self.d, "kk": self.kk}


@dataclass(frozen=True, eq=False)
class Custom(PositiveMap):
    """``X -> mu Tr(X) I - sum_i K_i X K_i^dagger`` for user-supplied ``K_i``."""

    kraus_plus: tuple
    mu_value: float
    d: int
    name = "custom"

    def __post_init__(self):
        ops = tuple(_frozen(K) for K in self.kraus_plus)
        for K in ops:
            if K.shape != (self.d, self.d):
                raise ParameterOutOfRange(f"Kraus operator of shape {K.shape} does not act on dimension {self.d}")
        object.__setattr__(self, "kraus_plus", ops)

    def apply(self, X):
        X = np.asarray(X, dtype=np.complex128)
        out = self.mu_value * np.trace(X) * np.eye(self.d, dtype=np.complex128)
        for K in self.kraus_plus:
            out = out - K @ X @ K.conj().T
        return out

    def general_form(self):
        return self.mu_value, lambda X: self.mu_value * np.trace(X) * np.eye(self.d) - self.apply(X)

    def to_dict(self):
        return {"map": self.name, "d": self.d, "mu": self.mu_value,
                "kraus_plus": [encode_matrix(K) for K in self.kraus_plus]}


@dataclass(frozen=True)
class RPositivityClaim:
    r: int
    k_low: float  # exclusive
    k_high: float  # inclusive

    def contains(self, k: float) -> bool:
        return self.k_low < k <= self.k_high


def max_entangled_projector(d: int) -> np.ndarray:
    v = np.zeros(d * d, dtype=np.complex128)
    v[np.arange(d) * (d + 1)] = 1 / math.sqrt(d)
    return np.outer(v, v.conj())


def reduction_apply(k: float, X) -> np.ndarray:
    X = linalg.as_matrix(X)
    return np.trace(X) * np.eye(X.shape[0], dtype=np.complex128) - k * X


def validate_breuer_hall_u(U, tol: float = 1e-12) -> None:
    U = np.asarray(U)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise InvalidU(f"U must be square, got shape {U.shape}")
    if np.max(np.abs(U + U.T), initial=0.0) > tol:
        raise InvalidU("U must be antisymmetric (U^T = -U)")
    if np.linalg.norm(U, 2) > 1 + tol:
        raise InvalidU("U must be a contraction (singular values <= 1)")


def breuer_hall_apply(U, X) -> np.ndarray:
    U = np.asarray(U, dtype=np.complex128)
    validate_breuer_hall_u(U)
    X = linalg.as_matrix(X)
    if U.shape != X.shape:
        raise InvalidU(f"U has shape {U.shape}, X has shape {X.shape}")
    return np.trace(X) * np.eye(X.shape[0]) - X - U @ X.T @ U.conj().T


def generalized_choi_apply(d: int, k: int, X) -> np.ndarray:
    """``(d-k) eps(X) + sum_{i=1..k} eps(S^i X S^i+) - X`` with eps the diagonal pinching."""
    if int(k) != k or not 1 <= k <= d - 1:
        raise ParameterOutOfRange(f"generalized Choi needs integer 1 <= k <= d-1, got k={k}, d={d}")
    X = linalg.as_matrix(X)
    if X.shape[0] != d:
        raise ParameterOutOfRange(f"X has dimension {X.shape[0]}, expected {d}")
    # S|j> = |j-1 mod d>, so diag(S^i X S^i+)_j = X_{j+i, j+i}
    diag = np.diag(X).copy()
    acc = (d - k) * diag
    for i in range(1, int(k) + 1):
        acc = acc + np.roll(diag, -i)
    return np.diag(acc) - X


def choi_matrix(map_: PositiveMap) -> np.ndarray:
    """``(id x map)(|phi+><phi+|)`` with the normalized maximally entangled state."""
    return map_.choi_matrix()


def mu_of(map_: PositiveMap) -> float:
    """``d`` times the largest eigenvalue of the Choi matrix."""
    return float(map_.d * linalg.hermitian_eigenvalues(choi_matrix(map_))[-1])


def r_for_k(k: float) -> RPositivityClaim:
    if not 0 < k <= 1:
        raise ParameterOutOfRange(f"k must lie in (0, 1], got {k}")
    r = max(1, math.floor((1.0 / k) * (1 + 1e-12)))
    return RPositivityClaim(r, 1.0 / (r + 1), 1.0 / r)


def k_default_for_r(r: int) -> float:
    if int(r) != r or r < 1:
        raise ParameterOutOfRange(f"r must be a positive integer, got {r}")
    return 1.0 / r


def map_from_dict(desc: dict, d: int | None = None) -> PositiveMap:
    """Build a map from its JSON descriptor; ``d`` fills in a missing dimension."""
    kind = desc.get("map")
    dim = desc.get("d", d)
    if kind == "breuer_hall":
        U = decode_matrix(desc["U"]) if "U" in desc else ANTISYMMETRIC_U3
        return BreuerHall(U)
    if dim is None:
        raise ParameterOutOfRange(f"map {kind!r} needs a dimension 'd'")
    dim = int(dim)
    if kind == "reduction":
        if "k" in desc and desc["k"] is not None:
            return Reduction(dim, float(desc["k"]))
        return Reduction.for_schmidt(dim, int(desc.get("r", 1)))
    if kind in ("gen_choi", "choi"):
        return GeneralizedChoi(dim, int(desc.get("kk", 1)))
    if kind == "transpose":
        return Transpose(dim)
    if kind == "identity":
        return Identity(dim)
    if kind == "custom":
        ops = [decode_matrix(K) for K in desc["kraus_plus"]]
        return Custom(tuple(ops), float(desc["mu"]), dim)
    raise ParameterOutOfRange(f"unknown map {kind!r}")
