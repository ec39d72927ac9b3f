"""Quantum channels, their Choi states, and Schmidt-number-breaking tests.

A channel is r-Schmidt-number-breaking (r-SNBC) when its Choi state has
Schmidt number at most r; r = 1 is entanglement breaking.  The channel
moments ``e_n`` are the Reduction-map moments of the Choi state, so the
state-side detectors carry over unchanged.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DimensionMismatch, ParameterOutOfRange
from .maps import Reduction, k_default_for_r, max_entangled_projector
from .moments import (DEFAULT_NMAX, Detector, DetectionReport, MomentVector, hankel_criterion,
                      moments_of_operator, normalized_output, theorem1_check)
from .serialization import decode_matrix, encode_matrix

KRAUS_TOL = 1e-10


class Channel:
    d_in: int
    d_out: int
    name = "abstract"

    def apply(self, rho) -> np.ndarray:
        rho = linalg.as_matrix(rho)
        if rho.shape[0] != self.d_in:
            raise DimensionMismatch(f"channel acts on dimension {self.d_in}, got {rho.shape[0]}")
        return self._apply(rho)

    def _apply(self, rho):
        return sum(K @ rho @ K.conj().T for K in self.kraus())

    def kraus(self) -> list[np.ndarray]:
        raise NotImplementedError

    def apply_to_second(self, rho, dA: int) -> np.ndarray:
        return linalg.apply_blockwise(self.apply, rho, dA, self.d_in)

    def choi(self) -> np.ndarray:
        return channel_choi(self)

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Depolarizing(Channel):
    """``rho -> p rho + (1-p) Tr(rho) I / d``."""

    d: int
    p: float
    name = "depolarizing"

    def __post_init__(self):
        lo = -1 / (self.d * self.d - 1)
        if not lo - 1e-12 <= self.p <= 1 + 1e-12:
            raise ParameterOutOfRange(f"depolarizing p={self.p} outside [{lo:.4g}, 1]")

    @property
    def d_in(self):
        return self.d

    @property
    def d_out(self):
        return self.d

    def _apply(self, rho):
        return self.p * rho + (1 - self.p) * np.trace(rho) * np.eye(self.d) / self.d

    def kraus(self):
        """Weyl-operator Kraus decomposition (requires ``p >= -1/(d^2-1)``)."""
        d = self.d
        w0 = self.p + (1 - self.p) / d**2
        w = (1 - self.p) / d**2
        X = np.roll(np.eye(d), 1, axis=0)
        Z = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
        ops = [math.sqrt(max(w0, 0.0)) * np.eye(d, dtype=np.complex128)]
        for a in range(d):
            for b in range(d):
                if a or b:
                    ops.append(math.sqrt(max(w, 0.0)) * np.linalg.matrix_power(X, a) @ np.linalg.matrix_power(Z, b))
        return ops

    def to_dict(self):
        return {"channel": self.name, "d": self.d, "p": self.p}


@dataclass(frozen=True)
class Dephasing(Channel):
    """``rho -> v rho + (1-v) sum_i <i|rho|i> |i><i|``."""

    d: int
    v: float
    name = "dephasing"

    def __post_init__(self):
        if not 0 <= self.v <= 1:
            raise ParameterOutOfRange(f"dephasing v={self.v} outside [0, 1]")

    @property
    def d_in(self):
        return self.d

    @property
    def d_out(self):
        return self.d

    def _apply(self, rho):
        return self.v * rho + (1 - self.v) * np.diag(np.diag(rho))

    def kraus(self):
        ops = [math.sqrt(self.v) * np.eye(self.d, dtype=np.complex128)]
        for i in range(self.d):
            P = np.zeros((self.d, self.d), dtype=np.complex128)
            P[i, i] = math.sqrt(1 - self.v)
            ops.append(P)
        return ops

    def to_dict(self):
        return {"channel": self.name, "d": self.d, "v": self.v}


@dataclass(frozen=True, eq=False)
class KrausChannel(Channel):
    ops: tuple
    name = "kraus"

    def __post_init__(self):
        ops = tuple(np.array(K, dtype=np.complex128) for K in self.ops)
        if not ops:
            raise ParameterOutOfRange("a Kraus channel needs at least one operator")
        shape = ops[0].shape
        if any(K.shape != shape or K.ndim != 2 for K in ops):
            raise DimensionMismatch("Kraus operators must share one shape")
        object.__setattr__(self, "ops", ops)
        defect = np.max(np.abs(kraus_completeness(ops) - np.eye(shape[1])))
        if defect > KRAUS_TOL:
            raise ParameterOutOfRange(f"Kraus operators are not trace preserving (defect {defect:.3e})")

    @property
    def d_in(self):
        return self.ops[0].shape[1]

    @property
    def d_out(self):
        return self.ops[0].shape[0]

    def kraus(self):
        return list(self.ops)

    def to_dict(self):
        return {"channel": self.name, "ops": [encode_matrix(K) for K in self.ops]}


def kraus_completeness(ops) -> np.ndarray:
    return sum(K.conj().T @ K for K in ops)


def kraus_from_choi(choi, d_in: int, d_out: int, cutoff: float = 1e-13) -> list[np.ndarray]:
    """Kraus operators of the channel whose normalized Choi matrix is ``choi``.

    ``choi`` is ``(id x E)(|phi+><phi+|)`` on ``d_in x d_out``, so
    ``d_in * choi`` is the unnormalized Choi matrix ``sum_a vec(K_a) vec(K_a)^+``.
    """
    w, V = linalg.hermitian_eigh(d_in * np.asarray(choi))
    ops = []
    for lam, v in zip(w[::-1], V.T[::-1]):
        if lam <= cutoff:
            continue
        ops.append(math.sqrt(lam) * v.reshape(d_in, d_out).T)
    return ops


def channel_apply(ch: Channel, rho) -> np.ndarray:
    return ch.apply(rho)


def channel_choi(ch: Channel) -> np.ndarray:
    """``(id x ch)(|phi+><phi+|)`` on ``d_in x d_out``; PSD with unit trace."""
    return ch.apply_to_second(max_entangled_projector(ch.d_in), ch.d_in)


def channel_from_dict(desc: dict) -> Channel:
    kind = desc.get("channel")
    if kind == "depolarizing":
        return Depolarizing(int(desc["d"]), float(desc["p"]))
    if kind == "dephasing":
        return Dephasing(int(desc["d"]), float(desc["v"]))
    if kind == "kraus":
        return KrausChannel(tuple(decode_matrix(K, square=False) for K in desc["ops"]))
    raise ParameterOutOfRange(f"unknown channel {kind!r}")


@dataclass(frozen=True)
class ChannelMomentVector(MomentVector):
    r: int = 1


def channel_moments(ch: Channel, r: int, n_max: int = DEFAULT_NMAX, k: float | None = None) -> ChannelMomentVector:
    """``e_n = Tr E_R^n`` with ``E_R`` the normalized Reduction output on the Choi state."""
    if ch.d_in != ch.d_out:
        raise DimensionMismatch("moment detectors need a channel M_d -> M_d")
    d = ch.d_in
    if not 1 <= r <= d - 1:
        raise ParameterOutOfRange(f"r must lie in 1..{d - 1}, got {r}")
    red = Reduction(d, k_default_for_r(r) if k is None else k)
    E = normalized_output(red, channel_choi(ch), d, d)
    mv = moments_of_operator(E, n_max)
    return ChannelMomentVector(mv.values, {"channel": ch.to_dict(), "map": red.to_dict()}, mv.min_eigenvalue, r)


def theorem4_check(e, tol: float | None = None) -> DetectionReport:
    kwargs = {} if tol is None else {"tol": tol}
    return theorem1_check(e, detector=Detector.T4.value, **kwargs)


def theorem5_check(e, m: int = 2, tol: float | None = None) -> DetectionReport:
    kwargs = {} if tol is None else {"tol": tol}
    return hankel_criterion(e, m, detector=Detector.T5.value, **kwargs)


def snbc_threshold(family: str, d: int, r: int) -> float:
    """Largest parameter at which the family is still r-Schmidt-number breaking."""
    if not 1 <= r <= d - 1:
        raise ParameterOutOfRange(f"r must lie in 1..{d - 1}, got {r}")
    if family == "depolarizing":
        return (r * d - 1) / (d * d - 1)
    if family == "dephasing":
        return (r - 1) / (d - 1)
    raise ParameterOutOfRange(f"no closed-form threshold for {family!r}")
