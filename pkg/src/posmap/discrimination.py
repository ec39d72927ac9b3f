"""Channel discrimination witnessed by the trace-preserving Reduction map.

A state whose Schmidt number exceeds ``r`` makes
``W = ||(id x L_TP)(rho)||_1`` exceed 1, where ``L_TP`` is the Reduction
map at ``k = 1/r`` rescaled to preserve trace.  Extending ``L_TP`` to a
trace-annihilating map and splitting it into a difference of two channels
``S1 - S2 = k_scale * L_TA`` turns that excess into a better-than-reference
success probability for telling ``S1`` from ``S2`` apart.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from . import linalg
from ._backend import kernels
from .channels import KrausChannel, channel_choi, kraus_from_choi
from .errors import DegenerateTA, DimensionMismatch, ParameterOutOfRange
from .maps import PositiveMap, k_default_for_r

ADVANTAGE_TOL = 1e-9


@dataclass(frozen=True)
class ReductionTP(PositiveMap):
    """``X -> (Tr(X) I - k X) / (d - k)``."""

    d: int
    k: float
    name = "reduction_tp"

    def __post_init__(self):
        if not 0 < self.k <= 1 or self.d < 2:
            raise ParameterOutOfRange(f"need 0 < k <= 1 and d >= 2, got k={self.k}, d={self.d}")

    def apply(self, X):
        X = linalg.as_matrix(X)
        return (np.trace(X) * np.eye(self.d) - self.k * X) / (self.d - self.k)

    def apply_to_second(self, rho, dA):
        return kernels.reduction_second(linalg.as_matrix(rho), dA, self.d, float(self.k)) / (self.d - self.k)

    def to_dict(self):
        return {"map": self.name, "d": self.d, "k": self.k}


@dataclass(frozen=True, eq=False)
class TraceAnnihilating(PositiveMap):
    """``X -> L_TP(X) (+) (-Tr X)``: output on ``d + 1`` levels, flag level last."""

    base: PositiveMap
    name = "trace_annihilating"

    @property
    def d(self):
        return self.base.d

    @property
    def d_out(self):
        return self.base.d + 1

    def apply(self, X):
        X = linalg.as_matrix(X)
        out = np.zeros((self.d + 1, self.d + 1), dtype=np.complex128)
        out[:self.d, :self.d] = self.base.apply(X)
        out[self.d, self.d] = -np.trace(X)
        return out

    def apply_to_second(self, rho, dA):
        d = self.d
        inner = self.base.apply_to_second(rho, dA).reshape(dA, d, dA, d)
        out = np.zeros((dA, d + 1, dA, d + 1), dtype=np.complex128)
        out[:, :d, :, :d] = inner
        out[:, d, :, d] = -linalg.partial_trace(rho, dA, d, keep="A")
        return out.reshape(dA * (d + 1), dA * (d + 1))

    def to_dict(self):
        return {"map": self.name, "base": self.base.to_dict()}


def reduction_tp(k: float, d: int) -> ReductionTP:
    return ReductionTP(d, k)


def trace_annihilating(map_tp: PositiveMap, d: int | None = None) -> TraceAnnihilating:
    if d is not None and d != map_tp.d:
        raise DimensionMismatch(f"map acts on dimension {map_tp.d}, not {d}")
    return TraceAnnihilating(map_tp)


@dataclass(frozen=True, eq=False)
class ChannelPair:
    S1: KrausChannel
    S2: KrausChannel
    k_scale: float
    ta: TraceAnnihilating

    def choi_difference_defect(self) -> float:
        diff = channel_choi(self.S1) - channel_choi(self.S2)
        return float(np.max(np.abs(diff - self.k_scale * self.ta.choi_matrix())))


def channel_pair_from_ta(ta: TraceAnnihilating, d: int | None = None) -> ChannelPair:
    """Write ``ta`` as ``(S1 - S2) / k_scale`` with ``S1``, ``S2`` CPTP maps ``M_d -> M_{d+1}``.

    The Choi matrix ``C`` of ``ta`` is split into positive and negative
    parts ``C+ - C-``.  Both have the same output marginal ``M``, so adding
    the common term ``(cI - M) x I/(d+1)`` with ``c = lambda_max(M)`` makes
    each one a multiple ``c`` of a valid channel Choi matrix.  With the
    normalized maximally entangled state, ``k_scale = 1 / (c d)``.
    """
    d = ta.d if d is None else d
    d_out = ta.d_out
    C = ta.choi_matrix()
    w, V = linalg.hermitian_eigh(C)
    C_plus = (V * np.clip(w, 0, None)) @ V.conj().T
    C_minus = (V * np.clip(-w, 0, None)) @ V.conj().T
    M = 0.5 * (linalg.partial_trace(C_plus, d, d_out) + linalg.partial_trace(C_minus, d, d_out))
    c = float(linalg.hermitian_eigenvalues(M)[-1])
    if c < 1e-12:
        raise DegenerateTA(f"positive part of the Choi matrix is negligible (c={c:.3e})")
    C_R = np.kron(c * np.eye(d) - M, np.eye(d_out) / d_out)
    choi1 = (C_plus + C_R) / (c * d)
    choi2 = (C_minus + C_R) / (c * d)
    S1 = KrausChannel(tuple(kraus_from_choi(choi1, d, d_out)))
    S2 = KrausChannel(tuple(kraus_from_choi(choi2, d, d_out)))
    return ChannelPair(S1, S2, 1.0 / (c * d), ta)


@functools.lru_cache(maxsize=32)
def reduction_channel_pair(d: int, r: int) -> ChannelPair:
    return channel_pair_from_ta(trace_annihilating(reduction_tp(k_default_for_r(r), d)))


@dataclass(frozen=True)
class WitnessReport:
    trace_norm_value: float
    advantage: float
    min_eigenvalue: float
    k_scale: float
    tolerance: float = ADVANTAGE_TOL

    @property
    def has_advantage(self) -> bool:
        return self.trace_norm_value > 1 + self.tolerance

    @property
    def verdict(self) -> str:
        return "advantage" if self.has_advantage else "no_advantage"

    def to_dict(self) -> dict:
        return {"trace_norm_value": self.trace_norm_value, "advantage": self.advantage,
                "min_eigenvalue": self.min_eigenvalue, "k_scale": self.k_scale,
                "verdict": self.verdict, "tolerance": self.tolerance}


def _split_dims(rho, dA: int) -> int:
    n = linalg.as_matrix(rho).shape[0]
    if n % dA:
        raise DimensionMismatch(f"dimension {n} is not a multiple of dA={dA}")
    return n // dA


def discrimination_witness(rho, dA: int, r: int) -> WitnessReport:
    d = _split_dims(rho, dA)
    out = reduction_tp(k_default_for_r(r), d).apply_to_second(rho, dA)
    ev = linalg.hermitian_eigenvalues(out)
    W = float(np.sum(np.abs(ev)))
    k_scale = reduction_channel_pair(d, r).k_scale
    return WitnessReport(W, k_scale * (W - 1) / 2, float(ev[0]), k_scale)


def end_to_end_advantage(rho, dA: int, r: int) -> float:
    """``1/2 ||(id x S1)(rho) - (id x S2)(rho)||_1`` for the constructed pair."""
    d = _split_dims(rho, dA)
    pair = reduction_channel_pair(d, r)
    diff = pair.S1.apply_to_second(rho, dA) - pair.S2.apply_to_second(rho, dA)
    return 0.5 * linalg.trace_norm(diff)


def helstrom(rho1, rho2, p: float = 0.5) -> float:
    """Optimal success probability for telling ``rho1`` (prior p) from ``rho2``."""
    A, B = linalg.as_matrix(rho1), linalg.as_matrix(rho2)
    if A.shape != B.shape:
        raise DimensionMismatch(f"states have shapes {A.shape} and {B.shape}")
    if not 0 <= p <= 1:
        raise ParameterOutOfRange(f"prior p={p} outside [0, 1]")
    return 0.5 * (1 + linalg.trace_norm(p * A - (1 - p) * B))
