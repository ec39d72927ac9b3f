"""Normalized map-output moments, Hankel matrices and moment detectors.

For a positive map ``L`` and a bipartite state ``rho`` the normalized
output is ``S = (id x L)(rho) / Tr[(id x L)(rho)]`` and its moments are
``s_n = Tr S^n``.  Whenever ``S`` is positive semidefinite,

* ``s_2^2 <= s_3``                                 (checked by :func:`theorem1_check`)
* every Hankel matrix ``H_m[i, j] = s_{i+j+1}`` is PSD (:func:`hankel_criterion`)

so a violation certifies that ``S`` has a negative eigenvalue.  With the
Reduction map at ``k = 1/r`` this certifies Schmidt number above ``r``; with
any positive map it certifies entanglement.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import linalg
from .errors import DegenerateNormalization, InsufficientMoments
from .maps import PositiveMap, Reduction

T1_TOL = 1e-10
HANKEL_TOL = 1e-12
DEFAULT_NMAX = 5


class Detector(str, Enum):
    T1 = "T1"  # s2^2 <= s3, Schmidt number via Reduction(1/r)
    T2 = "T2"  # Hankel, Schmidt number via Reduction(1/r)
    T3 = "T3"  # Hankel, separability via any positive map
    T4 = "T4"  # channel analogue of T1
    T5 = "T5"  # channel analogue of T2
    P3PPT = "P3PPT"
    HankelPT = "HankelPT"


@dataclass(frozen=True)
class MomentVector:
    values: tuple
    source: dict = field(default_factory=dict)
    min_eigenvalue: float = float("nan")

    def __len__(self):
        return len(self.values)

    def __getitem__(self, n: int) -> float:
        """1-based access: ``s[2]`` is the second moment."""
        if n < 1:
            raise IndexError("moments are indexed from 1")
        return self.values[n - 1]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


@dataclass(frozen=True)
class DetectionReport:
    detector: str
    scalars: dict
    detected: bool
    tolerance: float

    @property
    def verdict(self) -> str:
        return "detected" if self.detected else "not_detected"

    def to_dict(self) -> dict:
        return {"detector": self.detector, "scalars": dict(self.scalars),
                "verdict": self.verdict, "tolerance": self.tolerance}

    @classmethod
    def from_dict(cls, obj: dict) -> "DetectionReport":
        return cls(obj["detector"], dict(obj["scalars"]), obj["verdict"] == "detected", float(obj["tolerance"]))


def _values(s) -> np.ndarray:
    if isinstance(s, MomentVector):
        return s.as_array()
    return np.asarray(s, dtype=float)


def normalized_output(map_: PositiveMap, rho, dA: int, dB: int, subsystem: str = "B") -> np.ndarray:
    """``(id x map)(rho)`` divided by its trace.

    With ``subsystem="A"`` the map acts on the first factor instead; the
    result is then expressed on the swapped space ``B x A``.
    """
    if subsystem == "A":
        rho, dA, dB = linalg.swap_subsystems(rho, dA, dB), dB, dA
    elif subsystem != "B":
        raise ValueError(f"subsystem must be 'A' or 'B', got {subsystem!r}")
    out = linalg.apply_to_second(map_, rho, dA, dB)
    tr = np.trace(out)
    if abs(tr) < 1e-9:
        raise DegenerateNormalization(f"map output has trace {tr:.3e}; cannot normalize")
    return out / tr.real


def moments_of_operator(S, n_max: int = DEFAULT_NMAX, source: dict | None = None) -> MomentVector:
    ev = linalg.hermitian_eigenvalues(S)
    sums = linalg.spectrum_power_sums(ev, n_max)
    return MomentVector(tuple(float(x) for x in sums), source or {}, float(ev[0]))


def map_moments(map_: PositiveMap, rho, dA: int, dB: int, n_max: int = DEFAULT_NMAX,
                subsystem: str = "B") -> MomentVector:
    S = normalized_output(map_, rho, dA, dB, subsystem)
    return moments_of_operator(S, n_max, {"map": map_.to_dict(), "subsystem": subsystem})


def theorem1_check(s, tol: float = T1_TOL, detector: str = Detector.T1.value) -> DetectionReport:
    v = _values(s)
    if len(v) < 3:
        raise InsufficientMoments("need s_1, s_2, s_3")
    gap = float(v[1] ** 2 - v[2])
    return DetectionReport(detector, {"s2": float(v[1]), "s3": float(v[2]), "s2_sq_minus_s3": gap},
                           gap > tol, tol)


def hankel_matrix(s, m: int) -> np.ndarray:
    v = _values(s)
    if m < 1 or len(v) < 2 * m + 1:
        raise InsufficientMoments(f"H_{m} needs {2 * m + 1} moments, have {len(v)}")
    i = np.arange(m + 1)
    return v[i[:, None] + i[None, :]]


def hankel_criterion(s, m: int, tol: float = HANKEL_TOL, detector: str = Detector.T2.value) -> DetectionReport:
    H = hankel_matrix(s, m)
    det = float(np.linalg.det(H))
    min_eig = float(np.linalg.eigvalsh(H)[0])
    return DetectionReport(detector, {"m": m, "det_H": det, "min_eig_H": min_eig}, det < -tol, tol)


def pt_moments(rho, dA: int, dB: int, n_max: int = DEFAULT_NMAX) -> MomentVector:
    """``p_n = Tr[(rho^{T_A})^n]``."""
    return moments_of_operator(linalg.partial_transpose(rho, dA, dB, "A"), n_max, {"pt": "A"})


def p3_ppt_check(p, tol: float = T1_TOL) -> DetectionReport:
    v = _values(p)
    if len(v) < 3:
        raise InsufficientMoments("need p_1, p_2, p_3")
    gap = float(v[1] ** 2 - v[2] * v[0])
    return DetectionReport(Detector.P3PPT.value, {"p2": float(v[1]), "p3": float(v[2]), "p2_sq_minus_p3p1": gap},
                           gap > tol, tol)


def pt_hankel_check(p, m: int, tol: float = HANKEL_TOL) -> DetectionReport:
    return hankel_criterion(p, m, tol, Detector.HankelPT.value)


def schmidt_detectors(rho, d: int, r: int, m: int = 2, n_max: int | None = None) -> tuple:
    """(T1 report, T2 report) for ``Reduction(1/r)`` on a ``d x d`` state."""
    n_max = max(n_max or DEFAULT_NMAX, 2 * m + 1)
    s = map_moments(Reduction.for_schmidt(d, r), rho, d, d, n_max)
    return theorem1_check(s), hankel_criterion(s, m)


def schmidt_number_lower_bound(rho, dA: int, dB: int, m: int = 2) -> int:
    """Certified lower bound on the Schmidt number from T1 and T2 at order ``m``."""
    if dA != dB:
        raise ValueError("Schmidt number bound needs dA == dB")
    best = 0
    for r in range(1, dA):
        t1, t2 = schmidt_detectors(rho, dA, r, m)
        if t1.detected or t2.detected:
            best = r
    return best + 1
