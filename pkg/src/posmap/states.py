"""Bipartite state families and a sampler of states with bounded Schmidt number."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import InvalidState, ParameterOutOfRange
from .maps import max_entangled_projector

VALIDITY_TOL = 1e-10
NPT_ALPHA_MIN = (25 - math.sqrt(141)) / 50
NPT_ALPHA_MAX = (25 + math.sqrt(141)) / 100


def check_density(rho, tol: float = VALIDITY_TOL) -> None:
    """Raise :class:`InvalidState` unless ``rho`` is Hermitian, PSD and unit trace."""
    if not linalg.is_hermitian(rho):
        raise InvalidState("state is not Hermitian")
    tr = np.trace(rho)
    if abs(tr - 1) > tol:
        raise InvalidState(f"state has trace {tr.real:.12g}")
    lo = linalg.hermitian_eigenvalues(rho)[0]
    if lo < -tol:
        raise InvalidState(f"state has negative eigenvalue {lo:.3e}")


def is_density(rho, tol: float = VALIDITY_TOL) -> bool:
    try:
        check_density(rho, tol)
    except InvalidState:
        return False
    return True


def max_entangled(d: int) -> np.ndarray:
    if d < 2:
        raise ParameterOutOfRange("d must be >= 2")
    return max_entangled_projector(d)


def max_mixed(d: int) -> np.ndarray:
    return np.eye(d * d, dtype=np.complex128) / (d * d)


def isotropic(d: int, p: float) -> np.ndarray:
    """``p |phi+><phi+| + (1-p) I / d^2``; valid for ``-1/(d^2-1) <= p <= 1``."""
    rho = p * max_entangled(d) + (1 - p) * max_mixed(d)
    if not -1 / (d * d - 1) - VALIDITY_TOL <= p <= 1 + VALIDITY_TOL:
        raise InvalidState(f"isotropic state is not positive for p={p}")
    return rho


def dephased_mes(d: int, v: float) -> np.ndarray:
    """``v |phi+><phi+| + (1-v)/d sum_i |ii><ii|``."""
    if not 0 <= v <= 1:
        raise ParameterOutOfRange(f"v must lie in [0, 1], got {v}")
    diag = np.zeros(d * d)
    diag[np.arange(d) * (d + 1)] = 1 / d
    return v * max_entangled(d) + (1 - v) * np.diag(diag).astype(np.complex128)


def stormer_bound(p: float) -> np.ndarray:
    """PPT entangled two-qutrit state, normalized by the trace of its pattern."""
    if not p > 0:
        raise ParameterOutOfRange(f"p must be positive, got {p}")
    M = np.zeros((9, 9), dtype=np.complex128)
    support = [0, 4, 8]
    M[np.ix_(support, support)] = 1
    for idx, val in zip((1, 2, 3, 5, 6, 7), (p, 1 / p, 1 / p, p, p, 1 / p)):
        M[idx, idx] = val
    return M / np.trace(M).real


def tiles_vectors() -> list[np.ndarray]:
    """The five orthonormal product vectors of the tiles UPB in C^3 x C^3."""
    e = np.eye(3)
    minus01 = (e[0] - e[1]) / math.sqrt(2)
    minus12 = (e[1] - e[2]) / math.sqrt(2)
    uniform = np.ones(3) / math.sqrt(3)
    vecs = [np.kron(e[0], minus01), np.kron(e[2], minus12), np.kron(minus01, e[2]),
            np.kron(minus12, e[0]), np.kron(uniform, uniform)]
    return [v.astype(np.complex128) / np.linalg.norm(v) for v in vecs]


def tiles_upb_state() -> np.ndarray:
    vecs = tiles_vectors()
    gram = np.array([[np.vdot(a, b) for b in vecs] for a in vecs])
    assert np.max(np.abs(gram - np.eye(5))) <= 1e-12, "tiles vectors are not orthonormal"
    proj = sum(np.outer(v, v.conj()) for v in vecs)
    return (np.eye(9, dtype=np.complex128) - proj) / 4


def npt_family(alpha: float, strict: bool = True) -> np.ndarray:
    """Two-qutrit NPT family; ``strict`` rejects alpha outside its valid interval."""
    if strict and not NPT_ALPHA_MIN - 1e-12 <= alpha <= NPT_ALPHA_MAX + 1e-12:
        raise ParameterOutOfRange(f"alpha={alpha} outside [{NPT_ALPHA_MIN:.6f}, {NPT_ALPHA_MAX:.6f}]")
    c = -11 / 50
    M = np.zeros((9, 9), dtype=np.complex128)
    M[0, 0] = (1 - alpha) / 2
    M[4, 4] = 0.5 - alpha
    M[5, 5] = alpha
    M[8, 8] = alpha / 2
    M[0, 8] = M[8, 0] = c
    M[4, 5] = M[5, 4] = c
    return M


@dataclass(frozen=True, eq=False)
class SchmidtBoundedSample:
    d: int
    r: int
    num_terms: int
    seed: int
    state: np.ndarray


def _haar_like_basis(rng: np.random.Generator, d: int) -> np.ndarray:
    Z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    Q, R = np.linalg.qr(Z)
    ph = np.diag(R) / np.abs(np.diag(R))
    return Q * ph[None, :]


def random_schmidt_rank_vector(rng: np.random.Generator, d: int, r: int) -> np.ndarray:
    """Pure state with Schmidt rank at most ``r`` (generically exactly ``r``)."""
    coeffs = rng.dirichlet(np.ones(r))
    UA = _haar_like_basis(rng, d)[:, :r]
    UB = _haar_like_basis(rng, d)[:, :r]
    return sum(math.sqrt(c) * np.kron(UA[:, i], UB[:, i]) for i, c in enumerate(coeffs))


def random_schmidt_bounded(d: int, r: int, num_terms: int = 4, seed: int = 0) -> SchmidtBoundedSample:
    """Mixture of ``num_terms`` pure states of Schmidt rank <= r, so SN <= r.

    Uses numpy's PCG64 stream seeded with ``seed``; mixture weights are
    uniform on the simplex.
    """
    if not 1 <= r <= d or num_terms < 1:
        raise ParameterOutOfRange(f"need 1 <= r <= d and num_terms >= 1 (d={d}, r={r}, num_terms={num_terms})")
    rng = np.random.Generator(np.random.PCG64(seed))
    weights = rng.dirichlet(np.ones(num_terms)) if num_terms > 1 else np.ones(1)
    rho = np.zeros((d * d, d * d), dtype=np.complex128)
    for w in weights:
        psi = random_schmidt_rank_vector(rng, d, r)
        rho += w * np.outer(psi, psi.conj())
    rho = 0.5 * (rho + rho.conj().T)
    return SchmidtBoundedSample(d, r, num_terms, seed, rho / np.trace(rho).real)


FAMILIES = {
    "isotropic": lambda d, x: isotropic(d, x),
    "dephased_mes": lambda d, x: dephased_mes(d, x),
    "stormer_bound": lambda d, x: stormer_bound(x),
    "tiles": lambda d, x: tiles_upb_state(),
    "npt": lambda d, x: npt_family(x),
    "max_entangled": lambda d, x: max_entangled(d),
    "max_mixed": lambda d, x: max_mixed(d),
}

FIXED_DIM_FAMILIES = {"stormer_bound", "tiles", "npt"}


def state_from_family(name: str, d: int = 3, param: float | None = None) -> tuple[np.ndarray, int, int]:
    """Instantiate a named family; returns ``(rho, dA, dB)``."""
    if name not in FAMILIES:
        raise ParameterOutOfRange(f"unknown state family {name!r}")
    if name in FIXED_DIM_FAMILIES:
        d = 3
    needs_param = name in ("isotropic", "dephased_mes", "stormer_bound", "npt")
    if needs_param and param is None:
        raise ParameterOutOfRange(f"family {name!r} needs a parameter")
    return FAMILIES[name](d, param), d, d
