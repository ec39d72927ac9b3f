"""Pure-numpy versions of the compiled kernels in ``_ckernels.pyx``."""
import numpy as np


def partial_transpose(rho, dA, dB, on_a):
    t = rho.reshape(dA, dB, dA, dB)
    t = t.transpose(2, 1, 0, 3) if on_a else t.transpose(0, 3, 2, 1)
    return np.ascontiguousarray(t.reshape(dA * dB, dA * dB))


def reduction_second(rho, dA, dB, k):
    t = rho.reshape(dA, dB, dA, dB)
    traces = np.einsum("iaja->ij", t)
    out = np.einsum("ij,ab->iajb", traces, np.eye(dB)) - k * t
    return out.reshape(dA * dB, dA * dB)


def gen_choi_second(rho, dA, dB, kk):
    t = rho.reshape(dA, dB, dA, dB)
    diag = np.einsum("iaja->ija", t)
    acc = (dB - kk) * diag
    for s in range(1, kk + 1):
        acc = acc + np.roll(diag, -s, axis=2)
    out = -t.copy()
    idx = np.arange(dB)
    out[:, idx, :, idx] += acc.transpose(2, 0, 1)
    return out.reshape(dA * dB, dA * dB)


def breuer_hall_second(rho, dA, dB, U):
    t = rho.reshape(dA, dB, dA, dB)
    traces = np.einsum("iaja->ij", t)
    # U X^T U^dagger on every block X = t[i, :, j, :]
    rot = np.einsum("ac,ibjc,db->iajd", U, t, U.conj(), optimize=True)
    out = np.einsum("ij,ab->iajb", traces, np.eye(dB)) - t - rot
    return out.reshape(dA * dB, dA * dB)


def power_sums(ev, n_max):
    ev = np.asarray(ev, dtype=float)
    return np.array([np.sum(ev ** n) for n in range(1, n_max + 1)])
