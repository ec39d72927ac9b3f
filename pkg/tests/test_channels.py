import numpy as np
import pytest

from posmap import channels, moments, states
from posmap.channels import Dephasing, Depolarizing, KrausChannel
from posmap.errors import DimensionMismatch, InsufficientMoments, ParameterOutOfRange
from posmap.maps import Reduction

from conftest import random_density, random_unitary


def _closed_depolarizing(rho, p):
    d = rho.shape[0]
    return p * rho + (1 - p) * np.trace(rho) * np.eye(d) / d


def _closed_dephasing(rho, v):
    return v * rho + (1 - v) * np.diag(np.diag(rho))


def test_apply_examples(rng):
    rho = random_density(rng, 3)
    assert np.allclose(Depolarizing(3, 1.0).apply(rho), rho)
    assert np.allclose(Depolarizing(3, 0.0).apply(rho), np.eye(3) / 3)
    assert np.allclose(Dephasing(3, 0.0).apply(rho), np.diag(np.diag(rho)))
    with pytest.raises(DimensionMismatch):
        Depolarizing(3, 0.5).apply(np.eye(2) / 2)


@pytest.mark.parametrize("ch", [Depolarizing(3, 0.3), Depolarizing(4, -0.05), Dephasing(3, 0.6), Dephasing(2, 0.0)],
                         ids=repr)
def test_kraus_completeness_and_positivity(rng, ch):
    ops = ch.kraus()
    assert np.allclose(channels.kraus_completeness(ops), np.eye(ch.d_in), atol=1e-10)
    for _ in range(100):
        out = ch.apply(random_density(rng, ch.d_in))
        assert np.linalg.eigvalsh(out)[0] >= -1e-10


@pytest.mark.parametrize("p", [0.0, 0.2, 0.75, 1.0])
def test_kraus_realization(rng, p):
    for _ in range(10):
        X = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        dep, dph = Depolarizing(3, p), Dephasing(3, p)
        assert np.allclose(sum(K @ X @ K.conj().T for K in dep.kraus()), _closed_depolarizing(X, p), atol=1e-10)
        assert np.allclose(sum(K @ X @ K.conj().T for K in dph.kraus()), _closed_dephasing(X, p), atol=1e-10)


@pytest.mark.parametrize("x", np.linspace(0, 1, 11))
def test_choi_state_duality(x):
    assert np.max(np.abs(channels.channel_choi(Depolarizing(3, x)) - states.isotropic(3, x))) <= 1e-12
    assert np.max(np.abs(channels.channel_choi(Dephasing(3, x)) - states.dephased_mes(3, x))) <= 1e-12


def test_identity_channel_choi():
    ident = KrausChannel((np.eye(3, dtype=complex),))
    assert np.allclose(ident.choi(), states.max_entangled(3))


def test_kraus_channel_validation():
    with pytest.raises(ParameterOutOfRange):
        KrausChannel((0.5 * np.eye(3),))


def test_kraus_from_choi_round_trip(rng):
    for _ in range(5):
        U = random_unitary(rng, 3)
        ch = KrausChannel((np.sqrt(0.3) * U, np.sqrt(0.7) * np.eye(3)))
        rebuilt = KrausChannel(tuple(channels.kraus_from_choi(ch.choi(), 3, 3)))
        rho = random_density(rng, 3)
        assert np.allclose(rebuilt.apply(rho), ch.apply(rho), atol=1e-12)


def test_channel_moments_examples():
    e = channels.channel_moments(Depolarizing(3, 0.0), 1)
    assert e[2] ** 2 <= e[3]
    assert not channels.theorem4_check(e).detected
    for ch in (Depolarizing(3, 1.0), Dephasing(3, 1.0)):
        e = channels.channel_moments(ch, 2)
        assert e[2] == pytest.approx(11 / 75, abs=1e-14)
        assert e[3] == pytest.approx(7 / 375, abs=1e-14)
        assert e.r == 2


@pytest.mark.parametrize("r", [1, 2])
def test_channel_moments_match_state_moments(rng, r):
    for ch in (Depolarizing(3, rng.uniform()), Dephasing(3, rng.uniform())):
        e = channels.channel_moments(ch, r).as_array()
        s = moments.map_moments(Reduction.for_schmidt(3, r), channels.channel_choi(ch), 3, 3).as_array()
        assert np.max(np.abs(e - s)) <= 1e-12
        assert e[0] == pytest.approx(1, abs=1e-10)


def test_detector_examples():
    assert channels.theorem4_check(channels.channel_moments(Depolarizing(3, 0.5), 1)).detected
    assert channels.theorem4_check(channels.channel_moments(Depolarizing(3, 0.7), 2)).detected
    assert channels.theorem5_check(channels.channel_moments(Dephasing(3, 0.75), 2), m=2).detected
    with pytest.raises(InsufficientMoments):
        channels.theorem5_check(channels.channel_moments(Dephasing(3, 0.75), 2, n_max=4), m=2)


def test_snbc_threshold():
    assert channels.snbc_threshold("depolarizing", 3, 1) == pytest.approx(1 / 4)
    assert channels.snbc_threshold("depolarizing", 3, 2) == pytest.approx(5 / 8)
    assert channels.snbc_threshold("dephasing", 3, 2) == pytest.approx(1 / 2)
    with pytest.raises(ParameterOutOfRange):
        channels.snbc_threshold("depolarizing", 3, 3)
    with pytest.raises(ParameterOutOfRange):
        channels.snbc_threshold("amplitude_damping", 3, 1)


@pytest.mark.parametrize("family, r", [("depolarizing", 1), ("depolarizing", 2), ("dephasing", 2)])
def test_soundness_below_threshold(family, r):
    make = Depolarizing if family == "depolarizing" else Dephasing
    t = channels.snbc_threshold(family, 3, r)
    for x in np.arange(0.0, t + 1e-12, 1e-3):
        e = channels.channel_moments(make(3, float(x)), r)
        assert not channels.theorem4_check(e, tol=1e-10).detected
        assert not channels.theorem5_check(e, m=2, tol=1e-10).detected


def test_non_square_channel_rejected():
    iso = np.zeros((4, 3), dtype=complex)
    iso[:3, :3] = np.eye(3)
    ch = KrausChannel((iso,))
    assert ch.d_in == 3 and ch.d_out == 4
    assert ch.choi().shape == (12, 12)
    with pytest.raises(DimensionMismatch):
        channels.channel_moments(ch, 1)
    with pytest.raises(ParameterOutOfRange):
        channels.channel_moments(Depolarizing(3, 0.5), 3)


def test_channel_from_dict():
    assert channels.channel_from_dict({"channel": "depolarizing", "d": 3, "p": 0.5}) == Depolarizing(3, 0.5)
    ch = channels.channel_from_dict(Dephasing(3, 0.7).to_dict())
    assert ch == Dephasing(3, 0.7)
    k = KrausChannel(tuple(Dephasing(2, 0.4).kraus()))
    again = channels.channel_from_dict(k.to_dict())
    rho = np.array([[0.6, 0.2j], [-0.2j, 0.4]])
    assert np.allclose(again.apply(rho), k.apply(rho))
    with pytest.raises(ParameterOutOfRange):
        channels.channel_from_dict({"channel": "erasure"})
