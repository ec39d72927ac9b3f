import numpy as np
import pytest

from posmap import discrimination as disc
from posmap import linalg, moments, states
from posmap.channels import channel_choi, kraus_completeness
from posmap.errors import DimensionMismatch, ParameterOutOfRange
from posmap.maps import Reduction

from conftest import blockwise_oracle, random_density


def test_reduction_tp(rng):
    tp = disc.reduction_tp(0.5, 3)
    assert np.allclose(tp.apply(np.eye(3)), np.eye(3))
    for _ in range(20):
        X = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        assert np.trace(tp.apply(X)) == pytest.approx(np.trace(X), abs=1e-12)
    out = tp.apply_to_second(states.max_entangled(3), 3)
    assert np.allclose(linalg.hermitian_eigenvalues(out), [-1 / 15] + [2 / 15] * 8)
    with pytest.raises(ParameterOutOfRange):
        disc.reduction_tp(0.0, 3)
    with pytest.raises(ParameterOutOfRange):
        disc.reduction_tp(1.5, 3)


def test_reduction_tp_blockwise_matches_oracle(rng):
    tp = disc.reduction_tp(0.5, 3)
    rho = random_density(rng, 6)
    assert np.allclose(tp.apply_to_second(rho, 2), blockwise_oracle(tp.apply, rho, 2, 3), atol=1e-14)


def test_trace_annihilating(rng):
    tp = disc.reduction_tp(0.5, 3)
    ta = disc.trace_annihilating(tp, 3)
    assert ta.d_out == 4
    out = ta.apply(np.eye(3) / 3)
    expected = np.zeros((4, 4), dtype=complex)
    expected[:3, :3] = tp.apply(np.eye(3) / 3)
    # flag level carries -Tr X so the total trace vanishes
    expected[3, 3] = -1
    assert np.allclose(out, expected)
    for _ in range(100):
        X = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        assert abs(np.trace(ta.apply(X))) <= 1e-12
    rho = random_density(rng, 6)
    assert np.allclose(ta.apply_to_second(rho, 2), blockwise_oracle(ta.apply, rho, 2, 3), atol=1e-14)
    C = ta.choi_matrix()
    assert np.max(np.abs(linalg.partial_trace(C, 3, 4, keep="A"))) <= 1e-12
    with pytest.raises(DimensionMismatch):
        disc.trace_annihilating(tp, 4)


@pytest.mark.parametrize("d, r", [(3, 1), (3, 2), (2, 1), (4, 3)])
def test_channel_pair_construction(d, r):
    pair = disc.reduction_channel_pair(d, r)
    for S in (pair.S1, pair.S2):
        assert S.d_in == d and S.d_out == d + 1
        assert np.max(np.abs(kraus_completeness(S.kraus()) - np.eye(d))) <= 1e-10
        assert linalg.hermitian_eigenvalues(channel_choi(S))[0] >= -1e-10
    assert pair.choi_difference_defect() <= 1e-9
    assert pair.k_scale > 0


def test_jordan_parts_share_marginal():
    C = disc.trace_annihilating(disc.reduction_tp(0.5, 3)).choi_matrix()
    w, V = np.linalg.eigh(C)
    Cp = (V * np.clip(w, 0, None)) @ V.conj().T
    Cm = (V * np.clip(-w, 0, None)) @ V.conj().T
    assert np.allclose(linalg.partial_trace(Cp, 3, 4), linalg.partial_trace(Cm, 3, 4), atol=1e-10)


def test_channel_pair_is_deterministic():
    ta = disc.trace_annihilating(disc.reduction_tp(0.5, 3))
    a, b = disc.channel_pair_from_ta(ta), disc.channel_pair_from_ta(ta)
    for x, y in zip(a.S1.kraus() + a.S2.kraus(), b.S1.kraus() + b.S2.kraus()):
        assert np.array_equal(x, y)


def test_witness_examples():
    rep = disc.discrimination_witness(states.max_entangled(3), 3, 2)
    assert rep.trace_norm_value == pytest.approx(17 / 15, abs=1e-9)
    assert rep.has_advantage and rep.verdict == "advantage"
    assert rep.advantage == pytest.approx(rep.k_scale * (17 / 15 - 1) / 2)
    rep = disc.discrimination_witness(states.isotropic(3, 0.5), 3, 2)
    assert rep.trace_norm_value == pytest.approx(1, abs=1e-10)
    assert rep.verdict == "no_advantage"
    assert set(rep.to_dict()) >= {"trace_norm_value", "advantage", "verdict"}


def test_end_to_end_examples():
    k = disc.reduction_channel_pair(3, 2).k_scale
    assert disc.end_to_end_advantage(states.max_mixed(3), 3, 2) == pytest.approx(k, abs=1e-10)
    phi = disc.end_to_end_advantage(states.max_entangled(3), 3, 2)
    assert phi == pytest.approx(k * (17 / 15 + 1) / 2, abs=1e-8)
    assert phi > k


def test_helstrom_examples(rng):
    rho = random_density(rng, 3)
    assert disc.helstrom(rho, rho) == pytest.approx(0.5)
    assert disc.helstrom(np.diag([1.0, 0]), np.diag([0, 1.0])) == pytest.approx(1)
    assert disc.helstrom(np.diag([1.0, 0]), np.eye(2) / 2) == pytest.approx(0.75)
    assert disc.helstrom(rho, random_density(rng, 3), p=0.8) >= 0.8 - 1e-12
    with pytest.raises(DimensionMismatch):
        disc.helstrom(np.eye(2) / 2, np.eye(3) / 3)


def test_witness_matches_negativity_and_end_to_end(rng):
    samples = [states.isotropic(3, p) for p in np.linspace(0, 1, 11)]
    samples += [random_density(rng, 9) for _ in range(40)]
    samples += [random_density(rng, 9, rank=1) for _ in range(20)]
    for r in (1, 2):
        tp = disc.reduction_tp(1 / r, 3)
        for rho in samples:
            rep = disc.discrimination_witness(rho, 3, r)
            assert rep.trace_norm_value >= 1 - 1e-10
            negative = np.linalg.eigvalsh(tp.apply_to_second(rho, 3))[0] < -1e-9
            assert rep.has_advantage == negative
            e2e = disc.end_to_end_advantage(rho, 3, r)
            assert e2e == pytest.approx(rep.k_scale * (rep.trace_norm_value + 1) / 2, abs=1e-8)


GALLERY = ([states.isotropic(3, p) for p in (0.3, 0.6, 0.7, 1.0)]
           + [states.dephased_mes(3, v) for v in (0.4, 0.55, 0.8, 1.0)]
           + [states.stormer_bound(p) for p in (0.1, 0.5)]
           + [states.tiles_upb_state(), states.npt_family(0.3), states.max_mixed(3)])


@pytest.mark.parametrize("r", [1, 2])
def test_detector_linkage(rng, r):
    red = Reduction.for_schmidt(3, r)
    pool = GALLERY + [random_density(rng, 9, rank=int(rng.integers(1, 4))) for _ in range(200)]
    fired = 0
    for rho in pool:
        s = moments.map_moments(red, rho, 3, 3)
        if any(moments.hankel_criterion(s, m).detected for m in (1, 2)):
            fired += 1
            assert disc.discrimination_witness(rho, 3, r).has_advantage
    assert fired > 0
