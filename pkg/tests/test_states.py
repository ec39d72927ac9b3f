import math

import numpy as np
import pytest

from posmap import linalg, moments, states
from posmap.errors import InvalidState, ParameterOutOfRange
from posmap.maps import BreuerHall, GeneralizedChoi, Reduction


def _min_eig(M):
    return linalg.hermitian_eigenvalues(M)[0]


GALLERY = {
    "max_entangled": states.max_entangled(3),
    "max_mixed": states.max_mixed(3),
    "isotropic_0.3": states.isotropic(3, 0.3),
    "isotropic_neg": states.isotropic(3, -1 / 8),
    "dephased_0.6": states.dephased_mes(3, 0.6),
    "stormer_0.2": states.stormer_bound(0.2),
    "stormer_3": states.stormer_bound(3.0),
    "tiles": states.tiles_upb_state(),
    "npt_0.3": states.npt_family(0.3),
    "npt_left": states.npt_family(states.NPT_ALPHA_MIN),
    "npt_right": states.npt_family(states.NPT_ALPHA_MAX),
}


@pytest.mark.parametrize("name", sorted(GALLERY))
def test_gallery_states_are_valid(name):
    states.check_density(GALLERY[name])


def test_max_entangled():
    rho = states.max_entangled(2)
    expected = np.zeros((4, 4))
    expected[np.ix_([0, 3], [0, 3])] = 0.5
    assert np.allclose(rho, expected)
    rho3 = states.max_entangled(3)
    assert np.trace(rho3).real == pytest.approx(1)
    assert np.trace(rho3 @ rho3).real == pytest.approx(1)
    assert np.allclose(linalg.partial_trace(rho3, 3, 3, keep="A"), np.eye(3) / 3)


def test_isotropic():
    assert np.allclose(states.isotropic(3, 0), np.eye(9) / 9)
    assert np.allclose(states.isotropic(3, 1), states.max_entangled(3))
    with pytest.raises(InvalidState):
        states.isotropic(3, 1.2)


@pytest.mark.parametrize("family, boundary", [(lambda x: states.isotropic(3, x), 5 / 8),
                                              (lambda x: states.dephased_mes(3, x), 1 / 2)])
def test_schmidt_two_boundary_is_where_reduction_output_turns_negative(family, boundary):
    R = Reduction.for_schmidt(3, 2)
    assert _min_eig(R.apply_to_second(family(boundary), 3)) >= -1e-12
    assert _min_eig(R.apply_to_second(family(boundary + 1e-3), 3)) < -1e-6


def test_dephased_mes():
    assert np.allclose(states.dephased_mes(3, 1), states.max_entangled(3))
    rho0 = states.dephased_mes(3, 0)
    support = [0, 4, 8]
    assert np.allclose(rho0, np.diag([1 / 3 if i in support else 0 for i in range(9)]))
    with pytest.raises(ParameterOutOfRange):
        states.dephased_mes(3, 1.5)


@pytest.mark.parametrize("p", [0.01, 0.06, 0.1, 0.5, 1.0, 2.0, 17.0])
def test_stormer_bound_is_ppt(p):
    rho = states.stormer_bound(p)
    states.check_density(rho)
    assert _min_eig(linalg.partial_transpose(rho, 3, 3, "A")) >= -1e-10


def test_stormer_bound_properties():
    d = np.diag(states.stormer_bound(1.0)).real
    assert np.allclose(d, d[0])
    s = moments.map_moments(GeneralizedChoi(3, 1), states.stormer_bound(0.1), 3, 3)
    assert moments.hankel_criterion(s, 2).detected
    with pytest.raises(ParameterOutOfRange):
        states.stormer_bound(0)


def test_tiles_vectors_orthonormal_products():
    vecs = states.tiles_vectors()
    gram = np.array([[np.vdot(a, b) for b in vecs] for a in vecs])
    assert np.max(np.abs(gram - np.eye(5))) <= 1e-12
    for v in vecs:
        # product vectors have a rank-one coefficient matrix
        assert np.linalg.matrix_rank(v.reshape(3, 3), tol=1e-12) == 1


def test_tiles_state():
    rho = states.tiles_upb_state()
    assert np.trace(rho).real == pytest.approx(1)
    assert np.linalg.matrix_rank(rho, tol=1e-10) == 4
    for u in states.tiles_vectors():
        assert abs(np.vdot(u, rho @ u)) <= 1e-14
    assert _min_eig(linalg.partial_transpose(rho, 3, 3, "A")) >= -1e-10


def test_npt_family():
    assert _min_eig(linalg.partial_transpose(states.npt_family(0.3), 3, 3, "A")) < -1e-6
    left = states.npt_family((25 - math.sqrt(141)) / 50)
    states.check_density(left)
    for a in np.linspace(states.NPT_ALPHA_MIN, states.NPT_ALPHA_MAX, 7):
        assert np.trace(states.npt_family(a)).real == pytest.approx(1, abs=1e-15)
    with pytest.raises(ParameterOutOfRange):
        states.npt_family(0.1)
    assert not states.is_density(states.npt_family(0.1, strict=False))


def test_random_schmidt_bounded_determinism():
    a = states.random_schmidt_bounded(3, 2, 4, seed=7)
    b = states.random_schmidt_bounded(3, 2, 4, seed=7)
    assert np.array_equal(a.state, b.state)
    c = states.random_schmidt_bounded(3, 2, 4, seed=8)
    assert not np.array_equal(a.state, c.state)


def test_random_schmidt_bounded_pure_full_rank():
    s = states.random_schmidt_bounded(3, 3, 1, seed=1)
    rho = s.state
    assert np.trace(rho @ rho).real == pytest.approx(1)
    w, V = np.linalg.eigh(rho)
    psi = V[:, -1].reshape(3, 3)
    assert np.linalg.matrix_rank(psi, tol=1e-8) == 3


@pytest.mark.parametrize("r", [1, 2, 3])
def test_random_schmidt_bounded_rank_of_terms(r):
    rng = np.random.default_rng(r)
    for _ in range(20):
        psi = states.random_schmidt_rank_vector(rng, 3, r)
        assert np.linalg.norm(psi) == pytest.approx(1)
        assert np.linalg.matrix_rank(psi.reshape(3, 3), tol=1e-10) == r


def test_separable_samples_pass_hankel_for_three_maps():
    for seed in range(30):
        rho = states.random_schmidt_bounded(3, 1, 5, seed).state
        states.check_density(rho)
        for map_ in (Reduction(3, 1.0), GeneralizedChoi(3, 1), BreuerHall()):
            s = moments.map_moments(map_, rho, 3, 3)
            assert not moments.hankel_criterion(s, 2, detector="T3").detected
            assert not moments.hankel_criterion(s, 1, detector="T3").detected


def test_state_from_family():
    rho, dA, dB = states.state_from_family("tiles")
    assert (dA, dB) == (3, 3) and np.allclose(rho, states.tiles_upb_state())
    with pytest.raises(ParameterOutOfRange):
        states.state_from_family("isotropic", 3)
    with pytest.raises(ParameterOutOfRange):
        states.state_from_family("werner", 3, 0.1)
