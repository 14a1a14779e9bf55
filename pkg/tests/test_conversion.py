import numpy as np
import pytest

from cohconc.conversion import (cnot_permutation, generalized_cnot, image_decomposition, lambda_u,
                                preimage_decomposition, verify_conversion)
from cohconc.errors import ParameterError
from cohconc.monotones import ent_k_concurrence_schmidt
from cohconc.states import BipartitePureState, DensityMatrix, PureState, eig_decompose, random_mixed, random_pure

from test_monotones import C2_HALF_QUARTERS


def test_qubit_cnot():
    expected = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
    np.testing.assert_array_equal(generalized_cnot(2), expected)


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_cnot_is_a_permutation(d):
    u = generalized_cnot(d)
    np.testing.assert_array_equal(u @ u.T, np.eye(d * d))
    assert sorted(cnot_permutation(d)) == list(range(d * d))


def test_cnot_copies_the_index():
    u = generalized_cnot(3)
    v = np.zeros(9)
    v[2 * 3 + 0] = 1.0
    assert np.argmax(u @ v) == 2 * 3 + 2


def test_lambda_u_matches_dense_unitary():
    psi = random_pure(3, 4)
    u = generalized_cnot(3)
    dense = u @ np.kron(psi.amplitudes, np.eye(3)[0])
    np.testing.assert_allclose(lambda_u(psi).vector, dense, atol=1e-15)
    rho = random_mixed(3, 2, 4)
    anc = np.zeros((3, 3))
    anc[0, 0] = 1.0
    np.testing.assert_allclose(lambda_u(rho).entries, u @ np.kron(rho.entries, anc) @ u.T, atol=1e-15)


def test_lambda_u_examples():
    out = lambda_u(PureState.maximally_coherent(3))
    np.testing.assert_allclose(out.amplitudes, np.eye(3) / np.sqrt(3))
    assert ent_k_concurrence_schmidt(lambda_u(PureState.basis(3, 0)), 2) == pytest.approx(0.0, abs=1e-12)
    diag = lambda_u(DensityMatrix(np.diag([0.2, 0.3, 0.5])))
    assert np.count_nonzero(diag.entries - np.diag(np.diag(diag.entries))) == 0


def test_decomposition_maps_are_inverse():
    dec = eig_decompose(random_mixed(3, 2, 5))
    back = preimage_decomposition(image_decomposition(dec), 3)
    np.testing.assert_allclose(back.weights, dec.weights)
    np.testing.assert_allclose(back.states, dec.states)


def test_pure_conversion_identity():
    res = verify_conversion(PureState(np.sqrt([0.5, 0.25, 0.25])), 2)
    assert res.coherence_side == pytest.approx(C2_HALF_QUARTERS, abs=1e-8)
    assert res.delta < 1e-12
    assert isinstance(res.output, BipartitePureState)


def test_incoherent_conversion():
    res = verify_conversion(DensityMatrix(np.diag([0.5, 0.3, 0.2])), 2, restarts=2)
    assert res.coherence_side <= 1e-8 and res.entanglement_side <= 1e-8


@pytest.mark.parametrize("k", [2, 3])
def test_mixed_conversion_delta(k):
    res = verify_conversion(random_mixed(3, 2, 13), k)
    assert res.delta <= 2e-4
    assert res.to_dict()["delta"] == res.delta


def test_conversion_rejects_bad_order():
    with pytest.raises(ParameterError):
        verify_conversion(random_pure(3, 1), 4)
