import numpy as np
import pytest

from cohconc.errors import DimensionError, InvalidStateError
from cohconc.states import (BipartitePureState, Decomposition, DensityMatrix, KrausSet, PureState,
                            eig_decompose, random_incoherent_kraus, random_mixed, random_pure,
                            schmidt_coefficients, validate_state)


def test_valid_maximally_mixed_has_no_violations():
    assert validate_state(np.eye(3) / 3) == []


def test_trace_defect_is_reported():
    kinds = {v.kind: v.defect for v in validate_state(np.diag([0.5, 0.4]))}
    assert kinds["trace"] == pytest.approx(0.1)


def test_negative_eigenvalue_is_reported():
    kinds = [v.kind for v in validate_state(np.diag([1.2, -0.2]))]
    assert "positivity" in kinds


def test_density_matrix_rejects_invalid_input():
    with pytest.raises(InvalidStateError):
        DensityMatrix(np.diag([1.2, -0.2]))
    with pytest.raises(InvalidStateError):
        PureState(np.array([1.0, 1.0]))
    with pytest.raises(DimensionError):
        PureState(np.array([1.0]))


def test_eig_decompose_pure_and_mixed():
    psi = random_pure(3, 1)
    dec = eig_decompose(psi.density())
    assert len(dec) == 1 and dec.weights[0] == pytest.approx(1.0)
    assert abs(np.vdot(dec.states[0], psi.amplitudes)) == pytest.approx(1.0)

    half = eig_decompose(DensityMatrix(np.eye(2) / 2))
    np.testing.assert_allclose(half.weights, [0.5, 0.5])
    assert abs(np.vdot(half.states[0], half.states[1])) < 1e-12

    dec = eig_decompose(DensityMatrix(np.diag([0.7, 0.3, 0.0])))
    np.testing.assert_allclose(sorted(dec.weights), [0.3, 0.7])


def test_schmidt_coefficients():
    bell = BipartitePureState(np.eye(2) / np.sqrt(2))
    np.testing.assert_allclose(schmidt_coefficients(bell), [0.5, 0.5])
    product = BipartitePureState.from_vector(np.eye(4)[1], (2, 2))
    np.testing.assert_allclose(schmidt_coefficients(product)[:1], [1.0])
    diag = BipartitePureState(np.diag(np.sqrt([0.5, 0.3, 0.2])))
    np.testing.assert_allclose(sorted(schmidt_coefficients(diag), reverse=True), [0.5, 0.3, 0.2])


def test_samplers_are_deterministic():
    np.testing.assert_array_equal(random_pure(3, 42).amplitudes, random_pure(3, 42).amplitudes)
    np.testing.assert_array_equal(random_mixed(4, 2, 7).entries, random_mixed(4, 2, 7).entries)
    assert len(eig_decompose(random_mixed(4, 2, 7))) == 2


@pytest.mark.parametrize("max_group", [1, 2])
def test_random_incoherent_kraus_is_complete_and_incoherent(max_group):
    ks = random_incoherent_kraus(3, 2, 1, max_group=max_group)
    total = sum(k.conj().T @ k for k in ks.operators)
    np.testing.assert_allclose(total, np.eye(3), atol=1e-10)
    for k in ks.operators:
        assert np.max(np.sum(np.abs(k) > 0, axis=0)) <= 1


def test_kraus_set_rejects_incomplete_operators():
    with pytest.raises(InvalidStateError):
        KrausSet((np.diag([1.0, 0.5]),))


def test_decomposition_round_trip_and_mix():
    rho = random_mixed(3, 2, 3)
    dec = eig_decompose(rho)
    assert dec.reconstruction_defect(rho) < 1e-12
    again = Decomposition.from_rows(dec.rows())
    np.testing.assert_allclose(again.weights, dec.weights)
    mixed = dec.mix(Decomposition.single(PureState.basis(3, 0)), 0.25)
    assert mixed.weights.sum() == pytest.approx(1.0)
    np.testing.assert_allclose(mixed.matrix(), 0.25 * rho.entries + 0.75 * np.diag([1, 0, 0]), atol=1e-12)
