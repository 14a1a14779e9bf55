import json

import numpy as np
import pytest

from cohconc.errors import ParameterError
from cohconc.monotones import coherence_k_concurrence_pure
from cohconc.multislit import (DetectorModel, QuantonSpec, config_from_dict, config_to_dict, distinguishability,
                               distinguishable_slit_count, failure_chain, load_config, random_config,
                               reduced_state, sweep_rows)
from cohconc.states import DensityMatrix, PureState

from pathlib import Path

DATA = Path(__file__).resolve().parents[1] / "data"
HALF = QuantonSpec(c=np.full(2, np.sqrt(0.5)))


def two_slit(p: float) -> DetectorModel:
    return DetectorModel.build(np.full(2, np.sqrt(1 - p)), [1.0], [[1.0, 1.0]])


def test_orthogonal_detectors_give_diagonal_state():
    c = np.sqrt([0.5, 0.3, 0.2])
    rho, _ = reduced_state(QuantonSpec(c=c), DetectorModel.orthogonal(3))
    np.testing.assert_allclose(rho.entries, np.diag(c ** 2), atol=1e-15)


def test_identical_detectors_leave_quanton_pure():
    c = np.array([0.6, 0.8j, 0.0])
    rho, _ = reduced_state(QuantonSpec(c=c), DetectorModel.identical(3))
    np.testing.assert_allclose(rho.entries, np.outer(c, c.conj()), atol=1e-15)


def test_two_slit_off_diagonal():
    rho, dec = reduced_state(HALF, two_slit(0.4))
    assert rho.entries[0, 1] == pytest.approx(0.2)
    assert dec.reconstruction_defect(rho) < 1e-12


def test_failure_chain_examples():
    assert failure_chain(HALF, DetectorModel.orthogonal(2)).as_tuple() == pytest.approx((0, 0, 0), abs=1e-12)
    c = np.sqrt([0.5, 0.3, 0.2])
    chain = failure_chain(QuantonSpec(c=c), DetectorModel.identical(3))
    assert chain.bound2 == pytest.approx(coherence_k_concurrence_pure(PureState(c), 2), abs=1e-12)
    chain = failure_chain(HALF, two_slit(0.4))
    assert chain.roof == pytest.approx(0.4, abs=1e-4)
    assert chain.bound1 >= chain.bound2 - 1e-8 and chain.bound2 >= chain.roof - 1e-8


def test_distinguishability_examples():
    assert distinguishability(QuantonSpec(c=np.full(3, 1 / np.sqrt(3))), DetectorModel.orthogonal(3)).d_q == 1.0
    assert distinguishability(QuantonSpec(c=np.full(3, 1 / np.sqrt(3))), DetectorModel.identical(3)).d_q == pytest.approx(0.0, abs=1e-4)
    assert distinguishability(HALF, two_slit(0.4)).d_q == pytest.approx(0.6, abs=1e-4)


@pytest.mark.parametrize("p", [0.1, 0.3, 0.5, 0.7, 0.9])
def test_two_slit_matches_two_state_discrimination(p):
    assert distinguishability(HALF, DetectorModel.symmetric(2, p)).d_q == pytest.approx(1 - p, abs=1e-4)


def test_slit_count_examples():
    assert distinguishable_slit_count(DensityMatrix(np.diag([0.25] * 4))) == 3
    assert distinguishable_slit_count(PureState.maximally_coherent(4).density()) == 0
    det = DetectorModel.build([0.5, 0.5, 1.0], [1.0], [[1.0, 1.0, 0.0]])
    rho, _ = reduced_state(QuantonSpec(c=np.full(3, 1 / np.sqrt(3))), det)
    assert distinguishable_slit_count(rho) == 1


@pytest.mark.parametrize("mixed", [False, True])
def test_random_chain_is_monotone(rng, mixed):
    q, det = random_config(3, 2, rng, mixed=mixed)
    chain = failure_chain(q, det)
    assert chain.bound1 >= chain.bound2 - 1e-8
    assert chain.bound2 >= chain.roof - 1e-8
    rho, dec = reduced_state(q, det)
    assert dec.reconstruction_defect(rho) < 1e-12


def test_detector_validation():
    with pytest.raises(ParameterError):
        DetectorModel(np.ones(2), [1.0], np.ones((1, 2)))
    with pytest.raises(ParameterError):
        DetectorModel.build([1.2, 0.0], [1.0], [[1.0, 1.0]])
    with pytest.raises(ParameterError):
        QuantonSpec(c=np.ones(2))
    with pytest.raises(ParameterError):
        QuantonSpec()


def test_config_round_trip(tmp_path):
    q, det = random_config(3, 2, np.random.default_rng(3), mixed=True)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(config_to_dict(q, det)))
    q2, det2 = load_config(path)
    np.testing.assert_allclose(q2.chi, q.chi)
    np.testing.assert_allclose(det2.q, det.q)


def test_shipped_two_slit_config():
    q, det = load_config(DATA / "twoslit.json")
    assert det.gram()[0, 1] == pytest.approx(0.4)
    assert distinguishability(q, det).d_q == pytest.approx(0.6, abs=1e-4)


def test_config_rejects_slit_mismatch():
    with pytest.raises(ParameterError):
        config_from_dict({"slits": 3, "c": [0.6, 0.8], "phi": [1, 1], "p": [1], "q": [[0, 0]]})
    with pytest.raises(ParameterError):
        config_from_dict({"slits": 2})


def test_sweep_rows():
    rows = sweep_rows(HALF, two_slit(0.4), "overlap", 0.2, 0.8, 4)
    assert [r[0] for r in rows] == pytest.approx([0.2, 0.4, 0.6, 0.8])
    for param, dq, *_ in rows:
        assert dq == pytest.approx(1 - param, abs=1e-4)
    with pytest.raises(ParameterError):
        sweep_rows(HALF, two_slit(0.4), "nope", 0, 1, 2)
