"""The compiled and pure-Python kernels must agree."""
from itertools import combinations
from math import comb

import numpy as np
import pytest

from cohconc import _pykernels, kernels
from cohconc.monotones import MonotoneId, COHERENCE_K, ENTANGLEMENT_K, QI
from cohconc.roof import RoofProblem, minimize_roof
from cohconc.states import random_mixed

pytestmark = pytest.mark.skipif(not kernels.compiled_available(), reason="compiled extension not built")


def _params(kind, d, k):
    if kind == kernels.KIND_ENTANGLEMENT:
        return k, d, d * comb(d, k) ** (-1.0 / k), np.array(list(combinations(range(d), k)), dtype=np.int32)
    if kind == kernels.KIND_QI:
        return 1, d, 1.0, np.zeros((1, 1), dtype=np.int32)
    return k, d, d * comb(d, k) ** (-1.0 / k), np.zeros((1, 1), dtype=np.int32)


def _rows(rng, m, n):
    w = rng.normal(size=(m, n)) + 1j * rng.normal(size=(m, n))
    return np.ascontiguousarray(w / np.linalg.norm(w))


CASES = [(kernels.KIND_COHERENCE, 4, 2), (kernels.KIND_COHERENCE, 4, 4), (kernels.KIND_QI, 4, 1),
         (kernels.KIND_ENTANGLEMENT, 3, 2), (kernels.KIND_ENTANGLEMENT, 3, 3)]


@pytest.mark.parametrize("kind,d,k", CASES)
@pytest.mark.parametrize("power", [0.0, 1.0, 0.75])
def test_row_values_agree(kind, d, k, power, rng):
    from cohconc import _ckernels
    k, dloc, scale, subsets = _params(kind, d, k)
    n = d * d if kind == kernels.KIND_ENTANGLEMENT else d
    W = _rows(rng, 6, n)
    a = _ckernels.row_values(W, kind, k, dloc, scale, subsets, power)
    b = _pykernels.row_values(W, kind, k, dloc, scale, subsets, power)
    if kind == kernels.KIND_ENTANGLEMENT:
        np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-15)
    else:
        np.testing.assert_array_equal(a, b)


@pytest.mark.parametrize("kind,d,k", CASES[:3])
def test_descent_is_bit_identical_for_coherence_kinds(kind, d, k, rng):
    from cohconc import _ckernels
    k, dloc, scale, subsets = _params(kind, d, k)
    W0 = _rows(rng, 5, d)
    out = []
    for impl in (_ckernels, _pykernels):
        W = W0.copy()
        vals = impl.row_values(W, kind, k, dloc, scale, subsets, 0.0)
        res = impl.descend(W, vals, kind, k, dloc, scale, subsets, 0.0, np.pi / 4, 1e-9, 50, 5, 1e-12)
        out.append((W, vals, res))
    np.testing.assert_array_equal(out[0][0], out[1][0])
    np.testing.assert_array_equal(out[0][1], out[1][1])
    assert out[0][2] == out[1][2]


def test_entanglement_descent_agrees_within_rounding(rng):
    from cohconc import _ckernels
    k, dloc, scale, subsets = _params(kernels.KIND_ENTANGLEMENT, 2, 2)
    W0 = _rows(rng, 4, 4)
    totals = []
    for impl in (_ckernels, _pykernels):
        W = W0.copy()
        vals = impl.row_values(W, 2, k, dloc, scale, subsets, 0.0)
        impl.descend(W, vals, 2, k, dloc, scale, subsets, 0.0, np.pi / 4, 1e-9, 20, 5, 1e-12)
        totals.append(vals.sum())
    assert totals[0] == pytest.approx(totals[1], abs=1e-9)


@pytest.mark.parametrize("mid", [MonotoneId(COHERENCE_K, 2), MonotoneId(COHERENCE_K, 3), MonotoneId(QI)])
@pytest.mark.parametrize("d,rank,seed", [(3, 2, 31), (3, 3, 4), (4, 2, 17), (4, 3, 8)])
def test_roof_estimates_identical_across_backends(mid, d, rank, seed, monkeypatch):
    rho = random_mixed(d, rank, seed)
    problem = RoofProblem(rho, mid, restarts=3, seed=2)
    compiled = minimize_roof(problem)
    monkeypatch.setattr(kernels, "impl", _pykernels)
    python = minimize_roof(problem)
    assert compiled.value == python.value
    assert compiled.restart_values == python.restart_values


def test_entanglement_roof_close_across_backends(monkeypatch):
    rho = random_mixed(4, 2, 3)
    problem = RoofProblem(rho, MonotoneId(ENTANGLEMENT_K, 2), restarts=2, seed=1)
    compiled = minimize_roof(problem).value
    monkeypatch.setattr(kernels, "impl", _pykernels)
    assert minimize_roof(problem).value == pytest.approx(compiled, abs=1e-8)


def test_backend_selection_honours_env(monkeypatch):
    monkeypatch.setenv("COHCONC_PURE_PYTHON", "1")
    impl, name = kernels._load()
    assert impl is _pykernels and name == "python"
