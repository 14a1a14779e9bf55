"""Closed-form monotones of pure states."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Optional

import numpy as np

from .errors import DimensionError, ParameterError, UnsupportedShapeError
from .states import BipartitePureState, DensityMatrix, PureState, schmidt_coefficients

TINY = 1e-300
GENERAL_MAX_DIM = 6

COHERENCE_K = "coherence_k_concurrence"
ENTANGLEMENT_K = "entanglement_k_concurrence"
L1 = "l1_coherence"
QI = "qi_coherence_concurrence"
FAMILIES = (COHERENCE_K, ENTANGLEMENT_K, L1, QI)
K_FAMILIES = (COHERENCE_K, ENTANGLEMENT_K)


@dataclass(frozen=True)
class MonotoneId:
    family: str
    k: Optional[int] = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ParameterError(f"unknown monotone family {self.family!r}")
        if (self.family in K_FAMILIES) != (self.k is not None):
            raise ParameterError(f"{self.family} {'needs' if self.family in K_FAMILIES else 'takes no'} order k")
        if self.k is not None and self.k < 2:
            raise ParameterError("k must be >= 2")

    def __str__(self):
        return self.family if self.k is None else f"{self.family}[k={self.k}]"


def elementary_symmetric(values, k: int) -> float:
    """k-th elementary symmetric polynomial by the one-pass O(n k) recurrence."""
    x = np.asarray(values, dtype=float).ravel()
    n = x.shape[0]
    if not 1 <= k <= n:
        raise ParameterError(f"k must lie in [1, {n}], got {k}")
    e = np.zeros(k + 1)
    e[0] = 1.0
    for i, xi in enumerate(x):
        top = min(i + 1, k)
        e[1:top + 1] += xi * e[0:top]
    return float(max(e[k], 0.0))


def _kth_root(s: float, k: int) -> float:
    return 0.0 if s < TINY else s ** (1.0 / k)


def _check_k(k: int, d: int):
    if not 2 <= k <= d:
        raise ParameterError(f"k must lie in [2, {d}], got {k}")


def _as_pure(psi) -> PureState:
    return psi if isinstance(psi, PureState) else PureState(psi)


def coherence_k_concurrence_pure(psi, k: int) -> float:
    psi = _as_pure(psi)
    d = psi.dim
    _check_k(k, d)
    s = elementary_symmetric(psi.populations, k)
    return min(d * _kth_root(s / comb(d, k), k), 1.0)


def l1_coherence(rho) -> float:
    """Twice the summed moduli above the diagonal; pure states via projectors."""
    if isinstance(rho, BipartitePureState):
        rho = rho.vector
    if isinstance(rho, PureState):
        m = rho.projector()
    elif isinstance(rho, DensityMatrix):
        m = rho.entries
    else:
        m = np.asarray(rho, dtype=complex)
        if m.ndim == 1:
            m = np.outer(m, m.conj())
    return float(2.0 * np.sum(np.abs(np.triu(m, 1))))


def qi_coherence_concurrence_pure(psi) -> float:
    a = np.abs(_as_pure(psi).amplitudes)
    return float(2.0 * np.sum(np.triu(np.outer(a, a), 1)))


def coherence_rank(psi, tol: float = 1e-9) -> int:
    return int(np.sum(np.abs(_as_pure(psi).amplitudes) > tol))


def _square_dims(psi: BipartitePureState, k: int) -> int:
    d_a, d_b = psi.dims
    if d_a != d_b:
        raise UnsupportedShapeError(
            f"k-concurrence normalization is defined for d x d systems, got {d_a} x {d_b}"
        )
    _check_k(k, d_a)
    return d_a


def ent_k_concurrence_schmidt(psi: BipartitePureState, k: int) -> float:
    d = _square_dims(psi, k)
    lam = schmidt_coefficients(psi)
    if lam.shape[0] < k:
        return 0.0
    s = elementary_symmetric(lam, k)
    return min(d * _kth_root(s / comb(d, k), k), 1.0)


def det_small(m: np.ndarray) -> complex:
    """Determinant; explicit expansion up to 3x3, partial pivoting above."""
    n = m.shape[0]
    if n == 1:
        return complex(m[0, 0])
    if n == 2:
        return complex(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])
    if n == 3:
        return complex(
            m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
            - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
            + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0])
        )
    a = np.array(m, dtype=complex)
    det = 1.0 + 0j
    for c in range(n):
        p = c + int(np.argmax(np.abs(a[c:, c])))
        if a[p, c] == 0:
            return 0j
        if p != c:
            a[[c, p]] = a[[p, c]]
            det = -det
        det *= a[c, c]
        a[c + 1:, c:] -= np.outer(a[c + 1:, c] / a[c, c], a[c, c:])
    return det


def ent_k_concurrence_general(psi: BipartitePureState, k: int) -> float:
    """k-concurrence straight from the amplitude matrix, no Schmidt form.

    The antisymmetrized product over column labels is the k x k minor of
    psi_ij, so the sum runs over all row and column k-subsets.
    """
    d = _square_dims(psi, k)
    if d > GENERAL_MAX_DIM:
        raise UnsupportedShapeError(f"minor expansion limited to d <= {GENERAL_MAX_DIM}")
    a = psi.amplitudes
    subsets = list(combinations(range(d), k))
    total = 0.0
    for rows in subsets:
        sub = a[list(rows), :]
        for cols in subsets:
            total += abs(det_small(sub[:, list(cols)])) ** 2
    return min(d * _kth_root(total / comb(d, k), k), 1.0)


def evaluate_pure(monotone: MonotoneId, psi) -> float:
    """Dispatch a pure-state closed form by monotone id."""
    if monotone.family == COHERENCE_K:
        return coherence_k_concurrence_pure(psi, monotone.k)
    if monotone.family == QI:
        return qi_coherence_concurrence_pure(psi)
    if monotone.family == L1:
        return l1_coherence(_as_pure(psi))
    if isinstance(psi, BipartitePureState):
        return ent_k_concurrence_schmidt(psi, monotone.k)
    vec = _as_pure(psi).amplitudes
    d = int(round(np.sqrt(vec.shape[0])))
    if d * d != vec.shape[0]:
        raise DimensionError("entanglement objective needs a d*d dimensional vector")
    return ent_k_concurrence_schmidt(BipartitePureState.from_vector(vec, (d, d)), monotone.k)
