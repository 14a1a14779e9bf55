"""Coherence-to-entanglement conversion through the generalized CNOT."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import InvariantError, ParameterError
from .monotones import coherence_k_concurrence_pure, ent_k_concurrence_schmidt
from .roof import MonotoneEstimate, coherence_k_concurrence_mixed, ent_k_concurrence_mixed
from .states import BipartitePureState, DensityMatrix, Decomposition, PureState

PURE_TOL = 1e-12


def cnot_permutation(d: int) -> np.ndarray:
    """Index map of |i>|j> -> |i>|(i+j) mod d> on row-major labels i*d + j."""
    if d < 2:
        raise ParameterError("d must be >= 2")
    i, j = np.divmod(np.arange(d * d), d)
    return i * d + (i + j) % d


def generalized_cnot(d: int) -> np.ndarray:
    perm = cnot_permutation(d)
    u = np.zeros((d * d, d * d))
    u[perm, np.arange(d * d)] = 1.0
    return u


def _copy_vector(amplitudes: np.ndarray) -> np.ndarray:
    # U (|psi> (x) |0>) without forming U: sum_i psi_i |ii>
    d = amplitudes.shape[0]
    out = np.zeros(d * d, dtype=complex)
    out[np.arange(d) * (d + 1)] = amplitudes
    return out


def lambda_u(state: Union[PureState, DensityMatrix]):
    """Attach the ancilla in |0> and apply the generalized CNOT."""
    if isinstance(state, PureState):
        return BipartitePureState(np.diag(state.amplitudes))
    if not isinstance(state, DensityMatrix):
        raise ParameterError("lambda_u takes a PureState or DensityMatrix")
    d = state.dim
    idx = np.arange(d) * (d + 1)
    out = np.zeros((d * d, d * d), dtype=complex)
    out[np.ix_(idx, idx)] = state.entries
    return DensityMatrix(out)


def image_decomposition(dec: Decomposition) -> Decomposition:
    return Decomposition(dec.weights, np.array([_copy_vector(s) for s in dec.states]))


def preimage_decomposition(dec: Decomposition, d: int) -> Decomposition:
    """Undo the copy map on members supported on span{|ii>}."""
    idx = np.arange(d) * (d + 1)
    return Decomposition.from_rows(dec.rows()[:, idx])


@dataclass(frozen=True)
class ConversionResult:
    output: object
    coherence_side: float
    entanglement_side: float
    delta: float
    coherence_estimate: Optional[MonotoneEstimate] = None
    entanglement_estimate: Optional[MonotoneEstimate] = None

    def to_dict(self) -> dict:
        return {
            "coherence_side": self.coherence_side,
            "entanglement_side": self.entanglement_side,
            "delta": self.delta,
        }


def verify_conversion(state, k: int, **opts) -> ConversionResult:
    """Evaluate C_c^(k) of the input and E_c^(k) of its image under lambda_u.

    Mixed inputs run both roofs and hand each the other's certificate, since
    decompositions of the input and of the image correspond one to one.
    """
    if isinstance(state, DensityMatrix) and state.rank() == 1:
        state = PureState(np.linalg.eigh(state.entries)[1][:, -1])
    d = state.dim
    if not 2 <= k <= d:
        raise ParameterError(f"k must lie in [2, {d}], got {k}")
    out = lambda_u(state)
    if isinstance(state, PureState):
        c = coherence_k_concurrence_pure(state, k)
        e = ent_k_concurrence_schmidt(out, k)
        delta = abs(c - e)
        if delta >= PURE_TOL:
            raise InvariantError(f"pure conversion identity off by {delta:.3g}")
        return ConversionResult(out, c, e, delta)

    c_est = coherence_k_concurrence_mixed(state, k, **opts)
    e_est = ent_k_concurrence_mixed(out, k, warm_starts=[image_decomposition(c_est.certificate)], **opts)
    if e_est.value < c_est.value:
        # one pass from the two certificates; the search cannot end above either
        again = dict(opts, restarts=1)
        c_est = coherence_k_concurrence_mixed(
            state, k, warm_starts=[c_est.certificate, preimage_decomposition(e_est.certificate, d)], **again)
    return ConversionResult(out, c_est.value, e_est.value, abs(c_est.value - e_est.value), c_est, e_est)
