"""Convex-roof extension of pure-state monotones.

A decomposition of rho with m members is an m x r isometry V acting on the
spectral rows: sqrt(p_a)|psi_a> = sum_i V_ai sqrt(lambda_i)|e_i>. The search
moves V by exponentials of single anti-Hermitian generators (Givens
rotations of two ensemble rows), which keeps the ensemble an exact
decomposition of rho at every step. The result is therefore always an upper
bound on the true roof.

The k-th root in the coherence objective has a kink wherever a member loses
coherence rank, and plain sweeps stall just short of it. The best restart is
finished by Newton steps on the unitary group that drive the d-k+1 smallest
entries of every member to exactly zero; the step is kept only if it
converges and lowers the objective.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import kernels
from .errors import DimensionError, ParameterError
from .monotones import (COHERENCE_K, ENTANGLEMENT_K, L1, QI, MonotoneId,
                        coherence_k_concurrence_pure, coherence_rank, evaluate_pure)
from .rng import complex_normal, polar_isometry, stream
from .states import RECON_TOL, DensityMatrix, Decomposition, PureState, eig_decompose

log = logging.getLogger(__name__)

INITIAL_STEP = np.pi / 4
STALL = 1e-12
SMOOTH_TOL = 1e-8
SWEEPS_PER_STEP = 5
ISOMETRY_TOL = 1e-10
NEWTON_ITERS = 30
NEWTON_TOL = 1e-15
NEWTON_CONTRACTION = 0.5
DROP = 1e-14


class _Objective:
    """Kernel parameters for one monotone on a given dimension."""

    def __init__(self, monotone: MonotoneId, dim: int):
        self.monotone = monotone
        self.dim = dim
        self.dloc = dim
        self.subsets = np.zeros((1, 1), dtype=np.int32)
        fam, k = monotone.family, monotone.k
        if fam == COHERENCE_K:
            if not 2 <= k <= dim:
                raise ParameterError(f"k must lie in [2, {dim}] for a {dim}-dimensional state, got {k}")
            self.kind, self.k = kernels.KIND_COHERENCE, k
            self.scale = dim * comb(dim, k) ** (-1.0 / k)
        elif fam == QI:
            self.kind, self.k, self.scale = kernels.KIND_QI, 1, 1.0
        elif fam == ENTANGLEMENT_K:
            d = int(round(np.sqrt(dim)))
            if d * d != dim:
                raise DimensionError(f"entanglement objective needs a d*d system, got dimension {dim}")
            if not 2 <= k <= d:
                raise ParameterError(f"k must lie in [2, {d}] for local dimension {d}, got {k}")
            self.kind, self.k, self.dloc = kernels.KIND_ENTANGLEMENT, k, d
            self.scale = d * comb(d, k) ** (-1.0 / k)
            self.subsets = np.array(list(combinations(range(d), k)), dtype=np.int32)
        elif fam == L1:
            raise ParameterError("l1_coherence is convex already; evaluate it in closed form")
        else:
            raise ParameterError(f"no roof objective for {fam}")

    def row_values(self, W: np.ndarray, power: float = 0.0) -> np.ndarray:
        return kernels.impl.row_values(W, self.kind, self.k, self.dloc, self.scale,
                                       self.subsets, power)

    def sweep(self, W, vals, step, power: float = 0.0):
        return kernels.impl.sweep(W, vals, self.kind, self.k, self.dloc, self.scale,
                                  self.subsets, step, True, power)

    def stages(self, tol: float):
        """(power, tolerance, step) schedule of the continuation.

        The k-th root pins rows to zeros (infinite slope there), which traps
        pairwise moves; the search first runs on the smoother surrogates
        power = 1 and the midpoint before switching to the true objective.
        """
        if self.kind == kernels.KIND_QI:
            return [(0.0, tol, INITIAL_STEP)]
        mid = 0.5 * (1.0 + 1.0 / self.k)
        return [(1.0, SMOOTH_TOL, INITIAL_STEP), (mid, SMOOTH_TOL, INITIAL_STEP), (0.0, tol, INITIAL_STEP)]

    def pure(self, psi) -> float:
        return evaluate_pure(self.monotone, psi)

    def decomposition_value(self, dec: Decomposition) -> float:
        return float(sum(p * self.pure(PureState(s)) for p, s in zip(dec.weights, dec.states)))


@dataclass(frozen=True)
class RoofProblem:
    target: DensityMatrix
    objective: MonotoneId
    ensemble_size: Optional[int] = None
    restarts: int = 16
    seed: int = 0
    tol: float = 1e-6
    max_iters: int = 500
    workers: int = 1

    def __post_init__(self):
        if self.restarts < 1:
            raise ParameterError("restarts must be >= 1")
        if not self.tol > 0:
            raise ParameterError("tol must be positive")
        if self.ensemble_size is not None and self.ensemble_size < self.target.rank():
            raise ParameterError("ensemble size must be at least rank(target)")


@dataclass(frozen=True)
class MonotoneEstimate:
    value: float
    certificate: Decomposition
    iterations: int
    restart_values: List[float]
    converged: bool
    monotone: Optional[MonotoneId] = None

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "measure": None if self.monotone is None else self.monotone.family,
            "k": None if self.monotone is None else self.monotone.k,
            "iterations": self.iterations,
            "converged": self.converged,
            "restart_values": list(self.restart_values),
            "certificate": {
                "weights": self.certificate.weights.tolist(),
                "states": [[[z.real, z.imag] for z in row] for row in self.certificate.states],
            },
        }


def decomposition_from_isometry(eig: Decomposition, V) -> Decomposition:
    V = np.asarray(V, dtype=complex)
    r = len(eig)
    if V.ndim != 2 or V.shape[1] != r or V.shape[0] < r:
        raise ParameterError(f"isometry must be m x {r} with m >= {r}")
    defect = float(np.max(np.abs(V.conj().T @ V - np.eye(r))))
    if defect > ISOMETRY_TOL:
        raise ParameterError(f"V is not an isometry (defect {defect:.3g})")
    return Decomposition.from_rows(V @ eig.rows(), drop=DROP)


def _descend(W, obj, power, tol, max_iters, step=INITIAL_STEP):
    vals = obj.row_values(W, power)
    return kernels.impl.descend(W, vals, obj.kind, obj.k, obj.dloc, obj.scale, obj.subsets, power,
                                step, tol, max_iters, SWEEPS_PER_STEP, STALL)


def _local_search(W: np.ndarray, obj: _Objective, tol: float, max_iters: int):
    W = np.ascontiguousarray(W, dtype=complex).copy()
    start = float(obj.row_values(W).sum())
    start_W = W.copy()
    sweeps = 0
    converged = False
    for power, stage_tol, step in obj.stages(tol):
        n, converged = _descend(W, obj, power, stage_tol, max_iters, step)
        sweeps += n
    value = float(obj.row_values(W).sum())
    if value > start:
        # surrogate stages are not monotone in the true objective
        return start_W, start, sweeps, converged
    return W, value, sweeps, converged


def _unitary_exp(h: np.ndarray) -> np.ndarray:
    """exp(h) for anti-Hermitian h, unitary to rounding."""
    lam, u = np.linalg.eigh(1j * h)
    return (u * np.exp(-1j * lam)) @ u.conj().T


def _complete_pattern(W: np.ndarray, n_zero: int) -> Tuple[np.ndarray, bool]:
    """Newton iteration that zeroes each member's ``n_zero`` smallest entries.

    Rows move by W <- exp(H) W with H anti-Hermitian, so every iterate is an
    exact decomposition. The step is the least-norm solution of the
    linearized pattern equations (exp(H) W)[a, i] = 0, with H written as
    (X - X^T) + 1j (Y + Y^T) over unconstrained real X, Y.
    """
    m = W.shape[0]
    rows_idx = np.repeat(np.arange(m), n_zero)
    prev = np.inf
    for _ in range(NEWTON_ITERS):
        cols = np.argsort(np.abs(W), axis=1)[:, :n_zero].ravel()
        res = W[rows_idx, cols]
        norm = float(np.linalg.norm(res))
        if norm < NEWTON_TOL:
            return W, True
        if norm > NEWTON_CONTRACTION * prev:
            return W, False
        prev = norm
        neq = res.shape[0]
        e = np.arange(neq)
        wcol = W[:, cols].T  # wcol[e, b] = W[b, i_e]
        jx = np.zeros((neq, m, m), dtype=complex)
        jy = np.zeros((neq, m, m), dtype=complex)
        jx[e, rows_idx, :] += wcol
        jx[e, :, rows_idx] -= wcol
        jy[e, rows_idx, :] += 1j * wcol
        jy[e, :, rows_idx] += 1j * wcol
        jac = np.concatenate([jx.reshape(neq, -1), jy.reshape(neq, -1)], axis=1)
        step = np.linalg.lstsq(np.vstack([jac.real, jac.imag]),
                               -np.concatenate([res.real, res.imag]), rcond=None)[0]
        x, y = step[:m * m].reshape(m, m), step[m * m:].reshape(m, m)
        W = _unitary_exp((x - x.T) + 1j * (y + y.T)) @ W
    return W, False


def _start_points(problem: RoofProblem, eig: Decomposition, m: int) -> List[np.ndarray]:
    rows = eig.rows()
    r = rows.shape[0]
    basis = eig.states.T
    starts = [np.vstack([rows, np.zeros((m - r, rows.shape[1]), dtype=complex)])]
    for j in range(1, problem.restarts):
        rng = stream(problem.seed, "roof-restart", j)
        # polar factor of G @ basis is Haar and does not depend on which
        # orthonormal basis spans a degenerate eigenspace
        V = polar_isometry(complex_normal(rng, (m, eig.dim)) @ basis)
        starts.append(V @ rows)
    return starts


def minimize_roof(problem: RoofProblem, warm_starts: Optional[Sequence[Decomposition]] = None) -> MonotoneEstimate:
    rho = problem.target
    obj = _Objective(problem.objective, rho.dim)
    eig = eig_decompose(rho)
    if len(eig) == 1:
        psi = PureState(eig.states[0])
        value = obj.pure(psi)
        return MonotoneEstimate(value, Decomposition.single(psi), 0, [value], True, problem.objective)

    m = problem.ensemble_size or len(eig) ** 2
    starts = _start_points(problem, eig, m)
    for w in warm_starts or ():
        if w.dim != rho.dim:
            raise DimensionError("warm start dimension does not match the target")
        defect = w.reconstruction_defect(rho)
        if defect > RECON_TOL:
            raise ParameterError(f"warm start does not reconstruct the target (defect {defect:.3g})")
        starts.append(w.rows())

    def run(W):
        return _local_search(W, obj, problem.tol, problem.max_iters)

    if problem.workers > 1:
        with ThreadPoolExecutor(problem.workers) as pool:
            results = list(pool.map(run, starts))
    else:
        results = [run(W) for W in starts]

    values = [res[1] for res in results]
    best = int(np.argmin(values))  # first minimum wins ties
    W, value, _, converged = results[best]
    sweeps = sum(r[2] for r in results)
    if obj.kind == kernels.KIND_COHERENCE and value > 0.0:
        # k-th root kinks stall the sweeps just short of an exact zero
        completed, ok = _complete_pattern(W, rho.dim - obj.k + 1)
        if ok:
            cv = float(obj.row_values(np.ascontiguousarray(completed)).sum())
            if cv < value:
                W = completed
    cert = Decomposition.from_rows(W, drop=DROP)
    value = obj.decomposition_value(cert)
    log.debug("roof %s: best run %d of %d, value %.3e", problem.objective, best, len(starts), value)
    return MonotoneEstimate(value, cert, sweeps, values, converged,
                            problem.objective)


def coherence_k_concurrence_mixed(rho: DensityMatrix, k: int, warm_starts=None, **opts) -> MonotoneEstimate:
    return minimize_roof(RoofProblem(rho, MonotoneId(COHERENCE_K, k), **opts), warm_starts)


def qi_concurrence_mixed(rho: DensityMatrix, warm_starts=None, **opts) -> MonotoneEstimate:
    return minimize_roof(RoofProblem(rho, MonotoneId(QI), **opts), warm_starts)


def ent_k_concurrence_mixed(rho: DensityMatrix, k: int, warm_starts=None, **opts) -> MonotoneEstimate:
    """Roof of the entanglement k-concurrence for a d*d-dimensional state."""
    return minimize_roof(RoofProblem(rho, MonotoneId(ENTANGLEMENT_K, k), **opts), warm_starts)


@dataclass(frozen=True)
class CoherenceNumberEstimate:
    rank: int
    values: Dict[int, float]
    certificates: Dict[int, Decomposition] = field(repr=False, default_factory=dict)
    threshold: float = 1e-4
    # estimates above threshold only suggest r_C >= k; below threshold they certify
    evidence_only: bool = True

    def to_dict(self) -> dict:
        return {
            "coherence_number": self.rank,
            "threshold": self.threshold,
            "values": {str(k): v for k, v in sorted(self.values.items())},
            "evidence_only": self.evidence_only,
        }


def coherence_number_estimate(rho, threshold: float = 1e-4, warm_starts=None, **opts) -> CoherenceNumberEstimate:
    """Largest k whose C_c^(k) roof estimate exceeds ``threshold``.

    Orders are scanned upward, each warm-started from the previous
    certificate. Once an estimate falls below the threshold its certificate
    also bounds every higher order, so those are filled in from it.
    """
    if isinstance(rho, PureState):
        rho = rho.density()
    d = rho.dim
    eig = eig_decompose(rho)
    if len(eig) == 1:
        psi = PureState(eig.states[0])
        vals = {k: coherence_k_concurrence_pure(psi, k) for k in range(2, d + 1)}
        return CoherenceNumberEstimate(coherence_rank(psi), vals, {}, threshold, False)

    values: Dict[int, float] = {}
    certs: Dict[int, Decomposition] = {}
    seeds = list(warm_starts or ())
    for k in range(2, d + 1):
        est = coherence_k_concurrence_mixed(rho, k, warm_starts=seeds, **opts)
        values[k], certs[k] = est.value, est.certificate
        if est.value <= threshold:
            obj_hi = {kk: _Objective(MonotoneId(COHERENCE_K, kk), d) for kk in range(k + 1, d + 1)}
            for kk, o in obj_hi.items():
                values[kk] = o.decomposition_value(est.certificate)
                certs[kk] = est.certificate
            break
        seeds = list(warm_starts or ()) + [est.certificate]
    above = [k for k, v in values.items() if v > threshold]
    rank = max(above) if above else 1
    return CoherenceNumberEstimate(rank, values, certs, threshold, rank > 1)
