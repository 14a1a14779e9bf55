"""State and operator types, validation, factorizations and seeded sampling.

All amplitudes are expressed in the fixed incoherent basis, indexed from 0.
Arrays held by the dataclasses are marked read-only after construction.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .errors import DimensionError, InvalidStateError, ParameterError
from .rng import complex_normal

NORM_TOL = 1e-12
HERM_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
WEIGHT_SUM_TOL = 1e-10
RECON_TOL = 1e-8
KRAUS_TOL = 1e-10
EIG_DROP = 1e-10


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=complex)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Violation:
    kind: str
    defect: float

    def __str__(self):
        return f"{self.kind} (defect {self.defect:.3g})"


@dataclass(frozen=True)
class PureState:
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _frozen(self.amplitudes)
        if amps.ndim != 1:
            raise DimensionError("pure state amplitudes must be a vector")
        if amps.shape[0] < 2:
            raise DimensionError("dimension must be at least 2")
        defect = abs(float(np.vdot(amps, amps).real) - 1.0)
        if defect > NORM_TOL:
            raise InvalidStateError(
                "amplitudes are not normalized", [Violation("norm", defect)]
            )
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalized(cls, amplitudes) -> "PureState":
        a = np.asarray(amplitudes, dtype=complex)
        n = np.linalg.norm(a)
        if n == 0:
            raise InvalidStateError("zero vector cannot be normalized", [Violation("norm", 1.0)])
        return cls(a / n)

    @classmethod
    def basis(cls, d: int, i: int) -> "PureState":
        a = np.zeros(d, dtype=complex)
        a[i] = 1.0
        return cls(a)

    @classmethod
    def maximally_coherent(cls, d: int) -> "PureState":
        return cls(np.full(d, 1.0 / np.sqrt(d), dtype=complex))

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def density(self) -> "DensityMatrix":
        return DensityMatrix(self.projector())


def validate_state(rho) -> List[Violation]:
    """Return every violated density-matrix invariant; empty means valid."""
    m = np.asarray(rho, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] < 2:
        raise DimensionError("dimension must be at least 2")
    out = []
    herm = float(np.max(np.abs(m - m.conj().T)))
    if herm > HERM_TOL:
        out.append(Violation("hermiticity", herm))
    tr = abs(complex(np.trace(m)) - 1.0)
    if tr > TRACE_TOL:
        out.append(Violation("trace", tr))
    hm = 0.5 * (m + m.conj().T)
    lam_min = float(np.linalg.eigvalsh(hm)[0])
    if lam_min < -PSD_TOL:
        out.append(Violation("positivity", -lam_min))
    return out


@dataclass(frozen=True)
class DensityMatrix:
    entries: np.ndarray

    def __post_init__(self):
        violations = validate_state(self.entries)
        if violations:
            raise InvalidStateError(
                "invalid density matrix: " + ", ".join(map(str, violations)), violations
            )
        m = np.asarray(self.entries, dtype=complex)
        object.__setattr__(self, "entries", _frozen(0.5 * (m + m.conj().T)))

    @classmethod
    def from_pure(cls, psi) -> "DensityMatrix":
        if isinstance(psi, PureState):
            return cls(psi.projector())
        return cls(PureState(psi).projector())

    @classmethod
    def maximally_mixed(cls, d: int) -> "DensityMatrix":
        return cls(np.eye(d, dtype=complex) / d)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def eigvals(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)

    def rank(self, tol: float = EIG_DROP) -> int:
        return int(np.sum(self.eigvals() >= tol))

    def is_incoherent(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.entries - np.diag(np.diag(self.entries)))) <= tol)


@dataclass(frozen=True)
class BipartitePureState:
    """Pure state of a d_A x d_B system stored as its amplitude matrix."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _frozen(self.amplitudes)
        if amps.ndim != 2:
            raise DimensionError("bipartite amplitudes must be a matrix")
        defect = abs(float(np.sum(np.abs(amps) ** 2)) - 1.0)
        if defect > NORM_TOL:
            raise InvalidStateError("amplitudes are not normalized", [Violation("norm", defect)])
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_vector(cls, vec, dims: Tuple[int, int]) -> "BipartitePureState":
        return cls(np.asarray(vec, dtype=complex).reshape(dims))

    @property
    def dims(self) -> Tuple[int, int]:
        return self.amplitudes.shape

    @property
    def vector(self) -> np.ndarray:
        return self.amplitudes.reshape(-1)


@dataclass(frozen=True)
class Decomposition:
    """Ensemble {p_a, |psi_a>}; ``states`` rows are the normalized members."""

    weights: np.ndarray
    states: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        s = np.array(self.states, dtype=complex)
        if s.ndim != 2 or w.ndim != 1 or s.shape[0] != w.shape[0]:
            raise DimensionError("weights and states must have equal length")
        if np.any(w < 0):
            raise InvalidStateError("negative weight", [Violation("weight", float(-w.min()))])
        defect = abs(float(w.sum()) - 1.0)
        if defect > WEIGHT_SUM_TOL:
            raise InvalidStateError("weights do not sum to 1", [Violation("weight_sum", defect)])
        norms = np.abs(np.einsum("ij,ij->i", s.conj(), s).real - 1.0)
        if norms.size and norms.max() > NORM_TOL:
            raise InvalidStateError("member not normalized", [Violation("norm", float(norms.max()))])
        w.setflags(write=False)
        s.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "states", s)

    @classmethod
    def from_rows(cls, rows, drop: float = 1e-14) -> "Decomposition":
        """Build from unnormalized rows sqrt(p_a)|psi_a>."""
        rows = np.asarray(rows, dtype=complex)
        p = np.einsum("ij,ij->i", rows.conj(), rows).real
        keep = p >= drop
        if not np.any(keep):
            raise InvalidStateError("every member has vanishing weight")
        p = p[keep]
        states = rows[keep] / np.sqrt(p)[:, np.newaxis]
        return cls(p, states)

    @classmethod
    def single(cls, psi: PureState) -> "Decomposition":
        return cls(np.array([1.0]), psi.amplitudes[np.newaxis, :])

    def __len__(self):
        return self.weights.shape[0]

    def __iter__(self) -> Iterator[Tuple[float, PureState]]:
        for p, s in zip(self.weights, self.states):
            yield float(p), PureState(s)

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    def rows(self) -> np.ndarray:
        """Unnormalized members sqrt(p_a)|psi_a> stacked as rows."""
        return np.sqrt(self.weights)[:, np.newaxis] * self.states

    def matrix(self) -> np.ndarray:
        r = self.rows()
        return r.T @ r.conj()

    def reconstruction_defect(self, rho) -> float:
        target = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho)
        return float(np.linalg.norm(self.matrix() - target))

    def mix(self, other: "Decomposition", w: float) -> "Decomposition":
        """Weighted union: w*self + (1-w)*other."""
        return Decomposition(
            np.concatenate([w * self.weights, (1.0 - w) * other.weights]),
            np.vstack([self.states, other.states]),
        )


@dataclass(frozen=True)
class KrausSet:
    operators: Tuple[np.ndarray, ...]
    incoherent: bool = False

    def __post_init__(self):
        ops = tuple(_frozen(k) for k in self.operators)
        if not ops:
            raise ParameterError("empty Kraus set")
        d = ops[0].shape[1]
        if any(k.ndim != 2 or k.shape[1] != d for k in ops):
            raise DimensionError("Kraus operators must share the input dimension")
        total = sum(k.conj().T @ k for k in ops)
        defect = float(np.max(np.abs(total - np.eye(d))))
        if defect > KRAUS_TOL:
            raise InvalidStateError("Kraus operators are not trace preserving",
                                    [Violation("completeness", defect)])
        if self.incoherent:
            worst = max(int(np.max(np.sum(np.abs(k) > 0, axis=0))) for k in ops)
            if worst > 1:
                raise InvalidStateError("operator is not incoherent",
                                        [Violation("column_support", float(worst - 1))])
        object.__setattr__(self, "operators", ops)

    def __len__(self):
        return len(self.operators)

    @property
    def dim(self) -> int:
        return self.operators[0].shape[1]

    def apply_selective(self, psi: PureState, drop: float = 1e-12):
        """Outcome probabilities and post-measurement states for a pure input."""
        out = []
        for k in self.operators:
            v = k @ psi.amplitudes
            p = float(np.vdot(v, v).real)
            if p < drop:
                continue
            out.append((p, PureState(v / np.sqrt(p))))
        return out


def eig_decompose(rho: DensityMatrix, threshold: float = EIG_DROP) -> Decomposition:
    """Spectral ensemble of ``rho``; eigenvalues below ``threshold`` are dropped.

    Weights come out in descending order and are rescaled to sum to one, which
    absorbs the clamped negative eigenvalues.
    """
    lam, vecs = np.linalg.eigh(rho.entries)
    order = np.argsort(lam)[::-1]
    lam, vecs = lam[order], vecs[:, order]
    keep = lam >= threshold
    lam = lam[keep]
    return Decomposition(lam / lam.sum(), vecs[:, keep].T)


def schmidt_coefficients(psi: BipartitePureState) -> np.ndarray:
    sv = np.linalg.svd(psi.amplitudes, compute_uv=False)
    lam = np.sort(sv ** 2)[::-1]
    return lam[lam > 0]


def random_pure(d: int, seed: int) -> PureState:
    if d < 2:
        raise ParameterError("d must be >= 2")
    rng = np.random.default_rng(seed)
    return PureState.normalized(complex_normal(rng, d))


def random_mixed(d: int, rank: int, seed: int) -> DensityMatrix:
    if d < 2:
        raise ParameterError("d must be >= 2")
    if not 1 <= rank <= d:
        raise ParameterError(f"rank must lie in [1, {d}], got {rank}")
    rng = np.random.default_rng(seed)
    g = complex_normal(rng, (d, rank))
    m = g @ g.conj().T
    m = 0.5 * (m + m.conj().T)
    return DensityMatrix(m / np.trace(m).real)


def random_bipartite(d_a: int, d_b: int, seed: int) -> BipartitePureState:
    rng = np.random.default_rng(seed)
    g = complex_normal(rng, (d_a, d_b))
    return BipartitePureState(g / np.linalg.norm(g))


def random_incoherent_kraus(d: int, n_ops: int, seed: int, max_group: int = 1) -> KrausSet:
    """Random incoherent Kraus set.

    With ``max_group=1`` each column's weight is split across the operators by
    a random distribution and each operator routes columns through its own
    random permutation. Larger ``max_group`` lets an operator send several
    columns to one output row; the columns of such a group then carry an
    ``n_ops x |group|`` isometry, which keeps the set complete while producing
    operators that are incoherent but not strictly incoherent.
    """
    if d < 2 or n_ops < 1:
        raise ParameterError("need d >= 2 and n_ops >= 1")
    rng = np.random.default_rng(seed)
    cols = rng.permutation(d)
    groups = []
    pos = 0
    while pos < d:
        size = int(rng.integers(1, min(max_group, n_ops, d - pos) + 1))
        groups.append(cols[pos:pos + size])
        pos += size
    ops = [np.zeros((d, d), dtype=complex) for _ in range(n_ops)]
    targets = [rng.permutation(d) for _ in range(n_ops)]
    for gi, group in enumerate(groups):
        if len(group) == 1:
            w = rng.exponential(size=n_ops)
            w /= w.sum()
            coeff = np.sqrt(w) * np.exp(2j * np.pi * rng.random(n_ops))
            block = coeff[:, np.newaxis]
        else:
            g = complex_normal(rng, (n_ops, len(group)))
            q, r = np.linalg.qr(g)
            block = q * (np.diag(r) / np.abs(np.diag(r)))[np.newaxis, :]
        for n in range(n_ops):
            row = targets[n][gi]
            ops[n][row, group] = block[n]
    return KrausSet(tuple(ops), incoherent=True)


def permutation_unitary(perm: Sequence[int], phases: Optional[Sequence[float]] = None) -> np.ndarray:
    """Incoherent unitary |i> -> e^{i theta_i} |perm[i]>."""
    d = len(perm)
    u = np.zeros((d, d), dtype=complex)
    ph = np.zeros(d) if phases is None else np.asarray(phases)
    u[np.asarray(perm), np.arange(d)] = np.exp(1j * ph)
    return u
