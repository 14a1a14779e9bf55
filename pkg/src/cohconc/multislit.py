"""Quanton-detector model for multi-slit which-path experiments.

Detector states are |i>_D = phi_i |phi_i> + sum_a sqrt(p_a) q_a^i |a> with the
|phi_i> orthogonal to each other and to every |a>. Only these inner-product
data enter the reduced quanton state, so the detector space is never built.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .errors import InvariantError, ParameterError
from .io import complex_pairs, from_pairs, load_json
from .monotones import l1_coherence
from .rng import complex_normal
from .roof import CoherenceNumberEstimate, coherence_k_concurrence_mixed, coherence_number_estimate
from .states import DensityMatrix, Decomposition

NORM_TOL = 1e-10
DROP = 1e-14
CHAIN_TOL = 1e-8
SWEEP_HEADER = ("param", "dq", "l1_bound", "bound1", "bound2", "slits")


def _ro(a, dtype=complex) -> np.ndarray:
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class DetectorModel:
    phi: np.ndarray
    p: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        phi = np.atleast_1d(np.asarray(self.phi, dtype=complex))
        p = np.atleast_1d(np.asarray(self.p, dtype=float))
        q = np.asarray(self.q, dtype=complex)
        if q.ndim == 1:
            q = q[None, :]
        if phi.ndim != 1 or phi.shape[0] < 2:
            raise ParameterError("phi must list one success amplitude per slit (at least 2)")
        if q.shape != (p.shape[0], phi.shape[0]):
            raise ParameterError(f"q must be {p.shape[0]} x {phi.shape[0]}, got {q.shape}")
        if np.any(p < 0) or abs(p.sum() - 1.0) > NORM_TOL:
            raise ParameterError("failure weights p must be nonnegative and sum to 1")
        norms = np.abs(phi) ** 2 + p @ (np.abs(q) ** 2)
        bad = np.abs(norms - 1.0)
        if bad.max() > NORM_TOL:
            i = int(np.argmax(bad))
            raise ParameterError(f"detector state {i} has norm^2 {norms[i]:.12g}")
        object.__setattr__(self, "phi", _ro(phi))
        object.__setattr__(self, "p", _ro(p, float))
        object.__setattr__(self, "q", _ro(q))

    @classmethod
    def build(cls, phi, p, raw_q) -> "DetectorModel":
        """Rescale each slit's column of ``raw_q`` so the detector states are normalized."""
        phi = np.atleast_1d(np.asarray(phi, dtype=complex))
        p = np.atleast_1d(np.asarray(p, dtype=float))
        p = p / p.sum()
        q = np.array(raw_q, dtype=complex)
        if q.ndim == 1:
            q = q[None, :]
        if np.any(np.abs(phi) > 1.0 + NORM_TOL):
            raise ParameterError("success amplitudes must satisfy |phi_i| <= 1")
        need = np.clip(1.0 - np.abs(phi) ** 2, 0.0, None)
        have = p @ (np.abs(q) ** 2)
        for i in range(phi.shape[0]):
            if need[i] <= NORM_TOL:
                q[:, i] = 0.0
            elif have[i] == 0.0:
                raise ParameterError(f"slit {i}: |phi| < 1 but the failure column is zero")
            else:
                q[:, i] *= np.sqrt(need[i] / have[i])
        return cls(phi, p, q)

    @classmethod
    def orthogonal(cls, d: int) -> "DetectorModel":
        return cls(np.ones(d), [1.0], np.zeros((1, d)))

    @classmethod
    def identical(cls, d: int) -> "DetectorModel":
        return cls(np.zeros(d), [1.0], np.ones((1, d)))

    @classmethod
    def symmetric(cls, d: int, overlap: float) -> "DetectorModel":
        """All pairwise detector overlaps equal ``overlap``, single failure direction."""
        if not 0.0 <= overlap <= 1.0:
            raise ParameterError("overlap must lie in [0, 1]")
        return cls(np.full(d, np.sqrt(1.0 - overlap)), [1.0], np.full((1, d), np.sqrt(overlap)))

    @property
    def d(self) -> int:
        return self.phi.shape[0]

    def gram(self) -> np.ndarray:
        """<j_D|i_D> as entry [i, j]."""
        g = (self.q.T * self.p) @ self.q.conj()
        return g + np.diag(np.abs(self.phi) ** 2)


@dataclass(frozen=True)
class QuantonSpec:
    c: Optional[np.ndarray] = None
    lam: Optional[np.ndarray] = None
    chi: Optional[np.ndarray] = None

    def __post_init__(self):
        if (self.c is None) == (self.lam is None):
            raise ParameterError("give either pure amplitudes c or mixing weights lam with rows chi")
        if self.c is not None:
            c = np.asarray(self.c, dtype=complex)
            if c.ndim != 1 or abs(np.vdot(c, c).real - 1.0) > NORM_TOL:
                raise ParameterError("quanton amplitudes c must be a normalized vector")
            object.__setattr__(self, "c", _ro(c))
            return
        if self.chi is None:
            raise ParameterError("mixed quanton needs chi")
        lam = np.atleast_1d(np.asarray(self.lam, dtype=float))
        chi = np.asarray(self.chi, dtype=complex)
        if chi.ndim == 1:
            chi = chi[None, :]
        if chi.shape[0] != lam.shape[0]:
            raise ParameterError("chi needs one row per mixing weight")
        if np.any(lam < 0) or abs(lam.sum() - 1.0) > NORM_TOL:
            raise ParameterError("mixing weights must be nonnegative and sum to 1")
        if np.max(np.abs(np.sum(np.abs(chi) ** 2, axis=1) - 1.0)) > NORM_TOL:
            raise ParameterError("each chi row must be normalized")
        object.__setattr__(self, "lam", _ro(lam, float))
        object.__setattr__(self, "chi", _ro(chi))

    @property
    def d(self) -> int:
        return (self.c if self.c is not None else self.chi).shape[-1]

    def components(self) -> Tuple[np.ndarray, np.ndarray]:
        """(weights, amplitude rows), a pure quanton being one row of weight 1."""
        if self.c is not None:
            return np.ones(1), self.c[None, :]
        return np.asarray(self.lam), np.asarray(self.chi)

    @property
    def populations(self) -> np.ndarray:
        w, rows = self.components()
        return w @ (np.abs(rows) ** 2)


def _check(quanton: QuantonSpec, detector: DetectorModel):
    if quanton.d != detector.d:
        raise ParameterError(f"quanton has {quanton.d} slits, detector {detector.d}")


def reduced_state(quanton: QuantonSpec, detector: DetectorModel) -> Tuple[DensityMatrix, Decomposition]:
    """Quanton state after tracing out the detector, and the ensemble it is built from.

    The ensemble holds basis states for the successful branches and one
    member per (failure direction, mixing component).
    """
    _check(quanton, detector)
    d = detector.d
    w, rows = quanton.components()
    succ = w @ (np.abs(rows * detector.phi) ** 2)
    members = [np.sqrt(succ[i]) * np.eye(d)[i] for i in range(d)]
    for a, pa in enumerate(detector.p):
        for x, lx in enumerate(w):
            members.append(np.sqrt(pa * lx) * rows[x] * detector.q[a])
    r = np.array(members, dtype=complex)
    r = r[np.sum(np.abs(r) ** 2, axis=1) >= DROP]
    m = r.T @ r.conj()
    rho = DensityMatrix(m / np.trace(m).real)
    return rho, Decomposition.from_rows(r, drop=DROP)


def _pair_sum(x: np.ndarray) -> float:
    # sum over i != j of x_i x_j
    return float(x.sum() ** 2 - np.sum(x * x))


@dataclass(frozen=True)
class ChainBounds:
    bound1: float
    bound2: float
    roof: float
    certificate: Decomposition = field(repr=False)

    def as_tuple(self) -> Tuple[float, float, float]:
        return self.bound1, self.bound2, self.roof


def failure_chain(quanton: QuantonSpec, detector: DetectorModel, **opts) -> ChainBounds:
    """Lower bounds on the UQSD failure probability, loosest first.

    bound2 is the C_c^(2) value of the induced ensemble and seeds the roof
    search, so the last link holds by construction.
    """
    _check(quanton, detector)
    d = detector.d
    f = d / (d - 1)
    w, rows = quanton.components()
    pops = quanton.populations
    aq = np.abs(detector.q) ** 2
    if quanton.c is not None:
        qi = detector.p @ aq
        bound1 = np.sqrt(f * _pair_sum(pops * qi))
    else:
        bound1 = sum(pa * np.sqrt(f * _pair_sum(pops * aq[a])) for a, pa in enumerate(detector.p))
    bound2 = 0.0
    for a, pa in enumerate(detector.p):
        for x, lx in enumerate(w):
            bound2 += pa * lx * np.sqrt(f * _pair_sum(np.abs(rows[x]) ** 2 * aq[a]))
    rho, dec = reduced_state(quanton, detector)
    est = coherence_k_concurrence_mixed(rho, 2, warm_starts=[dec], **opts)
    out = ChainBounds(float(bound1), float(bound2), est.value, est.certificate)
    if not (out.bound1 >= out.bound2 - CHAIN_TOL and out.bound2 >= out.roof - CHAIN_TOL):
        raise InvariantError(f"failure chain not monotone: {out.as_tuple()}")
    return out


@dataclass(frozen=True)
class DistinguishabilityReport:
    rho_s: DensityMatrix
    d_q: float
    q_lower_bounds: Tuple[float, float, float]
    l1_bound: float
    slit_count: int
    coherence: Optional[CoherenceNumberEstimate] = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {
            "d_q": self.d_q,
            "l1_bound": self.l1_bound,
            "q_lower_bounds": list(self.q_lower_bounds),
            "slit_count": self.slit_count,
            "slit_count_evidence_only": True if self.coherence is None else self.coherence.evidence_only,
            "rho_s": complex_pairs(self.rho_s.entries),
        }


def distinguishable_slit_count(rho_s: DensityMatrix, epsilon: float = 1e-4, warm_starts=None, **opts) -> int:
    """d minus the estimated coherence number of ``rho_s``."""
    return rho_s.dim - coherence_number_estimate(rho_s, epsilon, warm_starts=warm_starts, **opts).rank


def distinguishability(quanton: QuantonSpec, detector: DetectorModel, epsilon: float = 1e-4,
                       **opts) -> DistinguishabilityReport:
    chain = failure_chain(quanton, detector, **opts)
    rho, dec = reduced_state(quanton, detector)
    d = rho.dim
    d_q = min(max(1.0 - chain.roof, 0.0), 1.0)
    l1_bound = 1.0 - l1_coherence(rho) / (d - 1)
    if d_q > l1_bound + CHAIN_TOL:
        raise InvariantError(f"D_Q {d_q:.12g} exceeds the l1 bound {l1_bound:.12g}")
    cn = coherence_number_estimate(rho, epsilon, warm_starts=[dec, chain.certificate], **opts)
    return DistinguishabilityReport(rho, d_q, chain.as_tuple(), l1_bound, d - cn.rank, cn)


def _parse_vector(v) -> np.ndarray:
    arr = np.asarray(v, dtype=float) if not _has_pairs(v) else None
    if arr is not None:
        return arr.astype(complex)
    return from_pairs(v)


def _has_pairs(v) -> bool:
    return len(v) > 0 and isinstance(v[0], (list, tuple))


def _parse_matrix(v) -> np.ndarray:
    return np.array([_parse_vector(row) for row in v])


def config_from_dict(obj: dict) -> Tuple[QuantonSpec, DetectorModel]:
    """Parse the multislit config; numbers may be plain reals or [re, im] pairs."""
    try:
        d = int(obj["slits"])
        phi = _parse_vector(obj["phi"])
        p = np.asarray(obj["p"], dtype=float)
        q = _parse_matrix(obj["q"])
        if "lambda" in obj:
            quanton = QuantonSpec(lam=np.asarray(obj["lambda"], dtype=float), chi=_parse_matrix(obj["chi"]))
        else:
            quanton = QuantonSpec(c=_parse_vector(obj["c"]))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ParameterError):
            raise
        raise ParameterError(f"bad multislit config: {exc}") from None
    detector = DetectorModel(phi, p, q)
    if quanton.d != d or detector.d != d:
        raise ParameterError(f"config declares {d} slits but amplitudes disagree")
    return quanton, detector


def config_to_dict(quanton: QuantonSpec, detector: DetectorModel) -> dict:
    out = {"slits": detector.d}
    if quanton.c is not None:
        out["c"] = complex_pairs(quanton.c)
    else:
        out["lambda"] = [float(x) for x in quanton.lam]
        out["chi"] = [complex_pairs(r) for r in quanton.chi]
    out["phi"] = complex_pairs(detector.phi)
    out["p"] = [float(x) for x in detector.p]
    out["q"] = [complex_pairs(r) for r in detector.q]
    return out


def load_config(path) -> Tuple[QuantonSpec, DetectorModel]:
    obj = load_json(path)
    if not isinstance(obj, dict):
        raise ParameterError(f"{path}: expected a JSON object")
    return config_from_dict(obj)


def random_config(d: int, n_fail: int, rng: np.random.Generator, mixed: bool = False
                  ) -> Tuple[QuantonSpec, DetectorModel]:
    phi = rng.uniform(0.0, 1.0, d) * np.exp(2j * np.pi * rng.uniform(size=d))
    p = rng.dirichlet(np.ones(n_fail))
    detector = DetectorModel.build(phi, p, complex_normal(rng, (n_fail, d)))
    if mixed:
        n_mix = int(rng.integers(1, 4))
        chi = complex_normal(rng, (n_mix, d))
        chi /= np.linalg.norm(chi, axis=1, keepdims=True)
        return QuantonSpec(lam=rng.dirichlet(np.ones(n_mix)), chi=chi), detector
    c = complex_normal(rng, d)
    return QuantonSpec(c=c / np.linalg.norm(c)), detector


SWEEP_PARAMS = ("overlap",)


def sweep_rows(quanton: QuantonSpec, detector: DetectorModel, param: str, lo: float, hi: float,
               steps: int, **opts) -> List[tuple]:
    """Rows of the sweep CSV.

    ``overlap`` replaces the detector by the symmetric model with that
    pairwise overlap; ``phi<i>`` scales the success amplitude of slit i to the
    given modulus and rescales its failure column to stay normalized.
    """
    if steps < 1:
        raise ParameterError("steps must be >= 1")
    grid = np.linspace(lo, hi, steps) if steps > 1 else np.array([lo])
    rows = []
    for t in grid:
        det = _swept_detector(detector, param, float(t))
        rep = distinguishability(quanton, det, **opts)
        rows.append((float(t), rep.d_q, rep.l1_bound, rep.q_lower_bounds[0], rep.q_lower_bounds[1],
                     rep.slit_count))
    return rows


def _swept_detector(detector: DetectorModel, param: str, t: float) -> DetectorModel:
    if param == "overlap":
        return DetectorModel.symmetric(detector.d, t)
    if param.startswith("phi") and param[3:].isdigit():
        i = int(param[3:])
        if not 0 <= i < detector.d:
            raise ParameterError(f"no slit {i}")
        if not 0.0 <= t <= 1.0:
            raise ParameterError("phi modulus must lie in [0, 1]")
        phi = np.array(detector.phi)
        phase = phi[i] / abs(phi[i]) if abs(phi[i]) > 0 else 1.0
        phi[i] = t * phase
        q = np.array(detector.q)
        if t < 1.0 and not np.any(q[:, i]):
            q[:, i] = 1.0
        return DetectorModel.build(phi, detector.p, q)
    raise ParameterError(f"unknown sweep parameter {param!r}; use overlap or phi<i>")
