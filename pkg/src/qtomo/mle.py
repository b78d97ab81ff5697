"""Maximum-likelihood state estimation by simulated annealing.

States are parameterized by a lower-triangular complex matrix T with
rho = T^H T / Tr(T^H T), so every point of parameter space is a physical
state. The objective is the Gaussian count model

    L(rho) = sum_k (nbar_k - n_k)^2 / (2 max(nbar_k, eps)),   nbar_k = shots_k <psi_k|rho|psi_k>

with the normalization constant dropped.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields

import numpy as np

from . import _kernel
from .errors import ConfigError, DegenerateParams, ValidationError, WrongDimension
from .measure import CountRecord, born_probabilities
from .qcore import DensityMatrix, validate_density


@dataclass(frozen=True, eq=False)
class TParams:
    """Real coordinates of T: the d real diagonal entries, then (re, im) of each
    strict-lower-triangle entry in row-major order."""

    n_qubits: int
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.shape != (4**self.n_qubits,):
            raise ValidationError(f"need {4**self.n_qubits} parameters for {self.n_qubits} qubit(s), got {values.shape}")
        object.__setattr__(self, "values", values)

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    def to_matrix(self) -> np.ndarray:
        d = self.dim
        t = np.zeros((d, d), dtype=np.complex128)
        t[np.diag_indices(d)] = self.values[:d]
        rows, cols = np.tril_indices(d, -1)
        t[rows, cols] = self.values[d::2] + 1j * self.values[d + 1 :: 2]
        return t

    @classmethod
    def from_matrix(cls, t: np.ndarray) -> "TParams":
        d = t.shape[0]
        rows, cols = np.tril_indices(d, -1)
        off = t[rows, cols]
        values = np.empty(d * d)
        values[:d] = np.real(np.diag(t))
        values[d::2] = off.real
        values[d + 1 :: 2] = off.imag
        return cls(d.bit_length() - 1, values)

    @classmethod
    def maximally_mixed(cls, n_qubits: int) -> "TParams":
        return cls.from_matrix(np.eye(2**n_qubits, dtype=np.complex128))


def params_to_density(t: TParams) -> DensityMatrix:
    m = t.to_matrix()
    gram = m.conj().T @ m
    tr = np.trace(gram).real
    if tr < 1e-300:
        raise DegenerateParams(f"Tr(T^H T) = {tr:.3e} is too small to normalize")
    rho = gram / tr
    return validate_density(0.5 * (rho + rho.conj().T))


def neg_log_likelihood(rho, record: CountRecord, eps: float = 0.5) -> float:
    if not eps > 0:
        raise ValidationError(f"eps must be positive, got {eps}")
    p = born_probabilities(record.basis_set.bases, rho)
    nbar = record.shots * p
    diff = nbar - record.counts
    return float(np.sum(diff * diff / (2.0 * np.maximum(nbar, eps))))


def propose(t: TParams, scale: float, rng: np.random.Generator) -> TParams:
    """Perturb one uniformly chosen coordinate by N(0, scale^2)."""
    if not scale > 0:
        raise ValidationError(f"scale must be positive, got {scale}")
    values = t.values.copy()
    c = rng.integers(values.size)
    values[c] += rng.normal(0.0, scale)
    return TParams(t.n_qubits, values)


def accept_probability(L_new: float, L_old: float, k: float, T: float) -> float:
    if not (k > 0 and T > 0):
        raise ValidationError(f"k and T must be positive, got k={k}, T={T}")
    delta = L_new - L_old
    if delta <= 0:
        return 1.0
    return math.exp(-delta / (k * T))


@dataclass(frozen=True)
class AnnealConfig:
    initial_temperature: float = 1.0
    cooling_factor: float = 0.95
    sweeps_per_temperature: int = 20
    proposal_scale: float = 0.1
    boltzmann_k: float = 1.0
    stall_window: int = 10
    stall_tolerance: float = 1e-6
    max_temperature_steps: int = 400
    likelihood_epsilon: float = 0.5
    # per-temperature acceptance rates outside [adapt_threshold, widen_threshold]
    # halve / double the proposal scale; widen_threshold = 1 disables doubling
    adapt_threshold: float = 0.1
    widen_threshold: float = 0.5

    def __post_init__(self):
        positive = ("initial_temperature", "proposal_scale", "boltzmann_k", "stall_tolerance", "likelihood_epsilon")
        for name in positive:
            if not getattr(self, name) > 0:
                raise ConfigError(f"anneal.{name} must be > 0, got {getattr(self, name)}")
        if not 0 < self.cooling_factor < 1:
            raise ConfigError(f"anneal.cooling_factor must be in (0, 1), got {self.cooling_factor}")
        for name in ("sweeps_per_temperature", "stall_window", "max_temperature_steps"):
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v or v < 1:
                raise ConfigError(f"anneal.{name} must be an integer >= 1, got {v}")
        if not 0 <= self.adapt_threshold < self.widen_threshold <= 1:
            raise ConfigError("anneal thresholds must satisfy 0 <= adapt_threshold < widen_threshold <= 1, "
                              f"got {self.adapt_threshold}, {self.widen_threshold}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict | None) -> "AnnealConfig":
        d = dict(d or {})
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown anneal settings: {sorted(unknown)}")
        return cls(**d)


@dataclass(frozen=True)
class EstimateReport:
    estimate: DensityMatrix
    final_neg_log_likelihood: float
    temperature_steps_used: int
    accepted_moves: int
    proposed_moves: int

    def summary(self) -> dict:
        return {
            "final_neg_log_likelihood": self.final_neg_log_likelihood,
            "temperature_steps_used": self.temperature_steps_used,
            "accepted_moves": self.accepted_moves,
            "proposed_moves": self.proposed_moves,
        }


def _sync(t, psi, shots, counts, eps):
    y = psi @ t.T
    nrm = np.sum(np.abs(y) ** 2, axis=1)
    fro = float(np.sum(np.abs(t) ** 2))
    return y, nrm, fro, _kernel.nll_from_norms(nrm, fro, shots, counts, eps)


def anneal(record: CountRecord, config: AnnealConfig | None = None,
           rng: np.random.Generator | None = None) -> EstimateReport:
    """Minimize the negative log-likelihood of ``record`` by simulated annealing.

    Starts at I/d and cools geometrically. Every temperature level runs
    ``sweeps_per_temperature * 4**n`` single-coordinate proposals; the step
    size halves whenever fewer than ``adapt_threshold`` of them are accepted
    and doubles when more than ``widen_threshold`` are. Stops once the best
    value found has improved by no more than ``stall_tolerance`` (relative)
    over ``stall_window`` levels, or after ``max_temperature_steps`` levels.
    The stall test is only armed once the chain is cold. Returns the best
    state ever visited.
    """
    config = config or AnnealConfig()
    rng = rng if rng is not None else np.random.default_rng()
    n = record.n_qubits
    n_params = 4**n
    psi = np.ascontiguousarray(record.basis_set.bases, dtype=np.complex128)
    shots = record.shots.astype(np.float64)
    counts = record.counts.astype(np.float64)
    eps = float(config.likelihood_epsilon)

    t = TParams.maximally_mixed(n).to_matrix()
    y, nrm, fro, current = _sync(t, psi, shots, counts, eps)
    best_t = t.copy()
    best = current
    history = [best]

    temperature = float(config.initial_temperature)
    scale = float(config.proposal_scale)
    n_moves = int(config.sweeps_per_temperature) * n_params
    accepted_total = proposed_total = steps_used = 0
    for _ in range(int(config.max_temperature_steps)):
        coords = rng.integers(0, n_params, n_moves)
        steps = rng.standard_normal(n_moves) * scale
        uniforms = rng.random(n_moves)
        kT = config.boltzmann_k * temperature
        fro, current, best, accepted, _degenerate = _kernel.anneal_temperature_step(
            t, y, nrm, fro, current, best_t, best, psi, shots, counts, eps, coords, steps, uniforms, kT
        )
        # re-derive cached quantities so rounding drift never accumulates across levels
        y, nrm, fro, current = _sync(t, psi, shots, counts, eps)
        accepted_total += accepted
        proposed_total += n_moves
        steps_used += 1
        if accepted < config.adapt_threshold * n_moves:
            scale *= 0.5
        elif accepted > config.widen_threshold * n_moves:
            scale *= 2.0
        temperature *= config.cooling_factor
        history.append(best)
        # a warm chain sits ~kT/2 per parameter above the minimum and can plateau
        # there, so the stall test is only armed once that gap is below tolerance
        cold = config.boltzmann_k * temperature * n_params <= config.stall_tolerance * max(abs(best), 1.0)
        if cold and len(history) > config.stall_window:
            ref = history[-1 - config.stall_window]
            if ref - best <= config.stall_tolerance * abs(ref):
                break

    estimate = params_to_density(TParams.from_matrix(best_t))
    return EstimateReport(
        estimate=estimate,
        final_neg_log_likelihood=neg_log_likelihood(estimate, record, eps),
        temperature_steps_used=steps_used,
        accepted_moves=accepted_total,
        proposed_moves=proposed_total,
    )


_PAULI = np.array(
    [[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=np.complex128
)


def bloch_grid(resolution: int) -> np.ndarray:
    """Bloch vectors r * (sin t cos f, sin t sin f, cos t) on the oracle grid."""
    r = np.linspace(0.0, 1.0, resolution + 1)
    theta = np.linspace(0.0, np.pi, resolution + 1)
    phi = np.arange(resolution) * (2 * np.pi / resolution)
    rr, tt, ff = np.meshgrid(r, theta, phi, indexing="ij")
    vec = np.stack([np.sin(tt) * np.cos(ff), np.sin(tt) * np.sin(ff), np.cos(tt)], axis=-1)
    return (rr[..., None] * vec).reshape(-1, 3)


def grid_oracle_1q(record: CountRecord, resolution: int = 64, eps: float = 0.5) -> DensityMatrix:
    """Exhaustive Bloch-ball search for the single-qubit likelihood minimizer.

    Independent of the annealer: no parameterization, no randomness, just the
    objective evaluated on a polar grid.
    """
    if record.n_qubits != 1:
        raise WrongDimension(f"grid oracle is single-qubit only, record has {record.n_qubits} qubits")
    if resolution < 8:
        raise ValidationError(f"resolution must be >= 8, got {resolution}")
    bases = record.basis_set.bases
    # Bloch vector of each projector: <psi|sigma_a|psi>
    axes = np.einsum("ki,aij,kj->ka", bases.conj(), _PAULI, bases).real
    points = bloch_grid(resolution)
    p = np.clip(0.5 * (1.0 + points @ axes.T), 0.0, 1.0)
    nbar = p * record.shots
    diff = nbar - record.counts
    values = np.sum(diff * diff / (2.0 * np.maximum(nbar, eps)), axis=1)
    best = points[int(np.argmin(values))]
    rho = 0.5 * (np.eye(2) + np.einsum("a,aij->ij", best, _PAULI))
    return validate_density(rho)

