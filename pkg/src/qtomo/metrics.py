"""Hilbert-Schmidt distance and two-qubit concurrence."""
from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, NumericalConsistencyError, WrongDimension
from .qcore import hermitian_eigenvalues, matrix_sqrt_psd

METRIC_NAMES = ("hs_distance", "concurrence", "concurrence_unclamped")

_SIGMA_Y = np.array([[0, -1j], [1j, 0]])
_YY = np.kron(_SIGMA_Y, _SIGMA_Y)
# eigenvalues of rho * rho~ below this are rounding noise; sqrt would inflate them to ~1e-8
_PRODUCT_EIG_FLOOR = 1e-15


def hs_distance(a, b) -> float:
    """Euclidean (Frobenius) distance sqrt(Tr[(a - b)^2])."""
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"cannot compare states of shapes {a.shape} and {b.shape}")
    return float(np.linalg.norm(a - b))


def _two_qubit(rho) -> np.ndarray:
    rho = np.asarray(rho)
    if rho.shape != (4, 4):
        raise WrongDimension(f"concurrence needs a two-qubit (4x4) state, got shape {rho.shape}")
    return rho


def spin_flip(rho) -> np.ndarray:
    """Wootters spin flip (sigma_y x sigma_y) rho* (sigma_y x sigma_y)."""
    rho = _two_qubit(rho)
    return _YY @ rho.conj() @ _YY


def r_eigenvalues(rho) -> np.ndarray:
    """Eigenvalues of R = sqrt(sqrt(rho) rho~ sqrt(rho)), descending.

    Computed as square roots of the eigenvalues of rho * rho~, which share
    the spectrum of R^2 without taking any matrix roots.
    """
    rho = _two_qubit(rho)
    mu = np.linalg.eigvals(rho @ spin_flip(rho)).real
    mu[mu < _PRODUCT_EIG_FLOOR] = 0.0
    return np.sort(np.sqrt(mu))[::-1]


def r_eigenvalues_via_roots(rho) -> np.ndarray:
    """Same spectrum through explicit matrix square roots; kept as a cross-check."""
    rho = _two_qubit(rho)
    root = matrix_sqrt_psd(rho)
    inner = root @ spin_flip(rho) @ root
    return hermitian_eigenvalues(matrix_sqrt_psd(0.5 * (inner + inner.conj().T)))


def concurrence_unclamped(rho) -> float:
    lam = r_eigenvalues(rho)
    c = float(lam[0] - lam[1] - lam[2] - lam[3])
    if c < -0.5 - 1e-7:
        raise NumericalConsistencyError(f"unclamped concurrence {c:.9f} is below -0.5")
    return c


def concurrence(rho) -> float:
    return max(0.0, concurrence_unclamped(rho))


def compute_metric(name: str, truth, estimate) -> float:
    """Dispatch by CSV metric name; concurrence metrics read the estimate only."""
    if name == "hs_distance":
        return hs_distance(truth, estimate)
    if name == "concurrence":
        return concurrence(estimate)
    if name == "concurrence_unclamped":
        return concurrence_unclamped(estimate)
    raise KeyError(f"unknown metric {name!r}")
