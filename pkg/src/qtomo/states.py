"""Named pure states, Bell-diagonal and Werner mixtures, and random states."""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import ParameterOutOfRange, UnknownLabel, ValidationError
from .qcore import DensityMatrix, projector, tensor_product, validate_density

_S = 1 / np.sqrt(2)

SINGLE_QUBIT = {
    "0": np.array([1, 0], dtype=np.complex128),
    "1": np.array([0, 1], dtype=np.complex128),
    "+": np.array([_S, _S], dtype=np.complex128),
    "-": np.array([_S, -_S], dtype=np.complex128),
    "L": np.array([_S, 1j * _S], dtype=np.complex128),
    "R": np.array([_S, -1j * _S], dtype=np.complex128),
}
# accept the typographic minus and the polarization names used in optics tables
_ALIASES = {"−": "-", "H": "0", "V": "1"}

# Note the naming: psi_minus is (|00> - |11>)/sqrt2 and phi_minus is (|01> - |10>)/sqrt2.
PSI_MINUS = np.array([_S, 0, 0, -_S], dtype=np.complex128)
PHI_MINUS = np.array([0, _S, -_S, 0], dtype=np.complex128)
_NAMED_2Q = {"psi_minus": PSI_MINUS, "phi_minus": PHI_MINUS}

STATE_KINDS = ("bell_diagonal", "werner", "pure_named", "random")


def canonical_label(label: str) -> str:
    return "".join(_ALIASES.get(ch, ch) for ch in label)


def named_pure(label: str, n_qubits: int | None = None) -> np.ndarray:
    """Pure state for a product label like ``"+L"`` or for ``psi_minus``/``phi_minus``.

    Letters are tensored left to right, so the first letter is the most
    significant qubit.
    """
    if label in _NAMED_2Q:
        if n_qubits not in (None, 2):
            raise UnknownLabel(f"{label!r} is a two-qubit state, requested n_qubits={n_qubits}")
        return _NAMED_2Q[label].copy()
    canon = canonical_label(label)
    if not canon or any(ch not in SINGLE_QUBIT for ch in canon):
        raise UnknownLabel(f"unknown state label {label!r}")
    if n_qubits is not None and len(canon) != n_qubits:
        raise UnknownLabel(f"label {label!r} has {len(canon)} letters, expected {n_qubits}")
    return reduce(tensor_product, (SINGLE_QUBIT[ch] for ch in canon))


def _check_unit(name: str, x: float) -> float:
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise ParameterOutOfRange(f"{name} must lie in [0, 1], got {x}")
    return x


def bell_diagonal(b: float) -> DensityMatrix:
    b = _check_unit("b", b)
    rho = b * projector(PSI_MINUS) + (1 - b) * projector(PHI_MINUS)
    return validate_density(rho)


def werner(q: float) -> DensityMatrix:
    q = _check_unit("q", q)
    rho = q * projector(PSI_MINUS) + (1 - q) * np.eye(4) / 4
    return validate_density(rho)


def random_density(n_qubits: int, rng: np.random.Generator) -> DensityMatrix:
    """Sample a mixed state from the Hilbert-Schmidt measure.

    G has i.i.d. standard complex normal entries (real and imaginary parts
    each with variance 1/2); the state is G G^H / Tr(G G^H).
    """
    if n_qubits not in (1, 2):
        raise ParameterOutOfRange(f"random_density supports 1 or 2 qubits, got {n_qubits}")
    d = 2**n_qubits
    g = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) * _S
    w = g @ g.conj().T
    return validate_density(w / np.trace(w).real)


def random_pure_density(n_qubits: int, rng: np.random.Generator) -> DensityMatrix:
    """Haar-random pure state, for the pure-only sensitivity toggle of the sweeps."""
    if n_qubits not in (1, 2):
        raise ParameterOutOfRange(f"random_pure_density supports 1 or 2 qubits, got {n_qubits}")
    d = 2**n_qubits
    psi = (rng.standard_normal(d) + 1j * rng.standard_normal(d)) * _S
    psi /= np.linalg.norm(psi)
    return validate_density(projector(psi))


@dataclass(frozen=True)
class StateSpec:
    """Which state a sweep measures. ``parameter`` is b or q; ``label`` is for pure_named."""

    kind: str
    parameter: float | None = None
    label: str | None = None
    n_qubits: int = 2
    pure_only: bool = False

    def __post_init__(self):
        if self.kind not in STATE_KINDS:
            raise ValidationError(f"state kind must be one of {STATE_KINDS}, got {self.kind!r}")
        if self.kind in ("bell_diagonal", "werner"):
            if self.parameter is None:
                raise ValidationError(f"{self.kind} needs a parameter")
            _check_unit("b" if self.kind == "bell_diagonal" else "q", self.parameter)
            if self.n_qubits != 2:
                raise ValidationError(f"{self.kind} is a two-qubit state, got n_qubits={self.n_qubits}")
        elif self.kind == "pure_named":
            if not self.label:
                raise ValidationError("pure_named needs a label")
            named_pure(self.label, self.n_qubits)
        elif self.n_qubits not in (1, 2):
            raise ValidationError(f"random states support 1 or 2 qubits, got {self.n_qubits}")

    @property
    def is_fixed(self) -> bool:
        return self.kind != "random"

    def build(self, rng: np.random.Generator | None = None) -> DensityMatrix:
        if self.kind == "bell_diagonal":
            return bell_diagonal(self.parameter)
        if self.kind == "werner":
            return werner(self.parameter)
        if self.kind == "pure_named":
            return validate_density(projector(named_pure(self.label, self.n_qubits)))
        if rng is None:
            raise ValidationError("random states need a random generator")
        if self.pure_only:
            return random_pure_density(self.n_qubits, rng)
        return random_density(self.n_qubits, rng)

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "n_qubits": self.n_qubits}
        if self.parameter is not None:
            d["parameter"] = self.parameter
        if self.label is not None:
            d["label"] = self.label
        if self.pure_only:
            d["pure_only"] = True
        return d
