"""Measurement basis catalogs, Born probabilities and simulated counts."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, OutOfRange, ValidationError
from .qcore import DensityMatrix
from .states import canonical_label, named_pure

OVERCOMPLETE_LETTERS = "01+-LR"
STANDARD_LETTERS = "01+L"
SCHEMES = ("standard", "overcomplete", "table1_prefix")
COUNT_MODELS = ("binomial", "poisson")

# Two-qubit selection order used in the optical experiment, H=|0>, V=|1>.
# Rows 33-36 repeat rows 12, 13, 22 and 11; kept as published.
TABLE1 = (
    "HH", "HV", "VH", "VV", "RH", "RV", "+V", "+H", "+R", "++",
    "R+", "H+", "V+", "VL", "HL", "RL", "LL", "-L", "-+", "--",
    "+-", "L+", "LR", "-R", "HR", "VR", "RR", "+L", "-H", "-V",
    "LH", "LV", "H+", "V+", "L+", "R+",
)


@dataclass(frozen=True, eq=False)
class BasisSet:
    """Ordered projectors ``bases[k]`` (rows) with their labels."""

    bases: np.ndarray
    labels: tuple[str, ...]
    scheme: str
    n_qubits: int

    def __post_init__(self):
        if self.bases.ndim != 2 or self.bases.shape[1] != 2**self.n_qubits:
            raise DimensionMismatch(
                f"bases must have shape (m, {2**self.n_qubits}), got {self.bases.shape}"
            )
        if len(self.labels) != self.bases.shape[0] or not self.labels:
            raise ValidationError("labels and bases must have equal, non-zero length")
        self.bases.setflags(write=False)

    @property
    def m(self) -> int:
        return len(self.labels)

    @property
    def dim(self) -> int:
        return self.bases.shape[1]

    @classmethod
    def from_labels(cls, labels, scheme: str, n_qubits: int) -> "BasisSet":
        labels = tuple(labels)
        bases = np.array([named_pure(lab, n_qubits) for lab in labels])
        return cls(bases, labels, scheme, n_qubits)

    def to_dict(self) -> dict:
        return {"scheme": self.scheme, "n_qubits": self.n_qubits, "m": self.m, "labels": list(self.labels)}

    @classmethod
    def from_dict(cls, d: dict) -> "BasisSet":
        basis = cls.from_labels(d["labels"], d["scheme"], int(d["n_qubits"]))
        if "m" in d and int(d["m"]) != basis.m:
            raise ValidationError(f"basis set declares m={d['m']} but lists {basis.m} labels")
        return basis


@dataclass(frozen=True, eq=False)
class CountRecord:
    """Observed counts per basis.

    ``count_model`` records how the counts were generated; under the Poisson
    photon-counting model a count may exceed its nominal shot allocation, so
    ``counts <= shots`` is only enforced for binomial records.
    """

    basis_set: BasisSet
    shots: np.ndarray
    counts: np.ndarray
    total_N: int = field(default=-1)
    count_model: str = "binomial"

    def __post_init__(self):
        if self.count_model not in COUNT_MODELS:
            raise ValidationError(f"count_model must be one of {COUNT_MODELS}, got {self.count_model!r}")
        shots = np.asarray(self.shots, dtype=np.int64)
        counts = np.asarray(self.counts, dtype=np.int64)
        m = self.basis_set.m
        if shots.shape != (m,) or counts.shape != (m,):
            raise DimensionMismatch(f"shots and counts must both have length {m}")
        if np.any(shots < 0) or np.any(counts < 0):
            raise ValidationError("shots and counts must be non-negative")
        if self.count_model == "binomial" and np.any(counts > shots):
            raise ValidationError("a count exceeds the shots allocated to its basis")
        total = int(shots.sum())
        if self.total_N == -1:
            object.__setattr__(self, "total_N", total)
        elif int(self.total_N) != total:
            raise ValidationError(f"total_N={self.total_N} but shots sum to {total}")
        shots.setflags(write=False)
        counts.setflags(write=False)
        object.__setattr__(self, "shots", shots)
        object.__setattr__(self, "counts", counts)

    @property
    def n_qubits(self) -> int:
        return self.basis_set.n_qubits

    def to_dict(self) -> dict:
        return {
            "basis_set": self.basis_set.to_dict(),
            "shots": self.shots.tolist(),
            "counts": self.counts.tolist(),
            "total_N": self.total_N,
            "count_model": self.count_model,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CountRecord":
        return cls(BasisSet.from_dict(d["basis_set"]), d["shots"], d["counts"], int(d["total_N"]),
                   d.get("count_model", "binomial"))


def _product_set(letters: str, n_qubits: int, scheme: str) -> BasisSet:
    if n_qubits < 1:
        raise ValidationError(f"n_qubits must be >= 1, got {n_qubits}")
    labels = ["".join(p) for p in itertools.product(letters, repeat=n_qubits)]
    return BasisSet.from_labels(labels, scheme, n_qubits)


def overcomplete_set(n_qubits: int) -> BasisSet:
    """All 6^n products of the six Bloch-sphere polar states, lexicographic in 0,1,+,-,L,R."""
    return _product_set(OVERCOMPLETE_LETTERS, n_qubits, "overcomplete")


def standard_set(n_qubits: int, letters: str = STANDARD_LETTERS) -> BasisSet:
    """All 4^n products of a four-state single-qubit set, by default 0,1,+,L."""
    letters = canonical_label(letters)
    if len(letters) != 4 or len(set(letters)) != 4:
        raise ValidationError(f"standard set needs four distinct letters, got {letters!r}")
    return _product_set(letters, n_qubits, "standard")


def table1_prefix(m: int) -> BasisSet:
    if not 1 <= m <= len(TABLE1):
        raise OutOfRange(f"table prefix size must be in [1, {len(TABLE1)}], got {m}")
    return BasisSet.from_labels(TABLE1[:m], "table1_prefix", 2)


def basis_set_from_descriptor(descriptor: str, n_qubits: int) -> BasisSet:
    """Resolve a harness scheme descriptor.

    ``standard``, ``overcomplete``, ``standard:<4 letters>`` or ``table1:<m>``.
    """
    name, _, arg = descriptor.partition(":")
    if name == "overcomplete" and not arg:
        return overcomplete_set(n_qubits)
    if name == "standard":
        return standard_set(n_qubits, arg) if arg else standard_set(n_qubits)
    if name in ("table1", "table1_prefix"):
        if n_qubits != 2:
            raise ValidationError("table1 prefixes are two-qubit basis sets")
        try:
            m = int(arg)
        except ValueError:
            raise ValidationError(f"bad table1 descriptor {descriptor!r}") from None
        return table1_prefix(m)
    raise ValidationError(f"unknown basis scheme {descriptor!r}")


def born_probabilities(bases: np.ndarray, rho) -> np.ndarray:
    """Vectorized <psi_k| rho |psi_k> over the rows of ``bases``, clamped to [0, 1]."""
    rho = np.asarray(rho)
    if bases.shape[-1] != rho.shape[0]:
        raise DimensionMismatch(f"basis dimension {bases.shape[-1]} does not match state dimension {rho.shape[0]}")
    p = np.einsum("ki,ij,kj->k", bases.conj(), rho, bases).real
    return np.clip(p, 0.0, 1.0)


def born_probability(basis, rho) -> float:
    basis = np.asarray(basis, dtype=np.complex128)
    return float(born_probabilities(basis[None, :], rho)[0])


def allocate_shots(total_N: int, m: int) -> np.ndarray:
    """Split N copies evenly over m bases; the first N mod m bases get one extra."""
    if total_N < 0 or m < 1:
        raise ValidationError(f"need total_N >= 0 and m >= 1, got ({total_N}, {m})")
    q, r = divmod(int(total_N), int(m))
    shots = np.full(m, q, dtype=np.int64)
    shots[:r] += 1
    return shots


def simulate_counts(rho: DensityMatrix, basis_set: BasisSet, total_N: int, rng: np.random.Generator,
                    model: str = "binomial") -> CountRecord:
    """Independent counts per basis, with shots from :func:`allocate_shots`.

    ``binomial``: each allocated copy passes the projector with its Born
    probability. ``poisson``: photon counting, n ~ Poisson(shots * p), the
    statistics whose variance (= mean) the Gaussian likelihood assumes.
    """
    if model not in COUNT_MODELS:
        raise ValidationError(f"count model must be one of {COUNT_MODELS}, got {model!r}")
    if np.asarray(rho).shape[0] != basis_set.dim:
        raise DimensionMismatch(f"state dimension {np.asarray(rho).shape[0]} != basis dimension {basis_set.dim}")
    shots = allocate_shots(total_N, basis_set.m)
    p = born_probabilities(basis_set.bases, rho)
    if model == "binomial":
        counts = rng.binomial(shots, p)
    else:
        counts = rng.poisson(shots * p)
    return CountRecord(basis_set, shots, counts, int(total_N), model)
