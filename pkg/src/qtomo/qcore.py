"""Small dense complex linear algebra for 2^n-dimensional quantum states.

Matrices are plain ``numpy`` complex128 arrays; pure states are 1-D complex
arrays. :class:`DensityMatrix` wraps a matrix that has passed
:func:`validate_density`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotHermitian, NotPositive, TraceNotOne, ValidationError

HERMITIAN_TOL = 1e-10
PSD_CLAMP_TOL = 1e-9
JACOBI_TOL = 1e-13
_JACOBI_MAX_SWEEPS = 100


def _check_dim(dim: int) -> int:
    if dim < 2 or dim & (dim - 1):
        raise DimensionMismatch(f"dimension must be a power of 2 and >= 2, got {dim}")
    return dim.bit_length() - 1


def as_square(m) -> np.ndarray:
    """Return ``m`` as a complex square matrix of power-of-two dimension."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    _check_dim(a.shape[0])
    return a


def hermiticity_error(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T)))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated Hermitian, unit-trace, positive semidefinite matrix."""

    matrix: np.ndarray
    n_qubits: int

    def __post_init__(self):
        self.matrix.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.matrix
        return self.matrix.astype(dtype)

    def __repr__(self):
        return f"DensityMatrix(n_qubits={self.n_qubits}, matrix=\n{self.matrix!r})"


def normalize(v) -> np.ndarray:
    v = np.asarray(v, dtype=np.complex128)
    nrm = np.linalg.norm(v)
    if nrm == 0:
        raise ValidationError("cannot normalize the zero vector")
    return v / nrm


def tensor_product(a, b) -> np.ndarray:
    """Kronecker product of two pure states: ``out[i*len(b) + j] = a[i]*b[j]``."""
    out = np.kron(np.asarray(a, dtype=np.complex128), np.asarray(b, dtype=np.complex128))
    return normalize(out)


def projector(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=np.complex128)
    return np.outer(psi, psi.conj())


def _jacobi_eigh(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic complex Jacobi diagonalization of a Hermitian matrix.

    Returns unsorted real eigenvalues and the unitary whose columns are the
    eigenvectors. Each rotation first removes the phase of the pivot and
    then applies a real Givens rotation (Rutishauser's stable angle).
    """
    a = 0.5 * (a + a.conj().T)
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    scale = max(1.0, float(np.linalg.norm(a)))
    offmask = ~np.eye(n, dtype=bool)
    for _ in range(_JACOBI_MAX_SWEEPS):
        off = np.linalg.norm(a[offmask])
        if off < JACOBI_TOL * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag < 1e-300:
                    continue
                phase = apq / mag
                app, aqq = a[p, p].real, a[q, q].real
                zeta = (aqq - app) / (2.0 * mag)
                t = (1.0 if zeta >= 0 else -1.0) / (abs(zeta) + np.hypot(1.0, zeta))
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                # unitary acting on the (p, q) plane: columns p, q of the update
                u_pp, u_pq = c, s
                u_qp, u_qq = -s * np.conj(phase), c * np.conj(phase)
                col_p = a[:, p] * u_pp + a[:, q] * u_qp
                col_q = a[:, p] * u_pq + a[:, q] * u_qq
                a[:, p], a[:, q] = col_p, col_q
                row_p = np.conj(u_pp) * a[p, :] + np.conj(u_qp) * a[q, :]
                row_q = np.conj(u_pq) * a[p, :] + np.conj(u_qq) * a[q, :]
                a[p, :], a[q, :] = row_p, row_q
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p] * u_pp + v[:, q] * u_qp
                vq = v[:, p] * u_pq + v[:, q] * u_qq
                v[:, p], v[:, q] = vp, vq
    else:
        raise ArithmeticError("Jacobi eigensolver did not converge")
    return np.real(np.diag(a)).copy(), v


def hermitian_eigh(m, tol: float = HERMITIAN_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and matching eigenvector columns of a Hermitian matrix."""
    a = as_square(m).copy()
    err = hermiticity_error(a)
    if err > tol:
        raise NotHermitian(f"matrix is not Hermitian: max |M - M^H| = {err:.3e} > {tol:.1e}")
    w, v = _jacobi_eigh(a)
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


def hermitian_eigenvalues(m, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix, sorted in descending order."""
    return hermitian_eigh(m, tol)[0]


def matrix_sqrt_psd(m) -> np.ndarray:
    """Principal square root of a Hermitian PSD matrix.

    Eigenvalues in ``[-1e-9, 0)`` are treated as rounding noise and clamped
    to zero; anything more negative raises :class:`NotPositive`.
    """
    w, v = hermitian_eigh(m)
    if w[-1] < -PSD_CLAMP_TOL:
        raise NotPositive(f"matrix has eigenvalue {w[-1]:.3e} < -{PSD_CLAMP_TOL:.0e}")
    root = np.sqrt(np.clip(w, 0.0, None))
    out = (v * root) @ v.conj().T
    return 0.5 * (out + out.conj().T)


def validate_density(m, tol: float = 1e-9) -> DensityMatrix:
    """Check the three physicality constraints and wrap ``m`` as a DensityMatrix.

    Small negative eigenvalues within ``tol`` are accepted unchanged.
    """
    if not tol > 0:
        raise ValidationError(f"tol must be positive, got {tol}")
    a = as_square(m).copy()
    n_qubits = _check_dim(a.shape[0])
    err = hermiticity_error(a)
    if err > tol:
        raise NotHermitian(f"not Hermitian: max |M - M^H| = {err:.3e} exceeds tol {tol:.1e}")
    tr = np.trace(a)
    if abs(tr.real - 1.0) > tol or abs(tr.imag) > tol:
        raise TraceNotOne(f"trace is {tr.real:.15g}{tr.imag:+.3g}j, not 1 within tol {tol:.1e}")
    lmin = hermitian_eigenvalues(a, tol=tol)[-1]
    if lmin < -tol:
        raise NotPositive(f"not positive semidefinite: smallest eigenvalue {lmin:.3e} < -{tol:.1e}")
    return DensityMatrix(0.5 * (a + a.conj().T), n_qubits)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix (used by tests and checks)."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))
