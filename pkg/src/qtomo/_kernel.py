"""Compiled inner loop of the annealer.

The state is carried as ``T`` (lower triangular, d x d), ``Y = bases @ T^T``
so that ``Y[k, i] = (T psi_k)_i``, the per-basis squared norms ``nrm[k] =
||T psi_k||^2`` and ``fro = ||T||_F^2``. The Born probability of basis k is
``nrm[k] / fro``. A single-coordinate move changes one row of T, hence one
column of Y, so a proposal costs O(m).
"""
import numpy as np
from numba import njit


@njit(cache=True)
def coord_position(c, d):
    """Map a parameter index to (row, col, is_imag) of T."""
    if c < d:
        return c, c, False
    k = (c - d) // 2
    imag = (c - d) % 2 == 1
    row = 1
    while k >= row:
        k -= row
        row += 1
    return row, k, imag


@njit(cache=True)
def nll_from_norms(nrm, fro, shots, counts, eps):
    total = 0.0
    for k in range(nrm.shape[0]):
        nbar = shots[k] * (nrm[k] / fro)
        diff = nbar - counts[k]
        total += diff * diff / (2.0 * max(nbar, eps))
    return total


@njit(cache=True)
def anneal_temperature_step(t, y, nrm, fro, current, best_t, best, psi, shots, counts, eps,
                            coords, steps, uniforms, kT):
    """Run one temperature level of proposals in place.

    ``t``, ``y``, ``nrm`` and ``best_t`` are updated in place. Returns
    ``(fro, current, best, accepted, degenerate)``.
    """
    m = psi.shape[0]
    d = t.shape[0]
    new_col = np.empty(m, dtype=np.complex128)
    new_nrm = np.empty(m)
    accepted = 0
    degenerate = 0
    for s in range(coords.shape[0]):
        row, col, imag = coord_position(coords[s], d)
        old = t[row, col]
        if imag:
            delta = 1j * steps[s]
        else:
            delta = steps[s] + 0j
        new = old + delta
        new_fro = fro - (old.real * old.real + old.imag * old.imag) + (new.real * new.real + new.imag * new.imag)
        if new_fro < 1e-300:
            degenerate += 1
            continue
        total = 0.0
        for k in range(m):
            yk = y[k, row] + delta * psi[k, col]
            new_col[k] = yk
            old_y = y[k, row]
            nk = nrm[k] - (old_y.real * old_y.real + old_y.imag * old_y.imag) + (yk.real * yk.real + yk.imag * yk.imag)
            if nk < 0.0:
                nk = 0.0
            new_nrm[k] = nk
            nbar = shots[k] * (nk / new_fro)
            diff = nbar - counts[k]
            total += diff * diff / (2.0 * max(nbar, eps))
        dl = total - current
        if dl <= 0.0 or uniforms[s] < np.exp(-dl / kT):
            t[row, col] = new
            for k in range(m):
                y[k, row] = new_col[k]
                nrm[k] = new_nrm[k]
            fro = new_fro
            current = total
            accepted += 1
            if current < best:
                best = current
                best_t[:, :] = t
    return fro, current, best, accepted, degenerate
