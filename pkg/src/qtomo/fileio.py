"""JSON file formats for density matrices and count records."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .measure import CountRecord
from .qcore import DensityMatrix, validate_density

READ_TOL = 1e-9


def density_to_dict(rho) -> dict:
    m = np.asarray(rho)
    n_qubits = m.shape[0].bit_length() - 1
    # json writes floats with repr(), the shortest string that round-trips (<= 17 significant digits)
    entries = [[float(z.real), float(z.imag)] for z in m.ravel()]
    return {"n_qubits": n_qubits, "entries": entries}


def density_from_dict(d: dict) -> DensityMatrix:
    try:
        n_qubits = int(d["n_qubits"])
        entries = np.asarray(d["entries"], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed density-matrix record: {exc}") from None
    dim = 2**n_qubits
    if entries.shape != (dim * dim, 2):
        raise ValidationError(f"expected {dim * dim} [re, im] pairs for {n_qubits} qubit(s), got shape {entries.shape}")
    m = (entries[:, 0] + 1j * entries[:, 1]).reshape(dim, dim)
    return validate_density(m, tol=READ_TOL)


def write_json(path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def read_json(path) -> dict:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON ({exc})") from None


def write_density(path, rho) -> None:
    write_json(path, density_to_dict(rho))


def read_density(path) -> DensityMatrix:
    return density_from_dict(read_json(path))


def write_record(path, record: CountRecord) -> None:
    write_json(path, record.to_dict())


def read_record(path) -> CountRecord:
    d = read_json(path)
    try:
        return CountRecord.from_dict(d)
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"{path}: malformed count record ({exc})") from None
