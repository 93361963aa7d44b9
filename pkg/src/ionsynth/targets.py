"""Target operators for synthesis: builtins, seeded random, and file input."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateTargetError, DimensionError, MatrixFormatError

UNITARY_TOL = 1e-10
ZERO_COLUMN_TOL = 1e-12


@dataclass(frozen=True)
class TargetOperator:
    """A validated target matrix plus derived bookkeeping.

    column_norms are the Euclidean norms of the columns before the compiler
    normalizes them; for unitary targets they are all 1.  The digest is a
    content hash used to pair schedules with the matrix they were built for.
    """

    name: str
    matrix: np.ndarray = field(repr=False)
    dim: int
    unitary: bool
    column_norms: np.ndarray = field(repr=False)

    @property
    def digest(self) -> str:
        payload = f"{self.dim}:".encode() + np.ascontiguousarray(
            self.matrix, dtype=np.complex128
        ).tobytes()
        return hashlib.sha256(payload).hexdigest()

    def apply(self, coeffs: np.ndarray) -> np.ndarray:
        return self.matrix @ np.asarray(coeffs, dtype=np.complex128)


def from_matrix(name: str, matrix: np.ndarray) -> TargetOperator:
    """Validate an explicit matrix and wrap it as a target."""
    mat = np.asarray(matrix, dtype=np.complex128)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise DimensionError(f"target must be square, got shape {mat.shape}")
    dim = mat.shape[0]
    if dim < 1:
        raise DimensionError("target must have dimension >= 1")
    norms = np.linalg.norm(mat, axis=0)
    for m, nrm in enumerate(norms):
        if nrm < ZERO_COLUMN_TOL:
            raise DegenerateTargetError(f"degenerate target: column {m} is zero")
    gram = mat.conj().T @ mat
    unitary = bool(np.max(np.abs(gram - np.eye(dim))) < UNITARY_TOL)
    mat = mat.copy()
    mat.flags.writeable = False
    norms.flags.writeable = False
    return TargetOperator(name=name, matrix=mat, dim=dim, unitary=unitary, column_norms=norms)


def identity(dim: int) -> TargetOperator:
    return from_matrix("identity", np.eye(dim, dtype=np.complex128))


def qft(dim: int) -> TargetOperator:
    """Discrete Fourier transform, elements exp(2*pi*i*n*m/dim)/sqrt(dim).

    Row index n is the output phonon number, column index m the input one.
    Applied to the uniform superposition it returns a basis vector.
    """
    if dim < 1:
        raise DimensionError("qft needs dim >= 1")
    n, m = np.meshgrid(np.arange(dim), np.arange(dim), indexing="ij")
    mat = np.exp(2j * math.pi * n * m / dim) / math.sqrt(dim)
    return from_matrix("qft", mat)


def cyclic_rotation(dim: int) -> TargetOperator:
    """Cyclic shift |j⟩ → |j+1 mod dim⟩, a permutation with no prefactor."""
    if dim < 1:
        raise DimensionError("cyclic rotation needs dim >= 1")
    mat = np.zeros((dim, dim), dtype=np.complex128)
    for j in range(dim):
        mat[(j + 1) % dim, j] = 1.0
    return from_matrix("rotation", mat)


def random_unitary(dim: int, seed: int) -> TargetOperator:
    """Haar-distributed unitary, deterministic for a fixed seed.

    Orthonormalizes a complex Gaussian matrix and fixes the phases with the
    diagonal of the triangular factor, which removes the QR gauge freedom.
    """
    if dim < 1:
        raise DimensionError("random unitary needs dim >= 1")
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    q = q * (d / np.abs(d))
    return from_matrix("random", q)


def load_matrix(path: str) -> TargetOperator:
    """Read a target from JSON: {"dim": d, "elements": [[re, im], ...]} row-major."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise MatrixFormatError(f"cannot read matrix file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise MatrixFormatError(f"matrix file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict) or "dim" not in data or "elements" not in data:
        raise MatrixFormatError(f"matrix file {path} must be an object with dim and elements")
    dim = data["dim"]
    elements = data["elements"]
    if not isinstance(dim, int) or dim < 1:
        raise MatrixFormatError(f"matrix file {path}: dim must be a positive integer")
    if not isinstance(elements, list) or len(elements) != dim * dim:
        raise MatrixFormatError(
            f"matrix file {path}: expected {dim * dim} elements, got "
            f"{len(elements) if isinstance(elements, list) else type(elements).__name__}"
        )
    mat = np.zeros((dim, dim), dtype=np.complex128)
    for i, entry in enumerate(elements):
        row, col = divmod(i, dim)
        if (
            not isinstance(entry, list)
            or len(entry) != 2
            or not all(isinstance(x, (int, float)) for x in entry)
        ):
            raise MatrixFormatError(
                f"matrix file {path}: element at row {row}, column {col} must be [re, im]"
            )
        mat[row, col] = complex(entry[0], entry[1])
    return from_matrix(f"matrix:{path}", mat)
