"""Dense complex linear algebra: eigendecomposition, singular values, modulus, projections."""
import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import numpy.typing as npt
import scipy.linalg

from src.config import settings
from src.errors import InvalidMatrix, NoConvergence, NotHermitian, NotOrthonormal

logger = logging.getLogger(__name__)

ComplexMatrix = npt.NDArray[np.complex128]


def as_matrix(M) -> ComplexMatrix:
    """Coerce to a finite square complex128 array, or raise InvalidMatrix."""
    arr = np.asarray(M, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise InvalidMatrix(f"expected a square matrix, got shape {arr.shape}")
    if arr.shape[0] < 1:
        raise InvalidMatrix("matrix dimension must be at least 1")
    if not np.all(np.isfinite(arr)):
        raise InvalidMatrix("matrix has non-finite entries")
    return arr


def dagger(M: ComplexMatrix) -> ComplexMatrix:
    return M.conj().T


def operator_norm(M: ComplexMatrix) -> float:
    """Largest singular value, ‖M‖_∞."""
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M, 2))


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


def descending_modulus_order(values: np.ndarray, tol: float) -> np.ndarray:
    """Permutation sorting by descending modulus.

    Moduli within `tol` of each other count as ties and are ordered by
    descending real part, then descending imaginary part.
    """
    values = np.asarray(values, dtype=np.complex128)
    if values.size == 0:
        return np.zeros(0, dtype=int)
    order = np.argsort(-np.abs(values), kind="stable")
    result: list[int] = []
    cluster = [order[0]]
    for idx in order[1:]:
        if abs(values[cluster[0]]) - abs(values[idx]) <= tol:
            cluster.append(idx)
            continue
        result.extend(sorted(cluster, key=lambda i: (-values[i].real, -values[i].imag)))
        cluster = [idx]
    result.extend(sorted(cluster, key=lambda i: (-values[i].real, -values[i].imag)))
    return np.asarray(result, dtype=int)


@dataclass(frozen=True)
class Spectrum:
    """Spectral decomposition Σ μ_n u_n u_n* of a normal operator.

    `eigenvectors` holds u_n as columns; eigenvalues are ordered by
    descending modulus. `dim` is recorded so the zero operator (empty
    spectrum) still reconstructs.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    dim: int

    def __post_init__(self):
        object.__setattr__(self, "eigenvalues", _frozen(np.asarray(self.eigenvalues, dtype=np.complex128)))
        vecs = np.asarray(self.eigenvectors, dtype=np.complex128)
        vecs = np.zeros((self.dim, 0), dtype=np.complex128) if vecs.size == 0 else vecs.reshape(self.dim, -1)
        object.__setattr__(self, "eigenvectors", _frozen(vecs))
        if vecs.shape[1] != self.eigenvalues.shape[0]:
            raise InvalidMatrix(
                f"{self.eigenvalues.shape[0]} eigenvalues but {vecs.shape[1]} eigenvectors"
            )

    @classmethod
    def from_data(cls, eigenvalues: Sequence[complex], eigenvectors, tol: Optional[float] = None) -> "Spectrum":
        """Build a Spectrum from explicitly supplied eigen-data (any normal operator).

        Eigenvectors are columns; they are validated for orthonormality and
        re-sorted into descending-modulus order.
        """
        tol = settings.tau_orth if tol is None else tol
        values = np.asarray(eigenvalues, dtype=np.complex128)
        vecs = np.asarray(eigenvectors, dtype=np.complex128)
        if vecs.ndim != 2 or vecs.shape[1] != values.shape[0]:
            raise InvalidMatrix("eigenvectors must be a dim x k array with one column per eigenvalue")
        _check_orthonormal(vecs, tol)
        scale = max(1.0, float(np.max(np.abs(values)))) if values.size else 1.0
        order = descending_modulus_order(values, settings.tau_herm * scale)
        return cls(values[order], vecs[:, order], vecs.shape[0])

    def __len__(self) -> int:
        return int(self.eigenvalues.shape[0])

    @property
    def moduli(self) -> np.ndarray:
        return np.abs(self.eigenvalues)

    def matrix(self) -> ComplexMatrix:
        """Reconstruct Σ μ_n u_n u_n*."""
        U = self.eigenvectors
        return (U * self.eigenvalues) @ dagger(U)

    def leading_vectors(self, n: int) -> list[np.ndarray]:
        return [self.eigenvectors[:, i] for i in range(n)]


@dataclass(frozen=True)
class SingularSpectrum:
    """Canonical decomposition Σ λ_n v_n u_n* (left v_n, right u_n as columns)."""

    values: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(np.asarray(self.values, dtype=np.float64)))
        object.__setattr__(self, "left_vectors", _frozen(self.left_vectors))
        object.__setattr__(self, "right_vectors", _frozen(self.right_vectors))

    def matrix(self) -> ComplexMatrix:
        return (self.left_vectors * self.values) @ dagger(self.right_vectors)


@dataclass(frozen=True)
class Projection:
    matrix: np.ndarray
    rank: int

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(np.asarray(self.matrix, dtype=np.complex128)))

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    @classmethod
    def from_matrix(cls, P, tol: Optional[float] = None) -> "Projection":
        """Validate P = P* = P² and read the rank off the trace."""
        tol = settings.tau_proj if tol is None else tol
        P = as_matrix(P)
        if operator_norm(P - dagger(P)) > tol:
            raise NotOrthonormal("matrix is not self-adjoint")
        if operator_norm(P @ P - P) > tol:
            raise NotOrthonormal("matrix is not idempotent")
        tr = np.trace(P).real
        rank = int(round(tr))
        if abs(tr - rank) > tol:
            raise NotOrthonormal(f"trace {tr} of a projection must be an integer")
        return cls(P, rank)

    def complement(self) -> "Projection":
        """Q = I − P."""
        return Projection(np.eye(self.dim, dtype=np.complex128) - self.matrix, self.dim - self.rank)


def _check_orthonormal(vecs: np.ndarray, tol: float) -> None:
    if vecs.shape[1] == 0:
        return
    gram = dagger(vecs) @ vecs
    err = float(np.max(np.abs(gram - np.eye(vecs.shape[1]))))
    if err > tol:
        raise NotOrthonormal(f"vectors deviate from orthonormality by {err:.3e}")


def hermitian_eig(M) -> Spectrum:
    """Spectral decomposition of a Hermitian matrix, descending by modulus."""
    M = as_matrix(M)
    dim = M.shape[0]
    scale = operator_norm(M)
    if scale == 0.0:
        return Spectrum(np.zeros(0), np.zeros((dim, 0)), dim)

    asym = operator_norm(M - dagger(M))
    if asym > settings.tau_herm * max(1.0, scale):
        raise NotHermitian(f"‖M − M*‖_∞ = {asym:.3e} exceeds tolerance")

    H = (M + dagger(M)) / 2
    try:
        values, vectors = scipy.linalg.eigh(H)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise NoConvergence(f"Hermitian eigensolver failed: {e}") from e

    order = descending_modulus_order(values, settings.tau_herm * max(1.0, scale))
    logger.debug(f"hermitian_eig dim={dim} spread=[{values[0]:.3e}, {values[-1]:.3e}]")
    return Spectrum(values[order].astype(np.complex128), vectors[:, order], dim)


def _svd(M: ComplexMatrix, compute_uv: bool):
    # gesdd is fast but occasionally fails to converge; gesvd is the fallback
    for driver in ("gesdd", "gesvd"):
        try:
            return scipy.linalg.svd(M, compute_uv=compute_uv, lapack_driver=driver)
        except np.linalg.LinAlgError as e:
            logger.debug(f"SVD driver {driver} failed: {e}")
    raise NoConvergence("singular value decomposition did not converge")


def singular_values(M) -> np.ndarray:
    """Singular values only, descending."""
    return _svd(as_matrix(M), compute_uv=False)


def singular_spectrum(M) -> SingularSpectrum:
    M = as_matrix(M)
    U, s, Vh = _svd(M, compute_uv=True)
    return SingularSpectrum(s, U, dagger(Vh))


def modulus(M) -> ComplexMatrix:
    """|M| = (M*M)^{1/2}, built from the right singular vectors."""
    ss = singular_spectrum(M)
    V = ss.right_vectors
    R = (V * ss.values) @ dagger(V)
    return (R + dagger(R)) / 2


def is_normal(M, tol: float) -> bool:
    if tol <= 0:
        raise ValueError("tol must be positive")
    M = as_matrix(M)
    commutator = M @ dagger(M) - dagger(M) @ M
    return operator_norm(commutator) <= tol * operator_norm(M) ** 2


def projection_from_vectors(vectors: Sequence[np.ndarray], dim: Optional[int] = None) -> Projection:
    """P = Σ u u* over orthonormal vectors; `dim` is required for an empty list."""
    if len(vectors) == 0:
        if dim is None:
            raise InvalidMatrix("dimension is required for an empty vector list")
        return Projection(np.zeros((dim, dim), dtype=np.complex128), 0)

    V = np.column_stack([np.asarray(v, dtype=np.complex128).ravel() for v in vectors])
    if dim is not None and V.shape[0] != dim:
        raise InvalidMatrix(f"vectors have length {V.shape[0]}, expected {dim}")
    _check_orthonormal(V, settings.tau_orth)
    P = V @ dagger(V)
    return Projection((P + dagger(P)) / 2, V.shape[1])
