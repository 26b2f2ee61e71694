"""Dense complex matrix primitives used as the exact reference.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``.  Hermitian
and PSD inputs are validated on entry; everything returned is a fresh array.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

HERMITIAN_TOL = 1e-10
UNITARY_TOL = 1e-10
RECON_TOL = 1e-10
PSD_TOL = 1e-10
RANK_TOL = 1e-8


class PreconditionError(ValueError):
    """An input violates the precondition of an operation."""


class NotHermitianError(PreconditionError):
    pass


class NotPSDError(PreconditionError):
    pass


class NumericalError(RuntimeError):
    """The underlying LAPACK factorization failed."""


@dataclass(frozen=True)
class SpectralDecomposition:
    """``A = U diag(alpha) U*`` with ``alpha`` sorted in descending order."""

    U: np.ndarray
    alpha: np.ndarray

    @property
    def n(self) -> int:
        return self.alpha.shape[0]

    def reconstruct(self) -> np.ndarray:
        return (self.U * self.alpha) @ self.U.conj().T


@dataclass(frozen=True)
class SvdDecomposition:
    """``X = U diag(sigma) V*`` with ``sigma`` sorted in descending order."""

    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.U * self.sigma) @ self.V.conj().T


def as_matrix(M, *, square: bool = True) -> np.ndarray:
    """Promote ``M`` to a finite complex 2-D array."""
    M = np.array(M, dtype=np.complex128)
    if M.ndim == 0:
        M = M.reshape(1, 1)
    if M.ndim != 2:
        raise PreconditionError(f"expected a 2-D matrix, got shape {M.shape}")
    if square and M.shape[0] != M.shape[1]:
        raise PreconditionError(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise PreconditionError("matrix has non-finite entries")
    return M


def hermitian_defect(M: np.ndarray) -> tuple[float, tuple[int, int]]:
    """Largest ``|M[i,j] - conj(M[j,i])|`` and the index pair attaining it."""
    diff = np.abs(M - M.conj().T)
    idx = np.unravel_index(np.argmax(diff), diff.shape) if diff.size else (0, 0)
    return (float(diff[idx]) if diff.size else 0.0), (int(idx[0]), int(idx[1]))


def as_hermitian(M, *, hermitian_tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Validate ``M`` as Hermitian and return its exactly Hermitian part."""
    M = as_matrix(M)
    defect, (i, j) = hermitian_defect(M)
    scale = 1.0 + (np.abs(M).max() if M.size else 0.0)
    if defect > hermitian_tol * scale:
        raise NotHermitianError(
            f"matrix is not Hermitian: |M[{i},{j}] - conj(M[{j},{i}])| = {defect:.3e}"
            f" exceeds {hermitian_tol:.1e} * {scale:.3e}"
        )
    return hermitize(M)


def hermitize(M: np.ndarray) -> np.ndarray:
    return (M + M.conj().T) / 2


def eigh(A, *, hermitian_tol: float = HERMITIAN_TOL) -> SpectralDecomposition:
    """Hermitian eigendecomposition with eigenvalues in descending order.

    Zero eigenvalues of a PSD matrix therefore occupy the trailing positions.
    """
    A = as_hermitian(A, hermitian_tol=hermitian_tol)
    try:
        w, U = np.linalg.eigh(A)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigh failed: {exc}") from exc
    return SpectralDecomposition(U=U[:, ::-1].copy(), alpha=w[::-1].copy())


def svd(X) -> SvdDecomposition:
    """Full SVD of a square matrix (pad non-square inputs with zeros first)."""
    X = as_matrix(X)
    try:
        U, s, Vh = np.linalg.svd(X)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"svd failed: {exc}") from exc
    return SvdDecomposition(U=U, sigma=s, V=Vh.conj().T)


def from_spectrum(U: np.ndarray, values: np.ndarray) -> np.ndarray:
    """``U diag(values) U*``, Hermitized when ``values`` is real."""
    M = (U * values) @ U.conj().T
    return hermitize(M) if np.isrealobj(values) else M


def apply_function(dec: SpectralDecomposition, f: Callable) -> np.ndarray:
    """Functional calculus ``f(A) = U diag(f(alpha)) U*``."""
    with np.errstate(all="ignore"):
        values = np.asarray(f(dec.alpha))
    bad = ~np.isfinite(values)
    if np.any(bad):
        a = dec.alpha[np.argmax(bad)]
        raise PreconditionError(f"function is undefined or non-finite at eigenvalue {a!r}")
    return from_spectrum(dec.U, values)


def _psd_threshold(alpha: np.ndarray, psd_tol: float) -> float:
    return psd_tol * max(1.0, float(np.abs(alpha).max()) if alpha.size else 0.0)


def clip_psd(alpha: np.ndarray, *, psd_tol: float = PSD_TOL) -> np.ndarray:
    """Clip eigenvalues in ``[-tol, 0)`` to zero; reject anything more negative."""
    if alpha.size and alpha.min() < -_psd_threshold(alpha, psd_tol):
        raise NotPSDError(f"matrix is not positive semi-definite: eigenvalue {alpha.min():.3e}")
    return np.clip(alpha, 0.0, None)


def matrix_power(A, s: float, *, psd_tol: float = PSD_TOL) -> np.ndarray:
    """``A**s`` for PSD ``A`` and real ``s > 0``; ``s = 1/2`` is the square root."""
    if not s > 0:
        raise PreconditionError(f"exponent must be positive, got {s}")
    dec = eigh(A)
    return from_spectrum(dec.U, clip_psd(dec.alpha, psd_tol=psd_tol) ** s)


def matrix_modulus(X) -> np.ndarray:
    """``|X| = sqrt(X* X)``, computed as ``V diag(sigma) V*`` from the SVD."""
    dec = svd(X)
    return from_spectrum(dec.V, dec.sigma)


def hadamard(M, N) -> np.ndarray:
    M, N = np.asarray(M), np.asarray(N)
    if M.shape != N.shape:
        raise PreconditionError(f"shape mismatch in Hadamard product: {M.shape} vs {N.shape}")
    return M * N


def spectral_norm(M) -> float:
    M = np.asarray(M)
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M, 2))


def frobenius_norm(M) -> float:
    return float(np.linalg.norm(np.asarray(M), "fro"))


def numerical_rank(alpha, rank_tol: float = RANK_TOL) -> int:
    """Number of entries of ``alpha`` above ``rank_tol * max(1, alpha[0])``.

    ``alpha`` must be sorted descending; the remaining trailing entries are the
    numerical kernel.
    """
    alpha = np.asarray(alpha, dtype=float)
    if alpha.size == 0:
        return 0
    return int(np.count_nonzero(alpha > rank_tol * max(1.0, float(alpha[0]))))
