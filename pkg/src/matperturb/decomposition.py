"""Block decompositions of a perturbation in the eigen/singular basis.

For ``Lambda_alpha = diag(alpha_plus, 0)`` the Hermitian perturbation ``E_hat`` is
written as::

    [[B,  C                                ],
     [C*, C* (Lambda_plus + B)^{-1} C + D  ]]

so ``D`` is the Schur complement of ``Lambda_plus + B`` in ``Lambda_alpha + E_hat``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    HERMITIAN_TOL,
    PSD_TOL,
    RANK_TOL,
    PreconditionError,
    SvdDecomposition,
    as_hermitian,
    as_matrix,
    hermitize,
    numerical_rank,
    svd,
)


class PerturbationTooLargeError(PreconditionError):
    """``Lambda_plus + B`` is not positive definite."""


@dataclass(frozen=True)
class SchurSplit:
    alpha_plus: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    @property
    def l(self) -> int:
        return self.alpha_plus.shape[0]

    @property
    def m(self) -> int:
        return self.D.shape[0]

    def coupling(self) -> np.ndarray:
        """``C* (Lambda_plus + B)^{-1} C``."""
        if self.l == 0:
            return np.zeros((self.m, self.m), dtype=np.complex128)
        return self.C.conj().T @ np.linalg.solve(np.diag(self.alpha_plus) + self.B, self.C)


@dataclass(frozen=True)
class ModulusSplit:
    """Blocks of ``Z_check = U* Z V`` at the numerical rank ``l`` of ``X``."""

    sigma_plus: np.ndarray
    Z11: np.ndarray
    Z12: np.ndarray
    Z21: np.ndarray
    Z22: np.ndarray

    @property
    def l(self) -> int:
        return self.sigma_plus.shape[0]

    @property
    def m(self) -> int:
        return self.Z22.shape[0]

    def assemble(self) -> np.ndarray:
        return np.block([[self.Z11, self.Z12], [self.Z21, self.Z22]])


def _check_positive_definite(M: np.ndarray, scale: float, psd_tol: float) -> None:
    if M.shape[0] == 0:
        return
    lam = np.linalg.eigvalsh(M).min()
    if not lam > psd_tol * max(1.0, scale):
        raise PerturbationTooLargeError(
            f"Lambda_plus + B is not positive definite (min eigenvalue {lam:.3e}); "
            "the perturbation is too large for the Schur split"
        )


def schur_split(
    alpha,
    E_hat,
    l: int,
    *,
    psd_tol: float = PSD_TOL,
    hermitian_tol: float = HERMITIAN_TOL,
) -> SchurSplit:
    """Split ``E_hat`` into ``(B, C, D)`` relative to ``alpha[:l]``.

    The trailing ``n - l`` entries of ``alpha`` are treated as zero regardless of
    their stored values.
    """
    alpha = np.asarray(alpha, dtype=float)
    E_hat = as_hermitian(E_hat, hermitian_tol=hermitian_tol)
    n = E_hat.shape[0]
    if alpha.shape != (n,):
        raise PreconditionError(f"alpha has length {alpha.size}, expected {n}")
    if not 0 <= l <= n:
        raise PreconditionError(f"block size l={l} outside [0, {n}]")
    alpha_plus = alpha[:l].copy()
    if np.any(alpha_plus <= 0):
        raise PreconditionError("leading eigenvalues alpha[:l] must be positive")
    B = E_hat[:l, :l].copy()
    C = E_hat[:l, l:].copy()
    split = SchurSplit(alpha_plus, B, C, np.zeros((n - l, n - l), dtype=np.complex128))
    _check_positive_definite(np.diag(alpha_plus) + B, alpha_plus.max(initial=0.0), psd_tol)
    D = hermitize(E_hat[l:, l:] - split.coupling())
    return SchurSplit(alpha_plus, B, C, D)


def schur_reassemble(split: SchurSplit) -> np.ndarray:
    """Inverse of :func:`schur_split`: rebuild ``E_hat`` from its blocks."""
    E22 = split.coupling() + split.D
    return hermitize(np.block([[split.B, split.C], [split.C.conj().T, E22]]))


def psd_iff_schur_complement(
    alpha, E_hat, l: int, *, psd_tol: float = PSD_TOL
) -> tuple[bool, bool]:
    """Return ``(Lambda_alpha + E_hat is PSD, D is PSD)``.

    The two flags agree whenever ``Lambda_plus + B`` is positive definite; this
    function exists so that equivalence can be checked.
    """
    alpha = np.asarray(alpha, dtype=float)
    split = schur_split(alpha, E_hat, l, psd_tol=psd_tol)
    lam = np.concatenate([alpha[:l], np.zeros(split.m)])
    full = np.diag(lam) + schur_reassemble(split)
    tol = psd_tol * max(1.0, float(np.abs(lam).max(initial=0.0)))
    full_psd = bool(np.linalg.eigvalsh(full).min() >= -tol)
    d_psd = bool(split.m == 0 or np.linalg.eigvalsh(split.D).min() >= -tol)
    return full_psd, d_psd


def modulus_split(X, Z, rank_tol: float = RANK_TOL) -> tuple[SvdDecomposition, ModulusSplit]:
    X, Z = as_matrix(X), as_matrix(Z)
    if X.shape != Z.shape:
        raise PreconditionError(f"X and Z differ in shape: {X.shape} vs {Z.shape}")
    dec = svd(X)
    l = numerical_rank(dec.sigma, rank_tol)
    Zc = dec.U.conj().T @ Z @ dec.V
    split = ModulusSplit(
        sigma_plus=dec.sigma[:l].copy(),
        Z11=Zc[:l, :l],
        Z12=Zc[:l, l:],
        Z21=Zc[l:, :l],
        Z22=Zc[l:, l:],
    )
    return dec, split
