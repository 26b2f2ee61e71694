"""Spectral projectors of ``Lambda_alpha + E_tilde`` onto the perturbed range and kernel.

The contour-integral projectors are computed exactly as sums of eigenprojections.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import PreconditionError, as_hermitian, hermitize


class SpectralSeparationError(PreconditionError):
    pass


@dataclass(frozen=True)
class ProjectorPair:
    P0: np.ndarray  # kernel side
    P1: np.ndarray  # range side


def spectral_projectors(alpha, E_tilde, l: int, sep_tol: float | None = None) -> ProjectorPair:
    """Projectors onto the ``l`` largest and ``n - l`` smallest eigenvalues of ``diag(alpha) + E_tilde``.

    ``sep_tol`` defaults to a quarter of the smallest positive unperturbed eigenvalue.
    """
    alpha = np.asarray(alpha, dtype=float)
    E_tilde = as_hermitian(E_tilde)
    n = alpha.shape[0]
    if E_tilde.shape != (n, n):
        raise PreconditionError(f"E_tilde has shape {E_tilde.shape}, expected {(n, n)}")
    if not 0 <= l <= n:
        raise PreconditionError(f"block size l={l} outside [0, {n}]")
    if sep_tol is None:
        sep_tol = alpha[:l].min() / 4 if l else 0.0
    w, V = np.linalg.eigh(np.diag(alpha) + E_tilde)
    w, V = w[::-1], V[:, ::-1]
    if 0 < l < n and not w[l - 1] - w[l] > sep_tol:
        raise SpectralSeparationError(
            f"perturbed eigenvalues {w[l - 1]:.3e} and {w[l]:.3e} are not separated by {sep_tol:.3e}"
        )
    V1 = V[:, :l]
    P1 = hermitize(V1 @ V1.conj().T)
    return ProjectorPair(P0=np.eye(n) - P1, P1=P1)


def projector_first_order(alpha_plus, C_block) -> ProjectorPair:
    """Projectors correct to first order in the off-diagonal block ``C`` of ``E_tilde``.

    ``P1 ~ [[I, L^-1 C], [C* L^-1, 0]]`` and ``P0 ~ [[0, -L^-1 C], [-C* L^-1, I]]``
    with ``L = diag(alpha_plus)``.  They sum to the identity exactly but are only
    idempotent up to ``O(|C|**2)``.
    """
    alpha_plus = np.asarray(alpha_plus, dtype=float)
    C = np.atleast_2d(np.asarray(C_block, dtype=np.complex128))
    if np.any(alpha_plus == 0):
        raise PreconditionError("alpha_plus must not contain zeros")
    l, m = C.shape
    if alpha_plus.shape != (l,):
        raise PreconditionError(f"alpha_plus has length {alpha_plus.size}, expected {l}")
    G = C / alpha_plus[:, None]
    P1 = np.block([[np.eye(l), G], [G.conj().T, np.zeros((m, m))]]).astype(np.complex128)
    P0 = np.block([[np.zeros((l, l)), -G], [-G.conj().T, np.eye(m)]]).astype(np.complex128)
    return ProjectorPair(P0=P0, P1=P1)
