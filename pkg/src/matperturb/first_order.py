"""First-order perturbation formulas for matrix powers and the matrix modulus.

All approximations are assembled in the eigen/singular basis of the unperturbed
matrix and conjugated back, so only the returned ``n x n`` matrices are
basis-independent.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import (
    HERMITIAN_TOL,
    PSD_TOL,
    RANK_TOL,
    NotPSDError,
    PreconditionError,
    SpectralDecomposition,
    as_hermitian,
    as_matrix,
    clip_psd,
    eigh,
    from_spectrum,
    hermitize,
    matrix_modulus,
    matrix_power,
    numerical_rank,
)
from .decomposition import ModulusSplit, SchurSplit, modulus_split, schur_split
from .loewner import (
    PAIR_TOL,
    divided_difference,
    power_dd_one,
    sqrt_divided_difference,
    xi_sigma_alpha,
    xi_sigma_plus,
)


class KernelPresentError(PreconditionError):
    """The function is not differentiable on the kernel of ``A``; use :func:`power_approx`."""


@dataclass(frozen=True)
class PowerApproxResult:
    base: np.ndarray
    first_order_term: np.ndarray
    split: SchurSplit
    exponent: float
    expected_order: float | None  # None: no order is guaranteed (p >= 3)

    @property
    def approximation(self) -> np.ndarray:
        return self.base + self.first_order_term


@dataclass(frozen=True)
class ModulusApproxResult:
    base: np.ndarray
    first_order_term: np.ndarray
    split: ModulusSplit | None
    expected_order: float = 1.5

    @property
    def approximation(self) -> np.ndarray:
        return self.base + self.first_order_term


def _to_basis(U: np.ndarray, E: np.ndarray) -> np.ndarray:
    return hermitize(U.conj().T @ E @ U)


def _from_basis(U: np.ndarray, K: np.ndarray) -> np.ndarray:
    return hermitize(U @ K @ U.conj().T)


def dk_approx(
    dec: SpectralDecomposition,
    E,
    f: Callable,
    f_prime: Callable,
    *,
    pair_tol: float = PAIR_TOL,
    rank_tol: float = RANK_TOL,
) -> np.ndarray:
    """Daleckii-Krein approximation ``f(A) + U([f, alpha] o E_hat) U*``.

    ``f`` must be C^2 near the spectrum.  Passing ``np.sqrt`` selects the
    cancellation-free divided differences.  Raises :class:`KernelPresentError`
    when ``A`` has a numerical kernel on which ``f'`` blows up.
    """
    E = as_hermitian(E)
    alpha = dec.alpha
    kernel = np.abs(alpha) <= rank_tol * max(1.0, float(np.abs(alpha).max()))
    if np.any(kernel):
        with np.errstate(all="ignore"):
            d0 = np.asarray(f_prime(np.zeros(1)), dtype=float)
        if not np.all(np.isfinite(d0)):
            raise KernelPresentError(
                "A has a numerical kernel and f is not differentiable at 0; use power_approx"
            )
    E_hat = _to_basis(dec.U, E)
    if f is np.sqrt:
        dd = sqrt_divided_difference(alpha)
    else:
        dd = divided_difference(f, f_prime, alpha, pair_tol)
    with np.errstate(all="ignore"):
        fa = np.asarray(f(alpha), dtype=float)
    if not np.all(np.isfinite(fa)):
        raise PreconditionError("f is not finite on the spectrum of A")
    return from_spectrum(dec.U, fa) + _from_basis(dec.U, dd.entries * E_hat)


def power_function(s: float) -> tuple[Callable, Callable]:
    """``(t**s, s t**(s-1))`` as a pair usable with :func:`dk_approx`."""
    if s == 0.5:
        return np.sqrt, lambda t: 0.5 / np.sqrt(t)
    return (lambda t: np.power(t, s)), (lambda t: s * np.power(t, s - 1))


def _power_assembly(
    dec: SpectralDecomposition,
    E,
    s: float,
    *,
    psd_tol: float,
    rank_tol: float,
    pair_tol: float,
) -> tuple[np.ndarray, np.ndarray, SchurSplit]:
    E = as_hermitian(E)
    alpha = clip_psd(dec.alpha, psd_tol=psd_tol)
    n = alpha.shape[0]
    l = numerical_rank(alpha, rank_tol)
    alpha = np.concatenate([alpha[:l], np.zeros(n - l)])
    E_hat = _to_basis(dec.U, E)
    split = schur_split(alpha, E_hat, l, psd_tol=psd_tol)
    if split.m:
        d = np.linalg.eigvalsh(split.D)
        if d.min() < -psd_tol * max(1.0, float(alpha.max(initial=0.0))):
            raise NotPSDError(
                f"A + E is not positive semi-definite: Schur complement has eigenvalue {d.min():.3e}"
            )
    D_pow = matrix_power(split.D, s, psd_tol=np.inf) if split.m else split.D
    K = np.block([[split.B, split.C], [split.C.conj().T, D_pow]])
    dd = power_dd_one(s, alpha, pair_tol)
    base = from_spectrum(dec.U, alpha**s)
    return base, _from_basis(dec.U, dd.entries * K), split


def power_approx(
    dec: SpectralDecomposition,
    E,
    p: float,
    *,
    psd_tol: float = PSD_TOL,
    rank_tol: float = RANK_TOL,
    pair_tol: float = PAIR_TOL,
) -> PowerApproxResult:
    """First-order approximation of ``(A + E)**(1/p)`` for PSD, possibly singular ``A``.

    The correction is ``U ([t**(1/p), alpha]_1 o [[B, C], [C*, D**(1/p)]]) U*`` with
    ``(B, C, D)`` the Schur split of ``U* E U``.  It is linear in ``B, C`` and the
    only non-linear piece is ``D**(1/p)``.  The error is ``O(|E|**r)`` with
    ``r = min(1 + 1/p, 3/p)`` for ``1 < p < 3``; for ``p >= 3`` the formula is still
    evaluated but ``expected_order`` is ``None``.
    """
    if not p > 1:
        raise PreconditionError(f"p must exceed 1, got {p}; use power_approx_s for s >= 1")
    base, term, split = _power_assembly(
        dec, E, 1.0 / p, psd_tol=psd_tol, rank_tol=rank_tol, pair_tol=pair_tol
    )
    order = min(1 + 1 / p, 3 / p) if p < 3 else None
    return PowerApproxResult(base, term, split, p, order)


def power_approx_s(
    dec: SpectralDecomposition,
    E,
    s: float,
    *,
    psd_tol: float = PSD_TOL,
    rank_tol: float = RANK_TOL,
    pair_tol: float = PAIR_TOL,
) -> PowerApproxResult:
    """Same assembly as :func:`power_approx` for ``(A + E)**s`` with ``s > 1``."""
    if not s > 1:
        raise PreconditionError(f"s must exceed 1, got {s}; use power_approx with p = 1/s")
    base, term, split = _power_assembly(
        dec, E, s, psd_tol=psd_tol, rank_tol=rank_tol, pair_tol=pair_tol
    )
    return PowerApproxResult(base, term, split, s, 2.0)


def modulus_term(V: np.ndarray, split: ModulusSplit) -> np.ndarray:
    """Correction ``V [[Xi o (S Z11 + Z11* S), Z12], [Z12*, |Z22|]] V*``.

    ``split.Z21`` is never read.
    """
    l = split.l
    S = split.sigma_plus
    K = np.zeros((l + split.m, l + split.m), dtype=np.complex128)
    if l:
        Xi = xi_sigma_plus(S).entries
        K[:l, :l] = Xi * (S[:, None] * split.Z11 + split.Z11.conj().T * S[None, :])
    if split.m:
        K[:l, l:] = split.Z12
        K[l:, :l] = split.Z12.conj().T
        K[l:, l:] = matrix_modulus(split.Z22)
    return _from_basis(V, K)


def modulus_approx(X, Z, *, rank_tol: float = RANK_TOL) -> ModulusApproxResult:
    """First-order approximation of ``|X + Z|`` for a general square ``X``; error ``O(|Z|**1.5)``."""
    dec, split = modulus_split(X, Z, rank_tol)
    sigma = np.concatenate([split.sigma_plus, np.zeros(split.m)])
    base = from_spectrum(dec.V, sigma)
    return ModulusApproxResult(base, modulus_term(dec.V, split), split)


def modulus_approx_psd(
    X, Z, *, psd_tol: float = PSD_TOL, rank_tol: float = RANK_TOL
) -> ModulusApproxResult:
    """``|X + Z| ~ X + V [[Z11, Z12], [Z21, |Z22|]] V*`` for PSD ``X`` and Hermitian ``Z``.

    Here ``Z_hat = V* Z V`` in the eigenbasis of ``X``.
    """
    dec = eigh(X)
    alpha = clip_psd(dec.alpha, psd_tol=psd_tol)
    Z = as_hermitian(Z)
    n = alpha.shape[0]
    l = numerical_rank(alpha, rank_tol)
    alpha = np.concatenate([alpha[:l], np.zeros(n - l)])
    Zh = _to_basis(dec.U, Z)
    K = Zh.copy()
    if n - l:
        K[l:, l:] = matrix_modulus(Zh[l:, l:])
    split = ModulusSplit(alpha[:l], Zh[:l, :l], Zh[:l, l:], Zh[l:, :l], Zh[l:, l:])
    return ModulusApproxResult(from_spectrum(dec.U, alpha), _from_basis(dec.U, K), split)


def abs_sorted_eigh(X, *, hermitian_tol: float = HERMITIAN_TOL) -> SpectralDecomposition:
    """Eigendecomposition of Hermitian ``X`` ordered by ``|alpha|`` descending.

    Ties in ``|alpha|`` put the nonnegative eigenvalue first.  The columns of ``U``
    are then the right singular vectors ``V`` of ``X`` and ``sigma = |alpha|``.
    """
    dec = eigh(X, hermitian_tol=hermitian_tol)
    order = np.lexsort((dec.alpha < 0, -np.abs(dec.alpha)))
    return SpectralDecomposition(U=dec.U[:, order], alpha=dec.alpha[order])


def modulus_approx_invertible(
    X, Z, *, rank_tol: float = RANK_TOL
) -> ModulusApproxResult:
    """``|X + Z| ~ |X| + V (Xi o Z_hat) V*`` for invertible Hermitian ``X``, Hermitian ``Z``.

    ``Xi[i, j] = (a_i + a_j) / (sigma_i + sigma_j)`` has entries of modulus at most 1.
    """
    dec = abs_sorted_eigh(X)
    Z = as_hermitian(Z)
    sigma = np.abs(dec.alpha)
    if sigma.size and not sigma.min() > rank_tol * max(1.0, float(sigma.max())):
        raise PreconditionError(f"X is singular to working precision (min |eigenvalue| {sigma.min():.3e})")
    Xi = xi_sigma_alpha(dec.alpha, sigma).entries
    Zh = _to_basis(dec.U, Z)
    return ModulusApproxResult(from_spectrum(dec.U, sigma), _from_basis(dec.U, Xi * Zh), None)
