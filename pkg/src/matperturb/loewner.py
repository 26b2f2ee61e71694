"""Divided-difference (Loewner) matrices.

Every first-order formula in this package is a Hadamard product of one of these
matrices with a perturbation expressed in the eigen- or singular basis.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

from .core import PreconditionError

PAIR_TOL = 1e-12

Kind = Literal["general_f", "power_one", "xi_sigma_plus", "xi_sigma_alpha"]


@dataclass(frozen=True)
class DividedDifferenceMatrix:
    entries: np.ndarray
    kind: Kind

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def _symmetric(M: np.ndarray) -> np.ndarray:
    # mirror the upper triangle so the result is symmetric bit for bit
    return np.triu(M) + np.triu(M, 1).T


def _close_pairs(alpha: np.ndarray, pair_tol: float) -> np.ndarray:
    scale = 1.0 + (np.abs(alpha).max() if alpha.size else 0.0)
    return np.abs(alpha[:, None] - alpha[None, :]) <= pair_tol * scale


def divided_difference(
    f: Callable, f_prime: Callable, alpha, pair_tol: float = PAIR_TOL
) -> DividedDifferenceMatrix:
    """First divided differences ``[f, alpha]``.

    Entry ``(i, j)`` is ``(f(a_i) - f(a_j)) / (a_i - a_j)``, or ``f'(a_i)`` when
    ``a_i`` and ``a_j`` coincide to within ``pair_tol * (1 + max|a|)``.
    """
    alpha = np.asarray(alpha, dtype=float)
    close = _close_pairs(alpha, pair_tol)
    with np.errstate(all="ignore"):
        fa = np.asarray(f(alpha), dtype=float)
        dfa = np.asarray(f_prime(alpha), dtype=float)
        quotient = (fa[:, None] - fa[None, :]) / (alpha[:, None] - alpha[None, :])
    needed = close.any(axis=1)
    bad = needed & ~np.isfinite(dfa)
    if np.any(bad):
        raise PreconditionError(
            f"derivative is not finite at eigenvalue {alpha[np.argmax(bad)]!r}"
        )
    M = np.where(close, dfa[:, None], quotient)
    if not np.all(np.isfinite(M)):
        raise PreconditionError("divided differences are not finite; is f defined on the spectrum?")
    return DividedDifferenceMatrix(_symmetric(M), "general_f")


def sqrt_divided_difference(alpha) -> DividedDifferenceMatrix:
    """``1 / (sqrt(a_i) + sqrt(a_j))``, the cancellation-free form of ``[sqrt, alpha]``."""
    alpha = np.asarray(alpha, dtype=float)
    if np.any(alpha < 0):
        raise PreconditionError("sqrt divided differences need nonnegative eigenvalues")
    r = np.sqrt(alpha)
    denom = r[:, None] + r[None, :]
    if np.any(denom == 0):
        raise PreconditionError(
            "two zero eigenvalues give an infinite entry; use power_dd_one(0.5, alpha) instead"
        )
    return DividedDifferenceMatrix(_symmetric(1.0 / denom), "general_f")


def power_dd_one(s: float, alpha, pair_tol: float = PAIR_TOL) -> DividedDifferenceMatrix:
    """Divided differences of ``t**s`` with the value 1 on pairs of zero eigenvalues.

    Entries are the difference quotient when ``a_i != a_j``, ``s * a_i**(s-1)``
    when ``a_i == a_j > 0`` and 1 when ``a_i == a_j == 0``.  For ``s = 1/2`` the
    closed form ``1 / (sqrt(a_i) + sqrt(a_j))`` is used off the zero-zero block.
    """
    if not s > 0:
        raise PreconditionError(f"exponent must be positive, got {s}")
    alpha = np.asarray(alpha, dtype=float)
    if np.any(alpha < 0):
        raise PreconditionError("power divided differences need nonnegative eigenvalues")
    close = _close_pairs(alpha, pair_tol)
    scale = 1.0 + (alpha.max() if alpha.size else 0.0)
    zero = alpha <= pair_tol * scale
    zero_zero = zero[:, None] & zero[None, :]
    with np.errstate(all="ignore"):
        if s == 0.5:
            r = np.sqrt(alpha)
            M = 1.0 / (r[:, None] + r[None, :])
        else:
            p = alpha**s
            quotient = (p[:, None] - p[None, :]) / (alpha[:, None] - alpha[None, :])
            deriv = s * alpha ** (s - 1)
            M = np.where(close, deriv[:, None], quotient)
    M = np.where(zero_zero, 1.0, M)
    return DividedDifferenceMatrix(_symmetric(M), "power_one")


def xi_sigma_plus(sigma_plus) -> DividedDifferenceMatrix:
    """``1 / (sigma_i + sigma_j)`` over the positive singular values."""
    sigma_plus = np.asarray(sigma_plus, dtype=float)
    if np.any(sigma_plus <= 0):
        raise PreconditionError("xi_sigma_plus needs strictly positive singular values")
    return DividedDifferenceMatrix(
        _symmetric(1.0 / (sigma_plus[:, None] + sigma_plus[None, :])), "xi_sigma_plus"
    )


def xi_sigma_alpha(alpha, sigma) -> DividedDifferenceMatrix:
    """``(a_i + a_j) / (sigma_i + sigma_j)`` for invertible Hermitian ``X``, ``sigma = |alpha|``."""
    alpha = np.asarray(alpha, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    if np.any(sigma <= 0):
        raise PreconditionError("xi_sigma_alpha needs an invertible matrix (all sigma_i > 0)")
    if not np.allclose(np.abs(alpha), sigma, rtol=1e-12, atol=0.0):
        raise PreconditionError("sigma must equal |alpha| entrywise")
    M = _symmetric((alpha[:, None] + alpha[None, :]) / (sigma[:, None] + sigma[None, :]))
    assert np.all(np.abs(M) <= 1.0 + 1e-15)
    return DividedDifferenceMatrix(M, "xi_sigma_alpha")
