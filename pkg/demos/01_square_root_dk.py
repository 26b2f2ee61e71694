"""
First-order square root of a positive definite matrix
======================================================

For an invertible positive definite ``A`` the square root is smooth, and the
Daleckii-Krein formula gives an error of order ``t**2`` for ``A + t E``.
"""

import numpy as np

from matperturb import dk_approx, eigh, matrix_power

rng = np.random.default_rng(1)
n = 5

# a random positive definite matrix with spectrum in [0.5, 2]
Q, _ = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
A = (Q * np.linspace(2.0, 0.5, n)) @ Q.conj().T
E = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
E = (E + E.conj().T) / 2
E /= np.linalg.norm(E, 2)

dec = eigh(A)
sqrt_prime = lambda x: 0.5 / np.sqrt(x)

#%%
# Halving ``t`` should divide the error by about four.
print(f"{'t':>10} {'error':>12} {'ratio':>8}")
prev = None
for t in 0.1 * 2.0 ** -np.arange(8):
    approx = dk_approx(dec, t * E, np.sqrt, sqrt_prime)
    err = np.linalg.norm(matrix_power(A + t * E, 0.5) - approx, 2)
    print(f"{t:10.2e} {err:12.3e} {'' if prev is None else f'{prev / err:8.2f}'}")
    prev = err

#%%
# The cube root uses the same call with a different function.
cbrt = lambda x: np.cbrt(x)
cbrt_prime = lambda x: np.cbrt(x) / (3 * x)
t = 1e-3
err = np.linalg.norm(matrix_power(A + t * E, 1 / 3) - dk_approx(dec, t * E, cbrt, cbrt_prime), 2)
print(f"\ncube root error at t={t}: {err:.2e}")
