"""
Perturbing the matrix modulus
=============================

``|X| = (X* X)**(1/2)`` for a rank-deficient ``X``.  The approximation is built
from the blocks of ``U* Z V`` in the singular basis of ``X`` and never looks at
the lower-left block.
"""

import numpy as np

from matperturb import matrix_modulus, modulus_approx, modulus_approx_invertible, modulus_approx_psd

rng = np.random.default_rng(3)
n, rank = 6, 3
X = (rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))) @ (
    rng.standard_normal((rank, n)) + 1j * rng.standard_normal((rank, n))
)
Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
Z /= np.linalg.norm(Z, 2)

#%%
# Error against the exact modulus.  Order 3/2 is guaranteed, about 2 is typical.
print(f"{'t':>10} {'error':>12}")
ts = 0.1 * 2.0 ** -np.arange(10)
errs = [np.linalg.norm(matrix_modulus(X + t * Z) - modulus_approx(X, t * Z).approximation, 2) for t in ts]
for t, e in zip(ts, errs):
    print(f"{t:10.2e} {e:12.3e}")
print(f"observed order {np.polyfit(np.log(ts), np.log(errs), 1)[0]:.3f}")

#%%
# Special cases agree with the general formula.
H = (Z + Z.conj().T) / 2
P = X.conj().T @ X
print("\nPSD X:", np.abs(modulus_approx_psd(P, 1e-2 * H).approximation - modulus_approx(P, 1e-2 * H).approximation).max())
Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
S = (Q * [2.0, -1.5, 1.0, -0.8, 0.6, -0.5]) @ Q.T
print(
    "invertible Hermitian X:",
    np.abs(modulus_approx_invertible(S, 1e-2 * H).approximation - modulus_approx(S, 1e-2 * H).approximation).max(),
)
