"""
Fractional powers of singular matrices
======================================

When ``A`` has a kernel the derivative of ``t**(1/p)`` blows up at zero, so the
Daleckii-Krein formula does not apply.  The singular approximation keeps a
nonlinear Schur-complement block and still beats first order.
"""

import numpy as np

from matperturb import InstanceSpec, KernelPresentError, dk_approx, eigh, power_approx, random_instance, run_campaign
from matperturb.core import matrix_power

# a rank-3 PSD matrix of size 6 and a direction keeping A + tE PSD
inst = random_instance(InstanceSpec(n=6, rank=3, seed=7))
A, E = inst
dec = eigh(A)

#%%
# The smooth formula refuses to run on a kernel.
try:
    dk_approx(dec, E, np.sqrt, lambda x: 0.5 / np.sqrt(x))
except KernelPresentError as exc:
    print("dk_approx:", exc)

#%%
# The singular approximation of ``(A + tE)**(1/2)``.
print(f"\n{'t':>10} {'error':>12}")
ts = 0.1 * 2.0 ** -np.arange(10)
errs = []
for t in ts:
    res = power_approx(dec, t * E, 2)
    errs.append(np.linalg.norm(matrix_power(A + t * E, 0.5) - res.approximation, 2))
    print(f"{t:10.2e} {errs[-1]:12.3e}")
slope = np.polyfit(np.log(ts), np.log(errs), 1)[0]
print(f"observed order {slope:.3f}, guaranteed {res.expected_order:.3f}")

#%%
# Campaigns over random instances for several roots.
for p in (1.5, 2.0, 2.5):
    reports = run_campaign("power_p", 6, 3, {"p": p}, trials=10, seed=0)
    slopes = [r.fitted_slope for r in reports]
    print(f"p={p}: slopes {min(slopes):.3f}..{max(slopes):.3f}, bound {reports[0].expected_order:.3f}")
