"""
Spectral projectors and a Hoelder bound
=======================================

Splitting the spectrum of a perturbed singular matrix into a large and a small
cluster gives projectors whose first-order behaviour drives the power
approximations.  The last cell checks the Hoelder-type bound on ``p``-th roots.
"""

from matperturb import lemma_remark_check, run_campaign, wihler_sweep

#%%
# Observed orders of the projector statements over 10 random instances.
for problem, params in [
    ("projector_lemma_gt", {}),
    ("projector_lemma_gt1", {"p": 2.0}),
    ("projector_lemma_gt2_P1ZP0", {}),
    ("projector_lemma_gt2_P1ZP1", {}),
]:
    reports = run_campaign(problem, 6, 3, params, trials=10, seed=0)
    print(f"{problem:28s} min slope {min(r.fitted_slope for r in reports):.3f}, bound {reports[0].expected_order:.3f}")

#%%
# Without the compression the small-cluster term only decays like t**(1/p).
print()
for rem in lemma_remark_check([1.5, 2.0, 3.0], n=6, rank=3, seed=0):
    print(f"p={rem.p}: structured {rem.structured_slope:.3f}, generic {rem.generic_slope:.3f}")

#%%
# |B**(1/p) - A**(1/p)|_F <= n**((p-1)/2) |B - A|_F**(1/p) over random PSD pairs.
for p in (1.5, 2.0, 3.0):
    sweep = wihler_sweep(4, p, trials=300, seed=0)
    print(f"p={p}: {sweep.violations} violations, max ratio {sweep.max_ratio:.4f}")
