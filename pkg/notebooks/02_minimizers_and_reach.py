# %% [markdown]
# # Flat norm minimizers of random blobs, and their reach
#
# For each blob and scale lambda: minimize, then compare every boundary
# component with the curvature cap lambda and the reach floor C_hat / lambda.
# Takes about a minute.

# %%
import numpy as np

from flatreach.bound import optimize_c
from flatreach.io import write_pgm
from flatreach.pipeline import PipelineConfig, run_verify
from flatreach.shapes import blob_mask

c_hat = optimize_c()[0]

# %%
rows = []
for seed in range(10):
    path = f"blob{seed}.pgm"
    write_pgm(path, blob_mask(np.random.default_rng(seed), 256, 1.0))
    for lam in (0.02, 0.05, 0.1):
        rep = run_verify(PipelineConfig(input_path=path, lam=lam))
        for comp in rep.components:
            rows.append((seed, lam, comp.max_curvature / lam, comp.reach_value * lam / c_hat, comp.reach_kind))
        if not rep.components:
            rows.append((seed, lam, np.nan, np.nan, "empty"))

# %% [markdown]
# kappa/lambda should stay below 1.1 and reach*lambda/C_hat above 0.9.
# At lambda = 0.02 the blobs are smaller than the radius 2/lambda a disk
# needs to survive, so the minimizer is empty.

# %%
print(f"{'seed':>4} {'lambda':>6} {'k/lam':>7} {'reach*lam/C':>12} kind")
for seed, lam, k, r, kind in rows:
    print(f"{seed:4d} {lam:6.2f} {k:7.3f} {r:12.3f} {kind}")
