# %% [markdown]
# # The constant C_hat and the cut-and-reconnect construction
#
# Run cell by cell (any percent-format editor) or as a plain script.
# Writes `construction.svg` next to the working directory.

# %%
import math

import numpy as np

from flatreach.bound import build_construction, c_of_theta, optimize_c, verify_improvement
from flatreach.svg import emit_svg

# %% [markdown]
# C(theta) on the open interval (3 pi/2, 2 pi). It starts at 0, rises to a
# single maximum and falls to -1/4.

# %%
theta = np.linspace(1.5 * math.pi + 1e-6, 2 * math.pi - 1e-6, 9)
for t, c in zip(theta, c_of_theta(theta)):
    print(f"theta={t:.4f}  C={c:+.5f}")

c_hat, theta_star = optimize_c()
print("c_hat", c_hat, "theta_star", theta_star, "x' (lambda=1)", math.cos(theta_star))

# %% [markdown]
# The improvement test flips exactly at rho = C_hat / lambda.

# %%
lam = 1.0
for rho in (0.1, 0.2, c_hat - 1e-6, c_hat + 1e-6, 0.3):
    w = verify_improvement(lam, rho)
    print(f"rho={rho:.6f} holds={w.holds} lhs={w.lhs:.5f} rhs={w.rhs:.5f} margin={w.margin:+.2e}")

# %% [markdown]
# Regions R1, R2 and the worst-case S* at x' for a bottleneck half-width just
# below the threshold. The exact S* area stays under the butterfly bound.

# %%
reg = build_construction(lam, 0.9 * c_hat / lam, math.cos(theta_star) / lam)
print("area(S*) =", reg.sstar_area, "<= bound", reg.butterfly_bound)
print("track length =", reg.track_length, ">= 4x =", 4 * reg.x)
emit_svg("construction.svg", construction=reg)
