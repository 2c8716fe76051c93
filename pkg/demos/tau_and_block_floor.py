"""Whitened innovation geometry: tau-subspaces and the block covariance floor."""

import numpy as np

from innovcap import geometry as geo
from innovcap.experiments import random_split

rng = np.random.default_rng(1)
g = geo.whitened_geometry(random_split(rng, 10))
print(f"r={g.r}  C_i={g.C_i:.4f}")
for tau in (0.1, 0.3, 0.5, 0.7, 0.9):
    ts = geo.tau_subspace(g, tau)
    lo, hi = ts.bounds
    print(f"tau={tau:.1f}  L_tau={ts.L_tau}  bounds=[{lo:.3f}, {hi:.3f}]  floor min eig={ts.floor_min_eig:.4f}")

# AR(1): the block covariance stays above tau - 2 eps for every block length
for rho in (0.05, 0.1, 0.2):
    K = geo.ar1_autocovs(rho, 64)
    fl = [geo.block_floor_check(K, b, 1.0) for b in (1, 8, 64)]
    print(f"rho={rho:.2f}  floor={fl[-1].floor:.4f}  lambda_min(b=1,8,64)=" + ", ".join(f"{f.lambda_min:.4f}" for f in fl))
