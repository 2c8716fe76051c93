"""Capacity traces on random covariance splits, and the temperature trade-off."""

import numpy as np

from innovcap import geometry as geo
from innovcap import spectral
from innovcap.experiments import random_split

rng = np.random.default_rng(0)

# C_ip + C_i equals rank(Sigma) for any PSD split
for d in (3, 8, 15):
    sp = random_split(rng, d)
    c_ip, c_i = geo.capacity_traces(sp)
    print(f"d={d:2d}  C_ip={c_ip:.4f}  C_i={c_i:.4f}  sum={c_ip + c_i:.10f}  rank={spectral.rank_info(sp.Sigma).rank}")

# scaling the noise by T moves capacity from the predictable to the innovation sector
sp = random_split(rng, 6)
spec = geo.pencil_spectrum(sp.S, sp.N)
print("\n    T    C_ip    C_i")
for T in (0.0, 0.1, 0.5, 1.0, 2.0, 10.0):
    c_ip, c_i = geo.shrinkage_capacities(spec, T)
    print(f"{T:5.1f}  {c_ip:.4f}  {c_i:.4f}")
