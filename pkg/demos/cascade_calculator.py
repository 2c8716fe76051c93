"""Sensitivity decay through a contracting cascade and the resulting entropy floor."""

from innovcap import geometry as geo

p = geo.CascadeParams(theta=0.25, B=2.0, L_depth=10, n_input=10, poly_coeffs=(0.0, 1.0), k_alphabet=4, H_pi=2.0)
delta = geo.cascade_sensitivity(p)
print(f"delta_L = n (B theta)^L = {delta:.6e}  vacuous={geo.cascade_is_vacuous(p)}")
print(f"entropy floor = {geo.cascade_entropy_floor(p, delta):.6f} bits")
for d in (0.01, 0.1, 0.5):
    print(f"f_4({d}) = {geo.f_k(d, 4):.6f}")
