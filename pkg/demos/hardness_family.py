"""Packing family over an equal-mass partition, its divergences and the Fano curve."""

from innovcap import hardness as hd

cloud, fam = hd.make_family(16, 0.5, n_samples=20000, seed=20240605)
s = hd.family_summary(fam, [0])
print(f"|V|={fam.size}  code distance={fam.code.min_distance}  min TV={s['min_tv']:.4f}  max KL={s['max_kl']:.4f}")

tv, kl = hd.monte_carlo_tv_kl(fam, cloud, 0, 1, 100000, seed=7)
pair = hd.pairwise_tv_kl(fam, fam.code.codewords[0], fam.code.codewords[1])
print(f"pair (0,1): TV closed form {pair.tv:.4f}  Monte Carlo {tv:.4f}")

for fb in hd.fano_curve(fam, [0, 1, 2, 3, 5]):
    print(f"n={fb.n:2d}  test error >= {fb.test_error_lb:.4f}")
print("samples for 5% risk:", hd.sample_complexity(fam, 0.05))
