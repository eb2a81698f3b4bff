"""Porosity of a sampled limit set.

por(E, x, r) is the largest c such that some ball of radius c r inside
B(x, r) misses E.  On a finite sample with covering radius eps the estimate
is good to about eps / r, so profiles stop at scales below 2 eps.
"""
import numpy as np

from porocf.ccf import fixed_point, sample_limit_set
from porocf.gaussian import Finite
from porocf.porosity import (PointCloud, build_index, mean_porosity_stat, por_directed,
                             por_estimate, porosity_profile)

# a single point: the best hole has radius r/2
idx = build_index(PointCloud([0]))
print("por({0}, 0, 1) =", por_estimate(idx, 0, 1))

# a line through x: holes sit beside it, none along it
line = build_index(PointCloud(1j * np.linspace(-2, 2, 4001)))
print("line, free direction:     ", por_directed(line, 0, 1, 1))
print("line, blocked direction:  ", por_directed(line, 0, 1, 1j))

cloud = sample_limit_set(Finite([1, 2, 1 + 1j, 1 - 1j]), 6)
print(f"{len(cloud.points)} samples, covering radius {cloud.covering_radius:.2e}")
x = fixed_point([1])
prof = porosity_profile(build_index(cloud), x, 1.0, 12)
for (j, p), band in zip(prof.values, prof.resolution_bound):
    print(f"  j={j:2d}  r=2^-{j}  por={p:.4f} +- {band:.4f}")
if prof.truncated:
    print("  (profile stops where r <= 2 * covering radius)")

for beta in (0.1, 0.3, 0.5):
    print(f"fraction of scales with por > {beta}:", mean_porosity_stat(prof, beta).lower_estimate)
