"""An infinite similarity system whose limit set is not porous at 0.

Centres fill the circles |z| = 1/j so densely that every ball near 0 meets
the limit set, while the ratios are small enough that sum r^h <= 1.  Adding
a few completion maps makes the sum exactly 1, so the Moran dimension is h
for any target h in (0, 2).
"""
import numpy as np

from porocf.ccf import build_nonporous_similarity_system, moran_dimension
from porocf.porosity import PointCloud, build_index, por_estimate

for h in (0.5, 1.0, 1.5):
    maps = build_nonporous_similarity_system(h, j_max=10, complete=True)
    print(f"h={h}: {len(maps)} maps, Moran dimension {moran_dimension(maps):.8f}")

# the truncation leaves the disc |z| < 1/80 empty, so only scales well above it are meaningful
maps = build_nonporous_similarity_system(1.0, j_max=80)
centres = PointCloud(np.array([m.translation for m in maps] + [0j]))
idx = build_index(centres)
for r in (0.2, 0.1):
    print(f"por(centres, 0, {r}) = {por_estimate(idx, 0, r)[0]:.3f}")
