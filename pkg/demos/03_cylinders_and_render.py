"""Cylinder discs of a finite continued-fraction system and a rendering of its limit set.

Each word w gives the disc phi_w(X), X the closed disc of radius 1/2 about
1/2, computed in closed form from the 2x2 integer matrix of the word.  The
union over all words of a fixed length covers the limit set.  Run with an
output directory argument to choose where the SVG and PPM files go.
"""
import sys
from pathlib import Path

from porocf.ccf import Disc, enumerate_cylinders, fixed_point
from porocf.gaussian import Finite
from porocf.render import render_limit_set

spec = Finite([1 + 1j, 1 - 1j, 2 + 1j, 2 - 1j, 1 + 2j, 1 - 2j, 3])
out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo-out")
out.mkdir(parents=True, exist_ok=True)

for depth in (1, 3, 5):
    cyl = enumerate_cylinders(spec, depth)
    print(f"depth {depth}: {len(cyl)} discs, largest radius {max(c.image.radius for c in cyl):.3e}")

cyl = enumerate_cylinders(spec, 5)
first = cyl[0]
print("first word", first.label(), "disc", first.image, "max |phi_w'| on X", first.sup_deriv)
print("fixed point of the word (1+i):", fixed_point([1 + 1j]))

render_limit_set(cyl, 600, 600, Disc(0.5 + 0j, 0.5), out / "limit_set.svg", out / "limit_set.ppm")
print("wrote", out / "limit_set.svg", "and", out / "limit_set.ppm")
