"""Pressure, the Bowen parameter and regularity.

Z_n(t) sums the t-th powers of the largest derivatives of all words of
length n.  log Z_n(t) / n bounds the pressure from above, and subtracting
t log 4 / n gives a lower bound, so bisection on each bound brackets the zero
of the pressure, which is the Hausdorff dimension of the limit set.
"""
import math

from porocf.ccf import moran_dimension
from porocf.gaussian import FULL_E, Finite, Powers
from porocf.pressure import BracketError, bowen_bracket, classify_regularity, pressure_bounds

b = bowen_bracket([1 / 3, 1 / 3], 4)
print(f"middle-thirds Cantor set: [{b.t_lo:.7f}, {b.t_hi:.7f}]  exact {math.log(2) / math.log(3):.7f}")
print("Moran equation for ratios (1/2, 1/4, 1/4):", moran_dimension([0.5, 0.25, 0.25]))

# phi_1 has derivative 1 at 0, so for alphabets containing 1 the depth-1 upper
# bound stays positive on [0, 2]; brackets start at depth 2
F = Finite([1, 2])
try:
    bowen_bracket(F, 1)
except BracketError as exc:
    print("depth 1:", exc, exc.endpoint_pressures)
for n in (2, 4, 6, 8):
    b = pressure_bounds(F, n, 0.5)
    br = bowen_bracket(F, n)
    print(f"n={n}: P(1/2) in [{b.lower:.4f}, {b.upper:.4f}]   dimension in [{br.t_lo:.5f}, {br.t_hi:.5f}]")

for name, spec in [("{1,2}", F), ("E", FULL_E), ("powers of 2", Powers(2))]:
    r = classify_regularity(spec)
    print(f"{name:12s} {r.verdict:20s} theta={r.theta_estimate}  ({r.note})")
