"""The alphabet criterion: empty discs B(y, theta R) near every letter.

For letter i and scale R <= kappa |i| we look for a centre y with
|y - i| <= R whose distance to the alphabet exceeds theta R.  Sparse
alphabets always have such holes.  Co-finite ones never do once theta R
exceeds half a lattice diagonal, and the search can prove that.
"""
from porocf.criterion import CriterionParams, criterion_scan, estimate_max_theta, find_hole
from porocf.gaussian import FULL_E, CoFinite, Finite, GaussianInt, Powers

print(find_hole(FULL_E, 20, 6, 0.4))
hit = find_hole(Powers(2), 2**10, 2**8, 0.1)
print("powers of 2 at i=1024, R=256:", hit.certificate)

letters = [GaussianInt(30, 2), GaussianInt(57, -4), GaussianInt(88, 9)]
params = CriterionParams(theta=0.4, kappa=0.3, rho=2.5)
rep = criterion_scan(CoFinite([1, 2, 3]), params, letters, scales_per_letter=3)
for row in rep.rows():
    print("  ", row)
print("co-finite verdict:", rep.verdict)

rep = criterion_scan(Finite([1, 2, 3 + 1j]), CriterionParams(0.1, 0.5), [1, 2, 3 + 1j], 3)
print("finite verdict:   ", rep.verdict)

print("largest dyadic theta, powers of 2:", estimate_max_theta(Powers(2), 0.25, [16, 64, 256, 1024], 3))
print("largest dyadic theta, single letter:", estimate_max_theta(Finite([1]), 0.5, [1], 2))
