"""Alphabets of Gaussian integers: membership, density, box dimension, primes.

A continued-fraction alphabet is a set of Gaussian integers with positive
real part.  Dense alphabets (the whole half-plane lattice, or the lattice with
finitely many letters removed) have upper density 1 and box dimension 2.
Sparse ones such as the powers of 2 have density 0 and box dimension near 0.
"""
import math

from porocf.gaussian import (FULL_E, CoFinite, Finite, Powers, PrimeSector, SquareWindow,
                             alphabet_contains, count_in_linf_ball, letters_array,
                             upper_boxdim_curve, upper_density_curve)

print("1+i in E minus {1}:", alphabet_contains(CoFinite([1]), 1 + 1j))
print("1 in E minus {1}:  ", alphabet_contains(CoFinite([1]), 1))

# The sup-norm ball around 1 of radius R holds exactly (R+1)(2R+1) letters of E.
for R in (1, 3, 10):
    print(f"R={R:3d}: count {count_in_linf_ball(FULL_E, R)}  formula {(R + 1) * (2 * R + 1)}")

Rs = [10, 100, 1000]
for name, spec in [("E", FULL_E), ("E minus 10 letters", CoFinite([1, 2, 3, 4, 5, 6, 7, 8, 9, 10])),
                   ("powers of 2", Powers(2)), ("{1, 2, 1+i}", Finite([1, 2, 1 + 1j]))]:
    dens = upper_density_curve(spec, Rs)
    print(f"density of {name:20s}", [round(float(v), 4) for v in dens.values])

full = upper_boxdim_curve(FULL_E, [16, 256, 4096], SquareWindow(complex(5000, 0), 16))
sparse = upper_boxdim_curve(Powers(2), [16, 256, 4096, 65536], SquareWindow(complex(2**20, 0), 2**21))
print("box-dimension curve of E:          ", [round(float(v), 3) for v in full.values])
print("box-dimension curve of powers of 2:", [round(float(v), 3) for v in sparse.values])

# Gaussian primes in the right half-plane: about 2X/log X of them have norm <= X.
X = 10**6
re, im = letters_array(PrimeSector(-math.pi / 2, math.pi / 2, (), math.isqrt(X)))
n = int(((re.astype(int) ** 2 + im.astype(int) ** 2) <= X).sum())
print(f"Gaussian primes with re > 0 and norm <= {X}: {n}  (2X/log X = {2 * X / math.log(X):.0f})")
