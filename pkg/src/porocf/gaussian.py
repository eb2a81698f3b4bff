"""Gaussian-integer alphabets, primality, densities and box-counting statistics.

Letters live in ``E = {m + n i : m >= 1, n in Z}``.  An alphabet is one of
the :class:`Alphabet` variants below; infinite variants are only ever
enumerated inside a disc of radius ``truncation_norm``.
"""
from __future__ import annotations

import math
import re as _re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "GaussianInt", "as_gaussian", "is_in_E", "gaussian_is_prime", "gaussian_prime_mask",
    "Alphabet", "Finite", "CoFinite", "PrimeSector", "Powers", "Predicate", "FULL_E",
    "TailBound", "truncation_tail", "alphabet_contains", "enumerate_truncated", "letters_array",
    "count_in_linf_ball", "count_in_disc", "SquareWindow", "CountCurve",
    "upper_density_curve", "box_count_max", "upper_boxdim_curve",
]

MAX_NORM = 2**64          # primality is refused at or above this norm
_SIEVE_LIMIT = 400_000_000


@dataclass(frozen=True, order=True, slots=True)
class GaussianInt:
    re: int
    im: int = 0

    def __post_init__(self):
        object.__setattr__(self, "re", int(self.re))
        object.__setattr__(self, "im", int(self.im))

    def __add__(self, other):
        other = as_gaussian(other)
        return GaussianInt(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = as_gaussian(other)
        return GaussianInt(self.re - other.re, self.im - other.im)

    def __neg__(self):
        return GaussianInt(-self.re, -self.im)

    def __mul__(self, other):
        other = as_gaussian(other)
        return GaussianInt(self.re * other.re - self.im * other.im,
                           self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def conj(self) -> "GaussianInt":
        return GaussianInt(self.re, -self.im)

    @property
    def norm2(self) -> int:
        """Squared Euclidean norm ``re**2 + im**2`` (exact)."""
        return self.re * self.re + self.im * self.im

    def __abs__(self) -> float:
        return math.hypot(self.re, self.im)

    def __complex__(self) -> complex:
        return complex(self.re, self.im)

    def arg(self) -> float:
        return math.atan2(self.im, self.re)

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return {1: "i", -1: "-i"}.get(self.im, f"{self.im}i")
        sign = "+" if self.im > 0 else "-"
        mag = "" if abs(self.im) == 1 else abs(self.im)
        return f"{self.re}{sign}{mag}i"


_GI_PATTERN = _re.compile(r"^\s*([+-]?\d+)?\s*(?:([+-])\s*(\d*)\s*i)?\s*$")
_GI_PURE_IM = _re.compile(r"^\s*([+-]?\d*)\s*i\s*$")


def as_gaussian(z) -> GaussianInt:
    """Coerce ``z`` (GaussianInt, int, integral complex, pair or string like ``"2-3i"``)."""
    if isinstance(z, GaussianInt):
        return z
    if isinstance(z, (int, np.integer)):
        return GaussianInt(int(z), 0)
    if isinstance(z, (complex, float, np.complexfloating, np.floating)):
        zc = complex(z)
        if zc.real != int(zc.real) or zc.imag != int(zc.imag):
            raise ValueError(f"{z!r} is not a Gaussian integer")
        return GaussianInt(int(zc.real), int(zc.imag))
    if isinstance(z, tuple) and len(z) == 2:
        return GaussianInt(int(z[0]), int(z[1]))
    if isinstance(z, str):
        m = _GI_PURE_IM.match(z)
        if m:
            coef = m.group(1)
            im = int(coef + "1") if coef in ("", "+", "-") else int(coef)
            return GaussianInt(0, im)
        m = _GI_PATTERN.match(z)
        if m and (m.group(1) or m.group(2)):
            re_part = int(m.group(1) or 0)
            im_part = 0
            if m.group(2):
                im_part = int(m.group(3) or 1) * (-1 if m.group(2) == "-" else 1)
            return GaussianInt(re_part, im_part)
        raise ValueError(f"cannot parse Gaussian integer from {z!r}")
    raise TypeError(f"cannot interpret {type(z).__name__} as a Gaussian integer")


def is_in_E(z) -> bool:
    return as_gaussian(z).re >= 1


# ---------------------------------------------------------------------------
# primality

def _check_norm(n: int):
    if n >= MAX_NORM:
        raise ValueError(f"norm {n} beyond the supported 64-bit range")


def gaussian_is_prime(z) -> bool:
    """Gaussian primality.

    On the axes the nonzero component must be a rational prime congruent to
    3 mod 4; off the axes the norm must be a rational prime.  Units are not
    prime.
    """
    from sympy import isprime

    z = as_gaussian(z)
    if z.re == 0 and z.im == 0:
        raise ValueError("0 has no primality")
    n = z.norm2
    _check_norm(n)
    if z.re == 0 or z.im == 0:
        p = abs(z.re + z.im)
        return p % 4 == 3 and bool(isprime(p))
    return bool(isprime(n))


@lru_cache(maxsize=4)
def _sieve(limit: int) -> np.ndarray:
    is_p = np.ones(limit + 1, dtype=bool)
    is_p[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_p[p]:
            is_p[p * p::p] = False
    return is_p


def _prime_table(n: int) -> np.ndarray:
    if n > _SIEVE_LIMIT:
        raise ValueError(f"sieve bound {n} exceeds {_SIEVE_LIMIT}")
    # round up so nearby requests share one cached table
    size = 1 << max(10, int(n).bit_length())
    return _sieve(min(size, _SIEVE_LIMIT))


def gaussian_prime_mask(re, im) -> np.ndarray:
    """Vectorized :func:`gaussian_is_prime` over integer arrays (sieve based)."""
    re = np.asarray(re, dtype=np.int64)
    im = np.asarray(im, dtype=np.int64)
    re, im = np.broadcast_arrays(re, im)
    norm = re * re + im * im
    if norm.size == 0:
        return np.zeros(norm.shape, dtype=bool)
    on_axis = (re == 0) | (im == 0)
    axis_val = np.abs(re + im)
    table = _prime_table(int(max(norm.max(), axis_val.max(), 2)))
    off = table[norm]
    on = table[axis_val] & (axis_val % 4 == 3)
    return np.where(on_axis, on, off)


# ---------------------------------------------------------------------------
# alphabets

@dataclass(frozen=True)
class TailBound:
    """Error accounting for an alphabet truncated at ``norm``.

    ``tail_sum`` is ``sum over omitted letters of 4|e|^-2`` (may be infinite).
    ``tail_radius`` bounds the distance from any point of the full limit set
    to the limit set of the truncated system.
    """
    norm: float
    omitted: bool
    tail_sum: float
    tail_radius: float


class Alphabet:
    """Base class for alphabets ``I`` contained in ``E``."""

    truncation_norm: float
    sparse = False          # sparse variants enumerate explicitly instead of masking grids

    def contains(self, z) -> bool:
        z = as_gaussian(z)
        return bool(self.mask(np.array([z.re]), np.array([z.im]))[0])

    def mask(self, re, im) -> np.ndarray:
        raise NotImplementedError

    def letters_upto(self, norm: float) -> list[GaussianInt]:
        """Sparse variants: all letters with ``|z| <= norm``."""
        raise NotImplementedError

    def is_finite(self) -> bool:
        return False

    def box_points(self, xlo: int, xhi: int, ylo: int, yhi: int) -> tuple[np.ndarray, np.ndarray]:
        """Letters inside the closed integer box, as ``(re, im)`` arrays."""
        xlo = max(int(xlo), 1)
        if xhi < xlo or yhi < ylo:
            return np.zeros(0, np.int64), np.zeros(0, np.int64)
        if self.sparse:
            bound = math.hypot(max(abs(xlo), abs(xhi)), max(abs(ylo), abs(yhi)))
            pts = [z for z in self.letters_upto(bound)
                   if xlo <= z.re <= xhi and ylo <= z.im <= yhi]
            return (np.array([z.re for z in pts], dtype=np.int64),
                    np.array([z.im for z in pts], dtype=np.int64))
        m = self.box_mask(xlo, xhi, ylo, yhi)
        ix, iy = np.nonzero(m)
        return ix.astype(np.int64) + xlo, iy.astype(np.int64) + ylo

    def box_mask(self, xlo: int, xhi: int, ylo: int, yhi: int) -> np.ndarray:
        """Occupancy grid of shape ``(xhi-xlo+1, yhi-ylo+1)``; rows are real parts."""
        xs = np.arange(xlo, xhi + 1, dtype=np.int64)[:, None]
        ys = np.arange(ylo, yhi + 1, dtype=np.int64)[None, :]
        return np.broadcast_to(self.mask(xs, ys), (xs.shape[0], ys.shape[1]))

    def describe(self) -> dict:
        raise NotImplementedError


def _check_truncation(n):
    if not n >= 1:
        raise ValueError("truncation_norm must be >= 1")


def _isin(re, im, letters: tuple[GaussianInt, ...]) -> np.ndarray:
    re = np.asarray(re, dtype=np.int64)
    im = np.asarray(im, dtype=np.int64)
    re, im = np.broadcast_arrays(re, im)
    out = np.zeros(re.shape, dtype=bool)
    for z in letters:
        out |= (re == z.re) & (im == z.im)
    return out


@dataclass(frozen=True)
class Finite(Alphabet):
    letters: tuple[GaussianInt, ...]
    truncation_norm: float = math.inf
    sparse = True

    def __post_init__(self):
        letters = [as_gaussian(z) for z in self.letters]
        if len(set(letters)) != len(letters):
            raise ValueError("finite alphabet letters must be distinct")
        if not letters:
            raise ValueError("finite alphabet must be nonempty")
        if not all(z.re >= 1 for z in letters):
            raise ValueError("letters must lie in E (real part >= 1)")
        object.__setattr__(self, "letters", tuple(sorted(letters)))
        _check_truncation(self.truncation_norm)

    def contains(self, z) -> bool:
        return as_gaussian(z) in self.letters

    def mask(self, re, im):
        return _isin(re, im, self.letters)

    def letters_upto(self, norm):
        return [z for z in self.letters if z.norm2 <= norm * norm]

    def is_finite(self):
        return True

    def describe(self):
        return {"kind": "finite", "letters": [str(z) for z in self.letters]}


@dataclass(frozen=True)
class CoFinite(Alphabet):
    excluded: tuple[GaussianInt, ...] = ()
    truncation_norm: float = 10.0

    def __post_init__(self):
        ex = [as_gaussian(z) for z in self.excluded]
        if len(set(ex)) != len(ex):
            raise ValueError("excluded letters must be distinct")
        if not all(z.re >= 1 for z in ex):
            raise ValueError("excluded letters must lie in E")
        object.__setattr__(self, "excluded", tuple(sorted(ex)))
        _check_truncation(self.truncation_norm)

    def contains(self, z):
        z = as_gaussian(z)
        return z.re >= 1 and z not in self.excluded

    def mask(self, re, im):
        re = np.asarray(re)
        return (re >= 1) & ~_isin(re, im, self.excluded)

    def describe(self):
        return {"kind": "cofinite", "excluded": [str(z) for z in self.excluded]}


FULL_E = CoFinite()


@dataclass(frozen=True)
class PrimeSector(Alphabet):
    """Gaussian primes ``w`` in ``E`` with ``arg w`` in ``[a, b)``, minus exclusions."""
    a: float = -math.pi / 2
    b: float = math.pi / 2
    excluded: tuple[GaussianInt, ...] = ()
    truncation_norm: float = 10.0

    def __post_init__(self):
        if not (-math.pi / 2 <= self.a < self.b <= math.pi / 2):
            raise ValueError("sector requires -pi/2 <= a < b <= pi/2")
        ex = [as_gaussian(z) for z in self.excluded]
        if len(set(ex)) != len(ex):
            raise ValueError("excluded letters must be distinct")
        object.__setattr__(self, "excluded", tuple(sorted(ex)))
        _check_truncation(self.truncation_norm)

    def contains(self, z):
        z = as_gaussian(z)
        if z.re < 1 or z in self.excluded:
            return False
        return self.a <= z.arg() < self.b and gaussian_is_prime(z)

    def mask(self, re, im):
        re = np.asarray(re, dtype=np.int64)
        im = np.asarray(im, dtype=np.int64)
        re_b, im_b = np.broadcast_arrays(re, im)
        ang = np.arctan2(im_b, re_b)
        out = (re_b >= 1) & (ang >= self.a) & (ang < self.b)
        out &= gaussian_prime_mask(np.where(out, re_b, 0), np.where(out, im_b, 0))
        if self.excluded:
            out &= ~_isin(re_b, im_b, self.excluded)
        return out

    def describe(self):
        return {"kind": "prime_sector", "a": self.a, "b": self.b,
                "excluded": [str(z) for z in self.excluded]}


@dataclass(frozen=True)
class Powers(Alphabet):
    """The real letters ``base**k``, ``k >= 0``."""
    base: int = 2
    truncation_norm: float = 2.0**20
    sparse = True

    def __post_init__(self):
        if int(self.base) < 2:
            raise ValueError("base must be >= 2")
        _check_truncation(self.truncation_norm)

    def contains(self, z):
        z = as_gaussian(z)
        if z.im != 0 or z.re < 1:
            return False
        v = z.re
        while v % self.base == 0:
            v //= self.base
        return v == 1

    def mask(self, re, im):
        re = np.asarray(re, dtype=np.int64)
        im = np.asarray(im, dtype=np.int64)
        hi = int(np.max(re)) if re.size else 1
        return _isin(re, im, tuple(self.letters_upto(max(hi, 1))))

    def letters_upto(self, norm):
        out, v = [], 1
        while v <= norm:
            out.append(GaussianInt(v, 0))
            v *= self.base
        return out

    def describe(self):
        return {"kind": "powers", "base": int(self.base)}


@dataclass(frozen=True)
class Predicate(Alphabet):
    """Alphabet given by a vectorized membership test ``func(re, im) -> bool array``.

    The test is intersected with ``E`` automatically.
    """
    func: Callable = field(compare=True)
    name: str = "predicate"
    truncation_norm: float = 10.0

    def __post_init__(self):
        _check_truncation(self.truncation_norm)

    def mask(self, re, im):
        re = np.asarray(re, dtype=np.int64)
        im = np.asarray(im, dtype=np.int64)
        return (re >= 1) & np.asarray(self.func(re, im), dtype=bool)

    def describe(self):
        return {"kind": "predicate", "name": self.name}


def alphabet_contains(spec: Alphabet, z) -> bool:
    """Membership in ``spec``; truncation is ignored."""
    return spec.contains(z)


def letters_array(spec: Alphabet, norm: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Truncated letters as ``(re, im)`` int64 arrays in ``(re, im)`` order."""
    N = spec.truncation_norm if norm is None else norm
    if spec.sparse:
        pts = spec.letters_upto(N)
        return (np.array([z.re for z in pts], dtype=np.int64),
                np.array([z.im for z in pts], dtype=np.int64))
    if not math.isfinite(N):
        raise ValueError("infinite alphabet needs a finite truncation_norm")
    k = int(math.floor(N))
    re, im = spec.box_points(1, k, -k, k)
    keep = re * re + im * im <= N * N
    return re[keep], im[keep]


def enumerate_truncated(spec: Alphabet) -> list[GaussianInt]:
    """All letters with ``|z| <= truncation_norm``, sorted by ``(re, im)``."""
    re, im = letters_array(spec)
    return [GaussianInt(int(a), int(b)) for a, b in zip(re, im)]


def truncation_tail(spec: Alphabet, norm: float | None = None) -> TailBound:
    N = spec.truncation_norm if norm is None else norm
    if isinstance(spec, Finite):
        omitted = [z for z in spec.letters if z.norm2 > N * N]
        tail = math.fsum(4.0 / z.norm2 for z in omitted)
    elif isinstance(spec, Powers):
        kept = spec.letters_upto(N)
        first = kept[-1].re * spec.base if kept else 1
        q = 1.0 / spec.base**2
        tail = 4.0 / first**2 / (1 - q)
        omitted = True
    else:
        tail = math.inf
        omitted = True
    if not omitted:
        return TailBound(N, False, 0.0, 0.0)
    # omitted first-level cylinders lie in B(0, 4/N); the closest kept cylinder to 0
    # bounds how far such points are from the truncated limit set
    kept = letters_array(spec, N)
    if kept[0].size == 0:
        raise ValueError("truncation keeps no letters")
    # phi_e(X) is the disc with centre (1 + 2 conj(e)) / (2 D), radius 1 / (2 D),
    # D = |e|^2 + Re(e)
    e = kept[0] + 1j * kept[1]
    D = np.abs(e) ** 2 + e.real
    reach = np.min((np.abs(1 + 2 * np.conj(e)) + 1) / (2 * D))
    return TailBound(N, True, tail, 4.0 / N + float(reach))


# ---------------------------------------------------------------------------
# density and box dimension

def count_in_linf_ball(spec: Alphabet, R: int) -> int:
    """Number of letters in the closed sup-norm ball of radius ``R`` about 1."""
    R = int(R)
    if R < 1:
        raise ValueError("R must be >= 1")
    if spec.sparse:
        return len(spec.box_points(1, 1 + R, -R, R)[0])
    return int(np.count_nonzero(spec.box_mask(1, 1 + R, -R, R)))


def count_in_disc(spec: Alphabet, radius: float) -> int:
    """Number of letters with ``|z| <= radius``."""
    return int(letters_array(spec, radius)[0].size)


@dataclass(frozen=True)
class SquareWindow:
    """Closed axis-parallel square ``Q(center, side)``."""
    center: complex
    side: float

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        if not self.side >= 0:
            raise ValueError("side must be nonnegative")

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        h = self.side / 2
        c = self.center
        return c.real - h, c.real + h, c.imag - h, c.imag + h

    def contains(self, z) -> bool:
        x0, x1, y0, y1 = self.bounds
        z = complex(z)
        return x0 <= z.real <= x1 and y0 <= z.imag <= y1


@dataclass(frozen=True)
class CountCurve:
    entries: tuple[tuple[float, float], ...]
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        Rs = [r for r, _ in self.entries]
        if any(b <= a for a, b in zip(Rs, Rs[1:])):
            raise ValueError("R must be strictly increasing")
        if not all(math.isfinite(v) for _, v in self.entries):
            raise ValueError("curve values must be finite")

    @property
    def R(self) -> np.ndarray:
        return np.array([r for r, _ in self.entries], dtype=float)

    @property
    def values(self) -> np.ndarray:
        return np.array([v for _, v in self.entries], dtype=float)

    @property
    def final(self) -> float:
        return self.entries[-1][1]

    def to_csv(self, path):
        from ._csv import write_csv
        write_csv(path, ("R", "value"), self.entries)


def _check_increasing(values: Sequence, what="R_values"):
    if len(values) == 0:
        raise ValueError(f"{what} must be nonempty")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ValueError(f"{what} must be strictly increasing")


def upper_density_curve(spec: Alphabet, R_values: Sequence[int]) -> CountCurve:
    """Ratios ``#(I cap B_inf(1,R)) / #(E cap B_inf(1,R))`` along ``R_values``."""
    R_values = [int(r) for r in R_values]
    _check_increasing(R_values)
    entries = tuple((float(R), count_in_linf_ball(spec, R) / ((R + 1) * (2 * R + 1)))
                    for R in R_values)
    return CountCurve(entries, {"quantity": "upper_density"})


def _occupancy(spec: Alphabet, xlo: int, xhi: int, ylo: int, yhi: int):
    """Coordinate vectors and occupancy counts of letters in the integer box."""
    xlo = max(xlo, 1)
    if xhi < xlo or yhi < ylo:
        return None
    if spec.sparse:
        re, im = spec.box_points(xlo, xhi, ylo, yhi)
        if re.size == 0:
            return None
        ux, ix = np.unique(re, return_inverse=True)
        uy, iy = np.unique(im, return_inverse=True)
        occ = np.zeros((ux.size, uy.size), dtype=np.int64)
        np.add.at(occ, (ix, iy), 1)
    else:
        occ = spec.box_mask(xlo, xhi, ylo, yhi)
        if not occ.any():
            return None
        ux = np.arange(xlo, xhi + 1, dtype=np.int64)
        uy = np.arange(ylo, yhi + 1, dtype=np.int64)
    return ux, uy, occ


def box_count_max(spec: Alphabet, R: float, search_window: SquareWindow):
    """Largest number of letters in a closed side-``R`` square centred in ``search_window``.

    Any placement can be slid right/up until its left (bottom) edge meets a
    letter coordinate or the window limit without losing letters, so only
    those anchors are evaluated, each in O(1) from 2-D prefix sums.

    Returns ``(count, square)``; ``square`` has side 0 when the window sees no letters.
    """
    if not R >= 2:
        raise ValueError("R must be >= 2")
    wx0, wx1, wy0, wy1 = search_window.bounds
    if not all(math.isfinite(v) for v in (wx0, wx1, wy0, wy1)):
        raise ValueError("search window must be bounded")
    ax0, ax1 = wx0 - R / 2, wx1 - R / 2        # admissible left edges
    ay0, ay1 = wy0 - R / 2, wy1 - R / 2
    occ = _occupancy(spec, math.ceil(ax0), math.floor(ax1 + R), math.ceil(ay0), math.floor(ay1 + R))
    degenerate = (0, SquareWindow(search_window.center, 0.0))
    if occ is None:
        return degenerate
    ux, uy, grid = occ
    P = np.zeros((ux.size + 1, uy.size + 1), dtype=np.int64)
    P[1:, 1:] = np.cumsum(np.cumsum(grid, axis=0, dtype=np.int64), axis=1)

    cx = ux[(ux >= ax0) & (ux <= ax1)].astype(float)
    cy = uy[(uy >= ay0) & (uy <= ay1)].astype(float)
    cx = np.append(cx, ax1)
    cy = np.append(cy, ay1)
    tol = 1e-9
    i0 = np.searchsorted(ux, cx - tol, side="left")
    i1 = np.searchsorted(ux, cx + R + tol, side="right")
    j0 = np.searchsorted(uy, cy - tol, side="left")
    j1 = np.searchsorted(uy, cy + R + tol, side="right")
    counts = (P[i1][:, j1] - P[i0][:, j1] - P[i1][:, j0] + P[i0][:, j0])
    k = int(np.argmax(counts))
    a, b = np.unravel_index(k, counts.shape)
    best = int(counts[a, b])
    if best == 0:
        return degenerate
    return best, SquareWindow(complex(cx[a] + R / 2, cy[b] + R / 2), float(R))


def upper_boxdim_curve(spec: Alphabet, R_values: Sequence[float],
                       search_window: SquareWindow) -> CountCurve:
    """``log(max count) / log R`` for each ``R``; window-restricted, so a lower
    bound on the sup over all squares.  Empty windows contribute 0."""
    R_values = [float(r) for r in R_values]
    _check_increasing(R_values)
    entries = []
    counts = []
    for R in R_values:
        n, _ = box_count_max(spec, R, search_window)
        counts.append(n)
        entries.append((R, math.log(n) / math.log(R) if n > 0 else 0.0))
    ratios = [b / a for a, b in zip(R_values, R_values[1:])]
    return CountCurve(tuple(entries), {"quantity": "upper_box_dimension", "counts": counts,
                                       "ratios": ratios, "window_restricted": True})
