"""Complex continued fractions ``phi_e(z) = 1/(e + z)`` on ``X = closed B(1/2, 1/2)``.

Words are composed as exact Gaussian-integer matrices; Python integers never
overflow, so deep words stay exact.  Images of ``X`` and sup-norms of
derivatives over ``X`` have closed forms in the matrix entries:

    Delta  = |d|^2 + Re(conj(c) d)
    radius = |det| / (2 Delta)
    centre = (2 a Delta - det (conj(c) + 2 conj(d))) / (2 c Delta)
    sup |phi'| over X = |det| (|2d + c| + |c|)^2 / (4 Delta^2)

``Delta <= 0`` means the pole ``-d/c`` lies in ``X``.

Also holds a small similarity-IFS toolkit (Moran equation and an explicit
non-porous infinite system, truncated).
"""
from __future__ import annotations

import cmath
import itertools
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .gaussian import Alphabet, GaussianInt, as_gaussian, enumerate_truncated, truncation_tail
from .porosity import PointCloud

__all__ = [
    "GeometryError", "PoleError", "BudgetError", "Disc", "X", "W", "MobiusMap", "IDENTITY",
    "letter_matrix", "compose", "apply", "derivative_at", "sup_derivative_on_X", "image_disc",
    "cylinder_disc", "fixed_point", "CylinderSet", "enumerate_cylinders", "sample_limit_set",
    "cylinders_to_csv", "SimilarityMap", "build_nonporous_similarity_system", "moran_dimension",
    "POLE_TOL", "DEFAULT_MAX_DEPTH", "DEFAULT_BUDGET", "DISTORTION_K",
]

POLE_TOL = 1e-12
DEFAULT_MAX_DEPTH = 6
DEFAULT_BUDGET = 2_000_000
DISTORTION_K = 4.0


class GeometryError(ValueError):
    """A pole lies inside (or on) the disc being mapped."""


class PoleError(ValueError):
    """Evaluation too close to a pole."""


class BudgetError(RuntimeError):
    """Cylinder enumeration would exceed the configured budget."""

    def __init__(self, msg, partial=None):
        super().__init__(msg)
        self.partial = partial if partial is not None else []
        self.partial_results = True


@dataclass(frozen=True)
class Disc:
    center: complex
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        if not self.radius >= 0:
            raise ValueError("radius must be nonnegative")

    @property
    def diameter(self) -> float:
        return 2 * self.radius

    def contains_disc(self, other: "Disc", tol: float = 1e-12) -> bool:
        return abs(other.center - self.center) + other.radius <= self.radius + tol


X = Disc(0.5, 0.5)
W = Disc(0.5, 0.75)


@dataclass(frozen=True)
class MobiusMap:
    """``z -> (a z + b) / (c z + d)`` with Gaussian-integer entries."""
    a: GaussianInt
    b: GaussianInt
    c: GaussianInt
    d: GaussianInt

    def __post_init__(self):
        for k in "abcd":
            object.__setattr__(self, k, as_gaussian(getattr(self, k)))

    @property
    def det(self) -> GaussianInt:
        return self.a * self.d - self.b * self.c

    def __matmul__(self, other: "MobiusMap") -> "MobiusMap":
        a, b, c, d = self.a, self.b, self.c, self.d
        return MobiusMap(a * other.a + b * other.c, a * other.b + b * other.d,
                         c * other.a + d * other.c, c * other.b + d * other.d)

    def __call__(self, z):
        return apply(self, z)

    def entries(self) -> tuple[complex, complex, complex, complex]:
        return tuple(complex(v) for v in (self.a, self.b, self.c, self.d))


IDENTITY = MobiusMap(GaussianInt(1), GaussianInt(0), GaussianInt(0), GaussianInt(1))


def letter_matrix(e) -> MobiusMap:
    e = as_gaussian(e)
    if e.re < 1:
        raise ValueError(f"invalid letter {e}: real part must be >= 1")
    return MobiusMap(GaussianInt(0), GaussianInt(1), GaussianInt(1), e)


def _times_letter(M: MobiusMap, e: GaussianInt) -> MobiusMap:
    # [[a, b], [c, d]] @ [[0, 1], [1, e]]
    return MobiusMap(M.b, M.a + M.b * e, M.d, M.c + M.d * e)


def compose(word: Sequence) -> MobiusMap:
    """Matrix of ``phi_{w1} o ... o phi_{wn}``."""
    if len(word) == 0:
        raise ValueError("word must be nonempty")
    M = letter_matrix(word[0])
    for e in word[1:]:
        M = _times_letter(M, letter_matrix(e).d)
    return M


def _denominator(M: MobiusMap, z: complex) -> complex:
    den = complex(M.c) * z + complex(M.d)
    if abs(den) < POLE_TOL:
        raise PoleError(f"|cz + d| = {abs(den):.3g} at z = {z}")
    return den


def apply(M: MobiusMap, z) -> complex:
    z = complex(z)
    return (complex(M.a) * z + complex(M.b)) / _denominator(M, z)


def derivative_at(M: MobiusMap, z) -> float:
    """``|phi'(z)| = |det| / |cz + d|^2``."""
    z = complex(z)
    return abs(complex(M.det)) / abs(_denominator(M, z)) ** 2


def _delta(M: MobiusMap) -> int:
    c, d = M.c, M.d
    return d.norm2 + c.re * d.re + c.im * d.im


def sup_derivative_on_X(M: MobiusMap) -> float:
    """Exact ``max |phi'|`` over ``X`` (closed form, no sampling)."""
    if M.c == GaussianInt(0):
        raise GeometryError("affine maps (c = 0) are not CCF words")
    D = _delta(M)
    if D <= 0:
        raise GeometryError("pole lies in or on X")
    s = math.sqrt((M.c + M.d * 2).norm2) + math.sqrt(M.c.norm2)
    return abs(complex(M.det)) * s * s / (4.0 * D * D)


def cylinder_disc(M: MobiusMap) -> Disc:
    """Exact image ``phi(X)``; centre coordinates are rounded once from rationals."""
    if M.c == GaussianInt(0):
        return image_disc(M, X)
    D = _delta(M)
    if D <= 0:
        raise GeometryError("pole lies in or on X")
    det = M.det
    num = M.a * (2 * D) - det * (M.c.conj() + M.d.conj() * 2)
    # num / (2 c D) = num * conj(c) / (2 |c|^2 D)
    q = num * M.c.conj()
    den = 2 * M.c.norm2 * D
    center = complex(float(Fraction(q.re, den)), float(Fraction(q.im, den)))
    return Disc(center, math.sqrt(det.norm2) / (2.0 * D))


def image_disc(M: MobiusMap, disc: Disc) -> Disc:
    """Image of a closed disc whose closure avoids the pole."""
    a, b, c, d = M.entries()
    if c == 0:
        return Disc((a * disc.center + b) / d, abs(a / d) * disc.radius)
    pole = -d / c
    w0 = disc.center - pole
    gap = abs(w0) ** 2 - disc.radius ** 2
    if gap <= 0:
        raise GeometryError("pole lies inside the disc")
    det = a * d - b * c
    # 1/w maps |w - w0| = r to the circle about conj(w0)/gap of radius r/gap
    center = a / c - det / c**2 * w0.conjugate() / gap
    return Disc(center, abs(det) / abs(c) ** 2 * disc.radius / gap)


def fixed_point(word: Sequence) -> complex:
    """Attracting fixed point in ``X`` of the word's map."""
    M = compose(word)
    a, b, c, d = M.entries()
    # c x^2 + (d - a) x - b = 0
    disc = cmath.sqrt((d - a) ** 2 + 4 * b * c)
    roots = ((a - d) + disc) / (2 * c), ((a - d) - disc) / (2 * c)
    for x in roots:
        if abs(x - X.center) <= X.radius + 1e-12 and derivative_at(M, x) < 1:
            # one Newton polish on the quadratic
            f = c * x * x + (d - a) * x - b
            fp = 2 * c * x + (d - a)
            if fp != 0:
                x = x - f / fp
            return complex(x)
    raise ArithmeticError(f"no attracting fixed point in X for word {list(word)}")


@dataclass(frozen=True)
class CylinderSet:
    word: tuple[GaussianInt, ...]
    image: Disc
    sup_deriv: float

    @property
    def depth(self) -> int:
        return len(self.word)

    def label(self) -> str:
        return ";".join(str(e) for e in self.word)


def enumerate_cylinders(spec: Alphabet, depth: int, *, max_depth: int = DEFAULT_MAX_DEPTH,
                        budget: int = DEFAULT_BUDGET) -> list[CylinderSet]:
    """All depth-``depth`` cylinders over the truncated alphabet, in lexicographic word order."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if depth > max_depth:
        raise ValueError(f"depth {depth} exceeds max_depth {max_depth}")
    letters = enumerate_truncated(spec)
    if not letters:
        raise ValueError("alphabet has no letters within the truncation")
    total = len(letters) ** depth
    level = [((e,), letter_matrix(e)) for e in letters]
    if total > budget:
        partial = [CylinderSet(w, cylinder_disc(M), sup_derivative_on_X(M)) for w, M in level]
        raise BudgetError(f"{total} cylinders exceed budget {budget}", partial)
    for _ in range(depth - 1):
        level = [(w + (e,), _times_letter(M, e)) for w, M in level for e in letters]
    return [CylinderSet(w, cylinder_disc(M), sup_derivative_on_X(M)) for w, M in level]


def sample_limit_set(spec: Alphabet, depth: int, **kw) -> PointCloud:
    """One point per depth-``depth`` cylinder (its disc centre).

    The covering radius is the largest cylinder radius plus the truncation
    tail radius, so it bounds the Hausdorff distance to the full limit set.
    """
    cyl = enumerate_cylinders(spec, depth, **kw)
    tail = truncation_tail(spec)
    pts = np.array([c.image.center for c in cyl], dtype=complex)
    rmax = max(c.image.radius for c in cyl)
    meta = {"depth": depth, "max_cylinder_radius": rmax, "tail_radius": tail.tail_radius,
            "tail_sum": tail.tail_sum, "truncation_norm": tail.norm, "letters_omitted": tail.omitted}
    return PointCloud(pts, rmax + tail.tail_radius, meta)


def cylinders_to_csv(cylinders: Iterable[CylinderSet], path):
    from ._csv import write_csv
    write_csv(path, ("word", "center_x", "center_y", "radius", "sup_deriv"),
              ((c.label(), c.image.center.real, c.image.center.imag, c.image.radius, c.sup_deriv)
               for c in cylinders))


# ---------------------------------------------------------------------------
# similarity systems

@dataclass(frozen=True)
class SimilarityMap:
    """Rotation-free similarity ``z -> translation + ratio * z``."""
    ratio: float
    translation: complex = 0j

    def __post_init__(self):
        if not 0 < self.ratio < 1:
            raise ValueError("ratio must lie in (0, 1)")
        object.__setattr__(self, "translation", complex(self.translation))

    def __call__(self, z):
        return self.translation + self.ratio * z


def _ratios(maps) -> np.ndarray:
    r = np.array([m.ratio if isinstance(m, SimilarityMap) else float(m) for m in maps], dtype=float)
    if r.size == 0:
        raise ValueError("need at least one map")
    if np.any((r <= 0) | (r >= 1)):
        raise ValueError("ratios must lie in (0, 1)")
    return r


def moran_dimension(maps, tol: float = 1e-10) -> float:
    """The ``h >= 0`` with ``sum(ratio**h) = 1`` (bisection)."""
    r = _ratios(maps)
    if r.size == 1:
        warnings.warn("single map: Moran equation only holds at h = 0", stacklevel=2)
        return 0.0
    logs = np.log(r)

    def g(h):
        return math.fsum(np.exp(h * logs)) - 1.0

    lo, hi = 0.0, 1.0
    while g(hi) > 0:
        lo, hi = hi, 2 * hi
    while hi - lo > tol / 4:
        mid = 0.5 * (lo + hi)
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _circle_points(j: int) -> np.ndarray:
    # equally spaced on |z| = 1/j with chord >= j^-2; one more point would break the
    # spacing, so gaps are < 2 j^-2 and the family is maximal
    m = int(math.floor(math.pi / math.asin(1.0 / (2 * j))))
    return np.exp(2j * np.pi * np.arange(m) / m) / j


def build_nonporous_similarity_system(h: float, j_max: int = 12, *,
                                      complete: bool = False) -> list[SimilarityMap]:
    """Finite truncation of an infinite similarity IFS that is not porous at 0.

    Centres fill the circles ``|z| = 1/j`` (``4 <= j <= j_max``) with spacing
    at least ``j^-2``; each ball ``B(a_k, r_k)`` has radius at most a third of
    the distance from ``a_k`` to the rest of the centre set (including 0 and
    the inner circles of the infinite family), and circle ``j`` receives the
    share ``2^-(j-3)`` of the budget ``sum r_k^h <= 1``.

    With ``complete=True`` extra maps onto disjoint balls on ``|z| = 3/4``
    top the sum up to exactly 1, so the Moran dimension equals ``h``.
    """
    if not 0 < h < 2:
        raise ValueError("h must lie in (0, 2)")
    if j_max < 4:
        raise ValueError("j_max must be >= 4")
    maps = []
    for j in range(4, j_max + 1):
        pts = _circle_points(j)
        m = pts.size
        chord = 2.0 / j * math.sin(math.pi / m) if m > 1 else math.inf
        radial = 1.0 / j - 1.0 / (j + 1)          # gap to the next circle inward
        if j > 4:
            radial = min(radial, 1.0 / (j - 1) - 1.0 / j)
        sep = min(chord, radial)
        r_geo = sep / 3
        r_budget = (2.0 ** -(j - 3) / m) ** (1.0 / h)
        r = min(r_geo, r_budget, 0.0999)
        if not r > 0:
            raise ValueError(f"infeasible ratio at circle j={j}: budget radius underflows "
                             f"(h={h}); lower j_max or raise h")
        maps.extend(SimilarityMap(r, complex(a)) for a in pts)
    if complete:
        deficit = 1.0 - math.fsum(mp.ratio ** h for mp in maps)
        if deficit > 0:
            maps.extend(_completion_maps(deficit, h))
    return maps


def _completion_maps(deficit: float, h: float) -> list[SimilarityMap]:
    # n0 equal balls of radius rho on |z| = 3/4, n0 rho^h = deficit, all inside the
    # annulus 1/2 < |z| < 1 and pairwise disjoint
    for n0 in itertools.count(1):
        rho = (deficit / n0) ** (1.0 / h)
        if rho >= 0.24:
            continue
        if n0 == 1 or 2 * rho < 1.5 * math.sin(math.pi / n0):
            ang = 2 * np.pi * np.arange(n0) / n0
            return [SimilarityMap(rho, 0.75 * complex(np.exp(1j * t))) for t in ang]
        if n0 > 10**6:
            raise ValueError("cannot place completion balls")
