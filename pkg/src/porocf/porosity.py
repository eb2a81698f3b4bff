"""Porosity, directed porosity and mean porosity of sampled sets.

The porosity of ``E`` at ``x`` and scale ``r`` is the largest ``c`` such that
some ball ``B(y, c r)`` sits inside ``B(x, r)`` and misses ``E``; equivalently
the maximum over ``y`` of ``min(dist(y, E), r - |y - x|) / r``.  Here ``E`` is
known through a point cloud with a covering radius ``eps``, so every reported
value carries a ``+- eps / r`` resolution band.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

__all__ = [
    "PointCloud", "SpatialIndex", "build_index", "por_objective", "por_estimate", "por_directed",
    "PorosityProfile", "porosity_profile", "MeanPorosityStat", "mean_porosity_stat",
    "mean_porosity_sweep",
]

COARSE_DIVISIONS = 32       # coarse grid spacing r / 32
REFINE_TOL = 1e-4           # pattern search stops below r * 1e-4
DIRECTED_TOL = 1e-6
N_STARTS = 12


@dataclass(frozen=True)
class PointCloud:
    points: np.ndarray
    covering_radius: float = 0.0
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        pts = np.atleast_1d(np.asarray(self.points, dtype=complex))
        if pts.size == 0:
            raise ValueError("point cloud must be nonempty")
        if not self.covering_radius >= 0:
            raise ValueError("covering radius must be nonnegative")
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return self.points.size

    def to_csv(self, path):
        """Write ``x,y`` rows plus a ``.json`` sidecar with the covering radius and metadata."""
        import json
        from pathlib import Path
        from ._csv import write_csv
        write_csv(path, ("x", "y"), ((float(p.real), float(p.imag)) for p in self.points))
        meta = {"covering_radius": self.covering_radius, "n_points": len(self), **self.meta}
        meta = {k: (repr(v) if isinstance(v, float) and not math.isfinite(v) else v)
                for k, v in meta.items()}
        Path(path).with_suffix(".json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n",
                                                   encoding="utf-8")


class SpatialIndex:
    """Exact nearest-neighbour distances over a deduplicated point cloud (k-d tree)."""

    def __init__(self, cloud: PointCloud):
        xy = np.column_stack([cloud.points.real, cloud.points.imag])
        # lexicographic unique => same tree for any input order
        xy = np.unique(xy, axis=0)
        self.cloud = cloud
        self.xy = xy
        self.tree = cKDTree(xy)

    @property
    def covering_radius(self) -> float:
        return self.cloud.covering_radius

    def nearest_distance(self, q):
        """Distance from each query point (complex scalar or array) to the cloud."""
        q = np.asarray(q, dtype=complex)
        d, _ = self.tree.query(np.column_stack([q.ravel().real, q.ravel().imag]))
        d = d.reshape(q.shape)
        return float(d) if d.ndim == 0 else d


def build_index(cloud: PointCloud) -> SpatialIndex:
    return SpatialIndex(cloud)


def por_objective(index: SpatialIndex, x: complex, r: float, y):
    """``min(dist(y, E), r - |y - x|) / r`` for candidate hole centres ``y``."""
    y = np.asarray(y, dtype=complex)
    return np.minimum(index.nearest_distance(y), r - np.abs(y - x)) / r


# stencil of the 5x5 neighbourhood minus the centre: 24 directions
_STENCIL = np.array([complex(i, j) for i in range(-2, 3) for j in range(-2, 3)
                     if (i, j) != (0, 0)]) / 2


def _pattern_search(f, y0: complex, v0: float, step: float, tol: float):
    y, v = y0, v0
    while step >= tol:
        cand = y + step * _STENCIL
        vals = f(cand)
        k = int(np.argmax(vals))
        if vals[k] > v:
            y, v = cand[k], float(vals[k])
        else:
            step /= 2
    return y, v


def _exact_candidates(index: SpatialIndex, x: complex, r: float) -> np.ndarray:
    """Every possible maximiser of ``min(d(y), r - |y - x|)`` for the finite cloud.

    At a maximiser either three sites are nearest (a Voronoi vertex), or the
    boundary term ties with one site (then ``y`` is the far vertex of the
    ellipse ``|y - p| + |y - x| = r`` on the line through ``p`` and ``x``) or
    with two sites (the bisector meets that ellipse), or ``y = x``.
    """
    # nearest sites of points in B(x, r) lie within d(x) + 2r of x
    reach = index.nearest_distance(x) + 2 * r
    ids = index.tree.query_ball_point([x.real, x.imag], reach * (1 + 1e-12) + 1e-300)
    P = index.xy[sorted(ids)]
    P = P[:, 0] + 1j * P[:, 1]
    cands = [np.array([x])]
    u = x - P
    du = np.abs(u)
    far = du > 0
    # unit vectors via the angle: u / |u| underflows for subnormal offsets
    cands.append(x + (r - du[far]) / 2 * np.exp(1j * np.angle(u[far])))
    if P.size >= 2:
        pairs, verts = _voronoi_pairs(P)
        cands.append(verts)
        p, q = P[pairs[:, 0]], P[pairs[:, 1]]
        m = (p + q) / 2
        h = np.abs(q - p) / 2
        n = 1j * np.exp(1j * np.angle(q - p))
        w = m - x
        b = (w.conjugate() * n).real
        A = r * r + np.abs(w) ** 2 - h * h
        B = 2 * b
        # 2r|w + s n| = A + B s, squared: a2 s^2 + a1 s + a0 = 0
        a2 = 4 * r * r - B * B
        a1 = 8 * r * r * b - 2 * A * B
        a0 = 4 * r * r * np.abs(w) ** 2 - A * A
        disc = a1 * a1 - 4 * a2 * a0
        ok = (disc >= 0) & (np.abs(a2) > 1e-300)
        sq = np.sqrt(np.where(ok, disc, 0.0))
        for sgn in (1.0, -1.0):
            sroot = (-a1[ok] + sgn * sq[ok]) / (2 * a2[ok])
            cands.append(m[ok] + sroot * n[ok])
    C = np.concatenate(cands)
    return C[np.isfinite(C)]


def _voronoi_pairs(P: np.ndarray):
    """Delaunay edges (Voronoi neighbours) and circumcentres of the sites ``P``."""
    from scipy.spatial import Delaunay, QhullError
    xy = np.column_stack([P.real, P.imag])
    try:
        tri = Delaunay(xy)
    except (QhullError, ValueError):
        # collinear sites: neighbours are consecutive along the line
        d = P - P[0]
        axis = d[np.argmax(np.abs(d))]
        order = np.argsort((d * axis.conjugate()).real, kind="stable")
        return np.column_stack([order[:-1], order[1:]]), np.zeros(0, dtype=complex)
    s = tri.simplices
    edges = np.concatenate([s[:, [0, 1]], s[:, [1, 2]], s[:, [0, 2]]])
    edges = np.unique(np.sort(edges, axis=1), axis=0)
    a, b, c = P[s[:, 0]], P[s[:, 1]], P[s[:, 2]]
    b, c = b - a, c - a
    den = 2 * (b.real * c.imag - b.imag * c.real)
    good = np.abs(den) > 1e-300
    bb, cc = np.abs(b[good]) ** 2, np.abs(c[good]) ** 2
    ux = (c.imag[good] * bb - b.imag[good] * cc) / den[good]
    uy = (b.real[good] * cc - c.real[good] * bb) / den[good]
    return edges, a[good] + ux + 1j * uy


def por_estimate(index: SpatialIndex, x, r: float, *, exact: bool = True):
    """Largest-empty-ball porosity estimate at ``x`` and scale ``r``.

    Coarse grid of spacing ``r/32`` over ``B(x, r)``, then a shrinking
    24-direction pattern search from the best coarse candidates.  With
    ``exact`` the finitely many candidate optima of the cloud (Voronoi
    vertices, bisector/ellipse intersections) are evaluated too, which makes
    the value the cloud's porosity up to rounding.  Returns
    ``(por, witness_centre)``; ``por`` never exceeds the cloud's porosity.
    """
    if not r > 0:
        raise ValueError("r must be positive")
    x = complex(x)
    h = r / COARSE_DIVISIONS
    g = np.arange(-COARSE_DIVISIONS, COARSE_DIVISIONS + 1) * h
    Y = (x + g[:, None] + 1j * g[None, :]).ravel()
    Y = Y[np.abs(Y - x) <= r]

    def f(y):
        return por_objective(index, x, r, y)

    vals = f(Y)
    order = np.argsort(-vals, kind="stable")
    starts, chosen = [], []
    for k in order:
        if len(starts) == N_STARTS:
            break
        if all(abs(Y[k] - c) > 2 * h for c in chosen):
            chosen.append(Y[k])
            starts.append(k)
    best_y, best_v = Y[order[0]], float(vals[order[0]])
    for k in starts:
        y, v = _pattern_search(f, Y[k], float(vals[k]), h, r * REFINE_TOL)
        if v > best_v:
            best_y, best_v = y, v
    if exact:
        C = _exact_candidates(index, x, r)
        cv = f(C)
        k = int(np.argmax(cv))
        if cv[k] > best_v:
            best_y, best_v = C[k], float(cv[k])
    return max(best_v, 0.0), complex(best_y)


def _golden_max(f, a: float, b: float, tol: float):
    inv = (math.sqrt(5) - 1) / 2
    c, d = b - inv * (b - a), a + inv * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - inv * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv * (b - a)
            fd = f(d)
    t = 0.5 * (a + b)
    return t, f(t)


def por_directed(index: SpatialIndex, x, r: float, v):
    """Porosity with hole centres restricted to the line ``x + t v``, ``|t| <= r``.

    Returns ``(por, t)``.
    """
    if not r > 0:
        raise ValueError("r must be positive")
    v = complex(v)
    if abs(abs(v) - 1) > 1e-9:
        raise ValueError("direction must be a unit vector")
    x = complex(x)
    n = 4 * COARSE_DIVISIONS
    ts = np.linspace(-r, r, 2 * n + 1)

    def f(t):
        t = np.asarray(t, dtype=float)
        return por_objective(index, x, r, x + t * v)

    vals = f(ts)
    best_t, best_v = float(ts[np.argmax(vals)]), float(vals.max())
    step = ts[1] - ts[0]
    for k in np.argsort(-vals, kind="stable")[:N_STARTS]:
        a, b = max(ts[k] - step, -r), min(ts[k] + step, r)
        t, val = _golden_max(lambda s: float(f(s)), a, b, r * DIRECTED_TOL)
        if val > best_v:
            best_t, best_v = t, float(val)
    return max(best_v, 0.0), best_t


@dataclass(frozen=True)
class PorosityProfile:
    base: complex
    s: float
    values: tuple[tuple[int, float], ...]
    resolution_bound: tuple[float, ...]
    witnesses: tuple[complex, ...] = ()
    truncated: bool = False

    @property
    def j(self) -> np.ndarray:
        return np.array([j for j, _ in self.values], dtype=int)

    @property
    def por(self) -> np.ndarray:
        return np.array([p for _, p in self.values], dtype=float)

    def to_csv(self, path):
        from ._csv import write_csv
        write_csv(path, ("j", "r", "por", "resolution_band"),
                  ((j, self.s * 2.0 ** -j, p, b)
                   for (j, p), b in zip(self.values, self.resolution_bound)))


def porosity_profile(index: SpatialIndex, x, s: float, j_max: int, *, j_min: int = 1,
                     executor=None) -> PorosityProfile:
    """``por_estimate`` at ``r = s 2^-j`` for ``j = j_min..j_max``.

    Scales with ``r <= 2 eps`` are below the cloud resolution; ``j_max`` is
    cut back to the last admissible scale and the profile is flagged.
    """
    if j_min < 1 or j_max < j_min:
        raise ValueError("need 1 <= j_min <= j_max")
    eps = index.covering_radius
    last = j_max
    while last >= j_min and not s * 2.0 ** -last > 2 * eps:
        last -= 1
    truncated = last < j_max
    js = list(range(j_min, last + 1))
    x = complex(x)
    job = lambda j: por_estimate(index, x, s * 2.0 ** -j)
    results = list(executor.map(job, js)) if executor is not None else [job(j) for j in js]
    return PorosityProfile(
        base=x, s=float(s),
        values=tuple((j, float(p)) for j, (p, _) in zip(js, results)),
        resolution_bound=tuple(eps / (s * 2.0 ** -j) for j in js),
        witnesses=tuple(w for _, w in results),
        truncated=truncated,
    )


@dataclass(frozen=True)
class MeanPorosityStat:
    beta: float
    s: float
    counts: tuple[tuple[int, int], ...]

    @property
    def lower_estimate(self) -> float:
        if not self.counts:
            return 0.0
        i, c = self.counts[-1]
        return c / i

    def to_csv(self, path):
        from ._csv import write_csv
        write_csv(path, ("i", "count", "fraction"), ((i, c, c / i) for i, c in self.counts))


def mean_porosity_stat(profile: PorosityProfile, beta: float) -> MeanPorosityStat:
    """Running counts of scales with ``por > beta``; ``i`` numbers the profile's scales from 1."""
    if not 0 < beta < 1:
        raise ValueError("beta must lie in (0, 1)")
    counts, c = [], 0
    for i, (_, p) in enumerate(profile.values, start=1):
        c += p > beta
        counts.append((i, c))
    return MeanPorosityStat(float(beta), profile.s, tuple(counts))


def mean_porosity_sweep(index: SpatialIndex, x, s_values: Sequence[float],
                        betas: Sequence[float], j_max: int) -> dict:
    """``{(s, beta): lower_estimate}`` over a grid of scale factors and thresholds."""
    out = {}
    for s in s_values:
        prof = porosity_profile(index, x, s, j_max)
        for beta in betas:
            out[(float(s), float(beta))] = mean_porosity_stat(prof, beta).lower_estimate
    return out
