"""Alphabet-level porosity criterion for complex continued fractions.

For a letter ``i`` and scale ``R`` the criterion asks for a centre ``y`` with
``|y - i| <= R`` such that the ball ``B(y, theta R)`` contains no letter.
Holes are searched on a square grid of spacing ``delta = theta R / 4``
anchored at ``i``.  A *found* hole is an exact certificate.  Absence is only
certified for co-finite alphabets deep inside ``E``: there every unit cell
holds a letter, so no ball of radius ``>= sqrt(2)/2`` is empty.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from .gaussian import Alphabet, CoFinite, GaussianInt, as_gaussian

__all__ = [
    "CriterionParams", "HoleCertificate", "Found", "CertifiedAbsent",
    "UnknownAtResolution", "CriterionSample", "CriterionReport", "min_dist_to_alphabet",
    "find_hole", "criterion_scan", "estimate_max_theta", "RESOLUTION_FLOOR", "DYADIC_THETAS",
]

RESOLUTION_FLOOR = 0.1
_HALF_DIAG = math.sqrt(2) / 2
_CHUNK = 1 << 16
DYADIC_THETAS = tuple(2.0 ** -k for k in range(1, 9))


@dataclass(frozen=True)
class CriterionParams:
    theta: float
    kappa: float
    rho: float = 0.0

    def __post_init__(self):
        if not 0 < self.theta < 1:
            raise ValueError("theta must lie in (0, 1)")
        if not 0 < self.kappa < 1:
            raise ValueError("kappa must lie in (0, 1)")
        if not self.rho >= 0:
            raise ValueError("rho must be >= 0")


@dataclass(frozen=True)
class HoleCertificate:
    center: complex
    hole_radius: float
    min_dist_to_alphabet: float
    certified: bool = True


@dataclass(frozen=True)
class Found:
    certificate: HoleCertificate
    kind = "found"


@dataclass(frozen=True)
class CertifiedAbsent:
    reason: str
    kind = "certified_absent"


@dataclass(frozen=True)
class UnknownAtResolution:
    reason: str
    kind = "unknown"


@dataclass(frozen=True)
class CriterionSample:
    letter: GaussianInt
    R: float
    outcome: object
    grid_spacing: float


@dataclass
class CriterionReport:
    params: CriterionParams
    samples: list[CriterionSample] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    norm: str = "euclidean"

    @property
    def grid_spacing(self) -> float:
        return min((s.grid_spacing for s in self.samples), default=math.nan)

    @property
    def verdict(self) -> str:
        kinds = [s.outcome.kind for s in self.samples]
        if "certified_absent" in kinds:
            return "criterion-falsified"
        if kinds and all(k == "found" for k in kinds):
            return "criterion-consistent"
        return "inconclusive"

    def rows(self):
        for s in self.samples:
            if isinstance(s.outcome, Found):
                c = s.outcome.certificate
                hx, hy, md = c.center.real, c.center.imag, c.min_dist_to_alphabet
            else:
                hx = hy = md = ""
            yield (s.letter.re, s.letter.im, s.R, s.outcome.kind, hx, hy, md)

    def to_csv(self, path):
        from ._csv import write_csv
        write_csv(path, ("letter_re", "letter_im", "R", "outcome", "hole_x", "hole_y", "min_dist"),
                  self.rows())

    def to_dict(self) -> dict:
        counts = {}
        for s in self.samples:
            counts[s.outcome.kind] = counts.get(s.outcome.kind, 0) + 1
        return {"theta": self.params.theta, "kappa": self.params.kappa, "rho": self.params.rho,
                "norm": self.norm, "verdict": self.verdict, "n_samples": len(self.samples),
                "outcomes": dict(sorted(counts.items())), "min_grid_spacing": self.grid_spacing,
                "warnings": list(self.warnings)}


def _letters_near(spec: Alphabet, center: complex, reach: float) -> np.ndarray:
    re, im = spec.box_points(math.floor(center.real - reach), math.ceil(center.real + reach),
                             math.floor(center.imag - reach), math.ceil(center.imag + reach))
    return np.column_stack([re, im]).astype(float)


def min_dist_to_alphabet(spec: Alphabet, y, scan_radius: float) -> float:
    """Distance from ``y`` to the nearest letter within sup-distance ``scan_radius`` (else inf)."""
    if not scan_radius >= 1:
        raise ValueError("scan_radius must be >= 1")
    y = complex(y)
    re, im = spec.box_points(math.ceil(y.real - scan_radius), math.floor(y.real + scan_radius),
                             math.ceil(y.imag - scan_radius), math.floor(y.imag + scan_radius))
    if re.size == 0:
        return math.inf
    return float(np.min(np.hypot(re - y.real, im - y.imag)))


def _certifiable(spec: Alphabet, i: GaussianInt, R: float, hole: float, delta: float) -> bool:
    if not isinstance(spec, CoFinite):
        return False
    if hole < _HALF_DIAG + delta:
        return False
    if i.re - R < 1 + hole:          # search disc must sit inside the populated region
        return False
    ic = complex(i)
    return all(abs(complex(e) - ic) > R + hole for e in spec.excluded)


def find_hole(spec: Alphabet, i, R: float, theta: float, *, floor: float = RESOLUTION_FLOOR):
    """Search for an empty ball ``B(y, theta R)`` with ``|y - i| <= R``.

    Returns :class:`Found`, :class:`CertifiedAbsent` or :class:`UnknownAtResolution`.
    Holes with ``theta R < floor`` are still searched (a hit is exact) but their
    absence is never certified.
    """
    i = as_gaussian(i)
    if not spec.contains(i):
        raise ValueError(f"{i} is not a letter of the alphabet")
    if not R > 0:
        raise ValueError("R must be positive")
    if not 0 < theta < 1:
        raise ValueError("theta must lie in (0, 1)")
    hole = theta * R
    delta = hole / 4
    low_res = hole < floor
    if not low_res and _certifiable(spec, i, R, hole, delta):
        # every candidate ball has radius > sqrt(2)/2 and lies in the fully
        # populated part of E, so it contains a lattice point, which is a letter
        return CertifiedAbsent("unit-cell covering: co-finite alphabet, populated region")

    ic = complex(i)
    letters = _letters_near(spec, ic, R + hole + 1)
    tree = cKDTree(letters)
    k = int(math.floor(R / delta + 1e-9))
    offs = np.arange(-k, k + 1) * delta
    rows_per_chunk = max(1, _CHUNK // offs.size)
    bound = hole * (1 + 1e-12)
    for r0 in range(0, offs.size, rows_per_chunk):
        dx = offs[r0:r0 + rows_per_chunk]
        Y = (ic + dx[:, None] + 1j * offs[None, :]).ravel()
        Y = Y[np.abs(Y - ic) <= R]
        if Y.size == 0:
            continue
        d, _ = tree.query(np.column_stack([Y.real, Y.imag]), distance_upper_bound=bound)
        hit = np.nonzero(~np.isfinite(d))[0]
        if hit.size:
            # pick the roomiest of the qualifying candidates in this block
            exact, _ = tree.query(np.column_stack([Y[hit].real, Y[hit].imag]))
            keep = exact > hole
            if keep.any():
                j = int(np.argmax(np.where(keep, exact, -1.0)))
                y = complex(Y[hit[j]])
                # the tree only holds nearby letters; rescan for the exact distance
                md = min_dist_to_alphabet(spec, y, max(1.0, float(exact[j])))
                return Found(HoleCertificate(y, hole, md))
    if low_res:
        return UnknownAtResolution(f"hole radius {hole:.3g} below resolution floor {floor}")
    return UnknownAtResolution("no grid hole; absence not certifiable here")


def _scales(kappa_i: float, lo: float, n: int) -> list[float]:
    out = []
    for k in range(n):
        R = kappa_i / 2.0**k
        if R < lo:
            break
        out.append(R)
    return out


def criterion_scan(spec: Alphabet, params: CriterionParams, letters: Sequence,
                   scales_per_letter: int, *, floor: float = RESOLUTION_FLOOR,
                   executor=None) -> CriterionReport:
    """Evaluate :func:`find_hole` over letters and dyadic scales ``kappa |i| 2^-k``.

    Scales below ``max(rho, floor / theta)`` are not sampled.
    """
    if scales_per_letter < 1:
        raise ValueError("scales_per_letter must be >= 1")
    report = CriterionReport(params)
    lo = max(params.rho, floor / params.theta)
    jobs = []
    for z in sorted(as_gaussian(z) for z in letters):
        top = params.kappa * abs(z)
        if top < params.rho:
            report.warnings.append(f"letter {z}: kappa|i| = {top:.4g} < rho, skipped")
            continue
        Rs = _scales(top, lo, scales_per_letter)
        if not Rs:
            report.warnings.append(f"letter {z}: no scale above the resolution floor, skipped")
        jobs.extend((z, R) for R in sorted(Rs))

    def run(job):
        z, R = job
        return CriterionSample(z, R, find_hole(spec, z, R, params.theta, floor=floor),
                               params.theta * R / 4)

    report.samples = list(executor.map(run, jobs)) if executor is not None else [run(j) for j in jobs]
    return report


def estimate_max_theta(spec: Alphabet, kappa: float, letters: Sequence, scales_per_letter: int,
                       *, rho: float = 0.0) -> float:
    """Largest dyadic ``theta`` in ``1/2 .. 1/256`` whose scan is criterion-consistent; else 0."""
    for theta in DYADIC_THETAS:
        rep = criterion_scan(spec, CriterionParams(theta, kappa, rho), letters, scales_per_letter)
        if rep.verdict == "criterion-consistent":
            return theta
    return 0.0
