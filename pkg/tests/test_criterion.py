import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from porocf.criterion import (
    CertifiedAbsent, CriterionParams, Found, UnknownAtResolution, criterion_scan,
    estimate_max_theta, find_hole, min_dist_to_alphabet,
)
from porocf.gaussian import (FULL_E, CoFinite, Finite, GaussianInt, Powers, PrimeSector,
                             gaussian_prime_mask, upper_density_curve)

TEN = [1, 2, 3, 1 + 1j, 1 - 1j, 2 + 1j, 2 - 1j, 1 + 2j, 1 - 2j, 1 + 3j]


def lattice_letters(spec, y, reach):
    """Every letter in the integer box of half-width ``reach`` around y, by membership tests."""
    out = []
    for a in range(max(1, math.floor(y.real - reach)), math.ceil(y.real + reach) + 1):
        for b in range(math.floor(y.imag - reach), math.ceil(y.imag + reach) + 1):
            if spec.contains(GaussianInt(a, b)):
                out.append(complex(a, b))
    return np.array(out)


def brute_min_dist(spec, y, reach):
    pts = lattice_letters(spec, y, reach)
    return float(np.abs(pts - y).min()) if pts.size else math.inf


def brute_has_hole(spec, i, R, hole, step=0.05):
    """Fine-grid search for a centre y in B(i, R) whose distance to the alphabet exceeds ``hole``."""
    i = complex(i)
    pts = lattice_letters(spec, i, R + hole + 2)
    g = np.arange(-R, R + step / 2, step)
    Y = (i + g[:, None] + 1j * g[None, :]).ravel()
    Y = Y[np.abs(Y - i) <= R]
    best = 0.0
    for chunk in np.array_split(Y, max(1, Y.size // 4000)):
        d = np.abs(chunk[:, None] - pts[None, :]).min(axis=1)
        best = max(best, float(d.max()))
    return best > hole, best


def near_real_letters(rng, n, lo, hi):
    out = set()
    while len(out) < n:
        r = rng.uniform(lo, hi)
        a = rng.uniform(-0.3, 0.3)
        out.add(GaussianInt(round(r * math.cos(a)), round(r * math.sin(a))))
    return sorted(out)


class TestMinDist:
    def test_examples(self):
        assert min_dist_to_alphabet(FULL_E, 10.5 + 0.5j, 3) == pytest.approx(math.sqrt(2) / 2)
        assert min_dist_to_alphabet(Finite([1]), 1, 1) == 0
        for k in (3, 7, 11):
            assert min_dist_to_alphabet(Powers(2), 3 * 2 ** (k - 1), 2 ** k) == 2 ** (k - 1)

    def test_sentinel_and_bad_radius(self):
        assert min_dist_to_alphabet(Finite([1]), 50 + 50j, 5) == math.inf
        with pytest.raises(ValueError):
            min_dist_to_alphabet(FULL_E, 5, 0.5)

    @given(st.floats(-3, 30), st.floats(-15, 15), st.floats(1, 6))
    @settings(max_examples=50, deadline=None)
    def test_against_lattice_scan(self, x, y, reach):
        spec = CoFinite(TEN)
        z = complex(x, y)
        got = min_dist_to_alphabet(spec, z, reach)
        pts = [p for p in lattice_letters(spec, z, reach + 1)
               if abs(p.real - x) <= reach and abs(p.imag - y) <= reach]
        ref = min((abs(p - z) for p in pts), default=math.inf)
        assert got == pytest.approx(ref, abs=1e-12) or got == ref == math.inf


class TestFindHole:
    def test_finite_example(self):
        out = find_hole(Finite([1, 2]), 1, 0.25, 0.5)
        assert isinstance(out, Found)
        c = out.certificate
        assert abs(c.center - 1) <= 0.25 + 1e-12 and c.min_dist_to_alphabet > 0.125

    def test_full_E_certified_absent(self):
        out = find_hole(FULL_E, 20, 6, 0.4)
        assert isinstance(out, CertifiedAbsent)
        assert not brute_has_hole(FULL_E, 20, 6, 2.4)[0]

    def test_powers_example(self):
        out = find_hole(Powers(2), 2 ** 10, 2 ** 8, 0.1)
        c = out.certificate
        assert isinstance(out, Found)
        assert c.min_dist_to_alphabet > 25.6 and abs(c.center - 1024) <= 256
        assert c.min_dist_to_alphabet == pytest.approx(brute_min_dist(Powers(2), c.center, 300))

    def test_below_floor_never_certified(self):
        out = find_hole(FULL_E, 40, 0.2, 0.4)       # hole radius 0.08
        assert isinstance(out, Found)               # cell centres are 0.707 away
        out = find_hole(CoFinite([]), 40, 0.2, 0.4, floor=0.5)
        assert not isinstance(out, CertifiedAbsent)

    def test_near_boundary_is_unknown(self):
        # the search disc reaches re < 1 + theta R: no covering argument
        out = find_hole(FULL_E, 3, 2.5, 0.4)
        assert isinstance(out, UnknownAtResolution)

    def test_exclusion_blocks_certificate(self):
        out = find_hole(CoFinite([21]), 20, 6, 0.4)
        assert not isinstance(out, CertifiedAbsent)

    def test_prime_sector_never_certified(self):
        out = find_hole(PrimeSector(-math.pi / 2, math.pi / 2), 103, 30, 0.4)
        assert not isinstance(out, CertifiedAbsent)

    def test_errors(self):
        with pytest.raises(ValueError):
            find_hole(Finite([1]), 2, 1, 0.5)
        with pytest.raises(ValueError):
            find_hole(Finite([1]), 1, 0, 0.5)
        with pytest.raises(ValueError):
            find_hole(Finite([1]), 1, 1, 1.0)

    @given(st.integers(0, 2 ** 31), st.sampled_from([0.5, 0.3, 0.2, 0.1]), st.floats(0.5, 8))
    @settings(max_examples=25, deadline=None)
    def test_found_is_sound_and_monotone(self, seed, theta, R):
        rng = np.random.default_rng(seed)
        pts = {(int(a), int(b)) for a, b in zip(rng.integers(1, 25, 60), rng.integers(-12, 13, 60))}
        pts.add((12, 0))
        spec = Finite(sorted(pts))
        out = find_hole(spec, 12, R, theta)
        if isinstance(out, Found):
            c = out.certificate
            assert abs(c.center - 12) <= R + 1e-12
            ref = brute_min_dist(spec, c.center, 40)
            assert ref > theta * R and ref == pytest.approx(c.min_dist_to_alphabet, abs=1e-12)
            assert isinstance(find_hole(spec, 12, R, theta / 2), Found)
        else:
            # grid completeness: a hole of radius 1.25 theta R centred in B(i, R - delta) has a grid
            # point within delta sqrt(2)/2, which would have qualified
            delta = theta * R / 4
            assert not brute_has_hole(spec, 12, R - delta, theta * R * 1.25, step=R / 40)[0]

    @pytest.mark.parametrize("shift", [GaussianInt(5, 0), GaussianInt(7, 3), GaussianInt(11, -4)])
    def test_translation_sanity(self, shift):
        base = GaussianInt(20, 2)
        for R, theta in [(6, 0.4), (1.5, 0.3), (0.5, 0.5), (9, 0.05)]:
            a = find_hole(FULL_E, base, R, theta)
            b = find_hole(FULL_E, base + shift, R, theta)
            assert a.kind == b.kind
            if isinstance(a, Found):
                # ties may resolve to a different centre; the clearance must agree
                assert b.certificate.min_dist_to_alphabet == pytest.approx(a.certificate.min_dist_to_alphabet)


class TestScan:
    def test_finite_consistent(self):
        rep = criterion_scan(Finite([1, 2, 3 + 1j]), CriterionParams(0.1, 0.5), [1, 2, 3 + 1j], 3)
        assert rep.verdict == "criterion-consistent"

    def test_cofinite_falsified(self):
        rng = np.random.default_rng(1)
        letters = near_real_letters(rng, 8, 20, 100)
        rep = criterion_scan(CoFinite(TEN), CriterionParams(0.4, 0.3), letters, 3)
        assert rep.verdict == "criterion-falsified"
        assert rep.to_dict()["norm"] == "euclidean"

    def test_prime_sector(self):
        spec = PrimeSector(-math.pi / 2, math.pi / 2)
        pool = [GaussianInt(a, b) for a in range(50, 200, 7) for b in range(-40, 41, 9)
                if 50 <= math.hypot(a, b) <= 200 and gaussian_prime_mask(np.array([a]), np.array([b]))[0]]
        rep = criterion_scan(spec, CriterionParams(0.4, 0.3), pool[:6], 2)
        assert rep.verdict in ("criterion-falsified", "inconclusive")

    def test_scales_are_dyadic_and_bounded(self):
        rep = criterion_scan(FULL_E, CriterionParams(0.4, 0.3, rho=1.0), [GaussianInt(40)], 10)
        Rs = [s.R for s in rep.samples]
        assert Rs == sorted(Rs) and Rs[-1] == pytest.approx(12)
        assert all(b / a == pytest.approx(2) for a, b in zip(Rs, Rs[1:]))
        assert Rs[0] >= max(1.0, 0.1 / 0.4)

    def test_skip_warning(self):
        rep = criterion_scan(Finite([1, 2]), CriterionParams(0.4, 0.3, rho=5), [1, 2], 2)
        assert not rep.samples and len(rep.warnings) == 2

    def test_thread_pool_same_report(self):
        letters = [GaussianInt(30), GaussianInt(25, 3), GaussianInt(44, -5)]
        params = CriterionParams(0.4, 0.3)
        serial = criterion_scan(CoFinite(TEN), params, letters, 4)
        with ThreadPoolExecutor(4) as ex:
            par = criterion_scan(CoFinite(TEN), params, letters, 4, executor=ex)
        assert list(serial.rows()) == list(par.rows())

    def test_csv(self, tmp_path):
        rep = criterion_scan(Powers(2), CriterionParams(0.1, 0.25), [64, 1024], 1)
        rep.to_csv(tmp_path / "c.csv")
        lines = (tmp_path / "c.csv").read_text().splitlines()
        assert lines[0] == "letter_re,letter_im,R,outcome,hole_x,hole_y,min_dist"
        assert len(lines) == 3 and all(",found," in ln for ln in lines[1:])

    @pytest.mark.parametrize("spec", [Finite([1, 2, 5, 1 + 1j]), Powers(2), Powers(3),
                                      CoFinite(TEN), FULL_E])
    def test_density_consistency(self, spec):
        letters = [1, 2] if isinstance(spec, Finite) else [
            z for z in (GaussianInt(27), GaussianInt(64), GaussianInt(81), GaussianInt(60, 5))
            if spec.contains(z)]
        rep = criterion_scan(spec, CriterionParams(0.1, 0.25), letters, 3)
        if rep.verdict == "criterion-consistent":
            assert upper_density_curve(spec, [50, 200]).final <= 1 - 0.001


class TestEstimateTheta:
    def test_singleton(self):
        assert estimate_max_theta(Finite([1]), 0.5, [1], 2) == 0.5

    def test_full_E(self):
        rng = np.random.default_rng(7)
        letters = near_real_letters(rng, 4, 900, 1100)
        assert estimate_max_theta(FULL_E, 0.3, letters, 2) == 0.0

    def test_powers(self):
        assert estimate_max_theta(Powers(2), 0.25, [16, 64, 256, 1024], 3) >= 1 / 16
