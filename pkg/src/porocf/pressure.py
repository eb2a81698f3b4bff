"""Partition sums, two-sided pressure bounds and Bowen-parameter brackets.

``Z_n(t)`` sums ``||D phi_w||^t`` over all words of length ``n``.  Since
``log Z_n`` is subadditive, ``log Z_n(t) / n`` bounds the pressure from above;
bounded distortion (constant ``K``) makes ``log(K^-t Z_n)`` superadditive,
which gives the lower bound ``(log Z_n(t) - t log K) / n``.

A *system* is either a CCF alphabet (:class:`~porocf.gaussian.Alphabet`) or a
sequence of similarity ratios / :class:`~porocf.ccf.SimilarityMap`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .ccf import (DEFAULT_BUDGET, DISTORTION_K, BudgetError, _times_letter, letter_matrix,
                  sup_derivative_on_X, _ratios)
from .gaussian import (Alphabet, Finite, Powers, enumerate_truncated, letters_array,
                       truncation_tail)

__all__ = [
    "BracketError", "PressureBounds", "DimensionBracket", "RegularityClass", "log_partition_sum",
    "partition_sum", "pressure_bounds", "bowen_bracket", "classify_regularity",
    "pressure_table_to_csv", "brackets_to_csv",
]

BISECT_TOL = 1e-6


class BracketError(ValueError):
    """No sign change of the pressure bound on the search interval."""

    def __init__(self, msg, endpoint_pressures=None):
        super().__init__(msg)
        self.endpoint_pressures = endpoint_pressures or {}


# ---------------------------------------------------------------------------
# word enumeration

_LOG_CACHE: dict = {}


def _system_key(system):
    if isinstance(system, Alphabet):
        return ("ccf", system)
    return ("sim", tuple(float(r) for r in _ratios(system)))


def _log_terms(system, n: int, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """``log ||D phi_w||`` for every word of length ``n``, in lexicographic order."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if isinstance(system, Alphabet):
        letters = enumerate_truncated(system)
        if not letters:
            raise ValueError("alphabet has no letters within the truncation")
    else:
        logs = np.log(_ratios(system))
    total = (len(letters) if isinstance(system, Alphabet) else logs.size) ** n
    # checked before the cache so the outcome does not depend on call history
    if total > budget:
        raise BudgetError(f"{total} words exceed budget {budget}")
    key = (_system_key(system), n)
    hit = _LOG_CACHE.get(key)
    if hit is not None:
        return hit
    if isinstance(system, Alphabet):
        level = [letter_matrix(e) for e in letters]
        for _ in range(n - 1):
            level = [_times_letter(M, e) for M in level for e in letters]
        out = np.log(np.array([sup_derivative_on_X(M) for M in level]))
    else:
        out = logs
        for _ in range(n - 1):
            out = np.add.outer(out, logs).ravel()
    out.setflags(write=False)
    _LOG_CACHE[key] = out
    return out


def log_partition_sum(system, n: int, t: float) -> float:
    """``log Z_n(t)`` via a max shift and compensated summation."""
    if not t >= 0:
        raise ValueError("t must be nonnegative")
    x = t * _log_terms(system, n)
    m = float(x.max())
    return m + math.log(math.fsum(np.exp(x - m)))


def partition_sum(system, n: int, t: float) -> float:
    return math.exp(log_partition_sum(system, n, t))


# ---------------------------------------------------------------------------
# bounds and brackets

def _default_K(system) -> float:
    return DISTORTION_K if isinstance(system, Alphabet) else 1.0


@dataclass(frozen=True)
class PressureBounds:
    t: float
    n: int
    lower: float
    upper: float

    @property
    def width(self) -> float:
        return self.upper - self.lower


def pressure_bounds(system, n: int, t: float, K: float | None = None) -> PressureBounds:
    K = _default_K(system) if K is None else float(K)
    if not K >= 1:
        raise ValueError("distortion constant K must be >= 1")
    logz = log_partition_sum(system, n, t)
    return PressureBounds(float(t), n, (logz - t * math.log(K)) / n, logz / n)


def pressure_table_to_csv(bounds: Sequence[PressureBounds], path):
    from ._csv import write_csv
    write_csv(path, ("t", "n", "lower", "upper"), ((b.t, b.n, b.lower, b.upper) for b in bounds))


@dataclass(frozen=True)
class DimensionBracket:
    t_lo: float
    t_hi: float
    depth: int
    alphabet_note: dict = field(default_factory=dict, compare=False)
    endpoint_pressures: dict = field(default_factory=dict, compare=False)

    @property
    def width(self) -> float:
        return self.t_hi - self.t_lo

    def contains(self, t: float) -> bool:
        return self.t_lo <= t <= self.t_hi


def brackets_to_csv(brackets: Sequence[DimensionBracket], path):
    from ._csv import write_csv
    write_csv(path, ("t_lo", "t_hi", "depth", "N_truncation"),
              ((b.t_lo, b.t_hi, b.depth, b.alphabet_note.get("truncation_norm", ""))
               for b in brackets))


def _bisect(f, a: float, b: float, tol: float) -> tuple[float, float]:
    # f decreasing, f(a) >= 0 >= f(b)
    while b - a > tol:
        mid = 0.5 * (a + b)
        if f(mid) >= 0:
            a = mid
        else:
            b = mid
    return a, b


def bowen_bracket(system, n: int, K: float | None = None, *, tol: float = BISECT_TOL,
                  interval: tuple[float, float] = (0.0, 2.0)) -> DimensionBracket:
    """Bracket the zero of the pressure of the (truncated) system.

    ``t_lo`` is a point where the lower bound is still ``>= 0``; ``t_hi`` a
    point where the upper bound is already ``<= 0``.  Each comes from its own
    bisection to ``tol``.
    """
    K = _default_K(system) if K is None else float(K)
    a, b = interval

    def lower(t):
        return pressure_bounds(system, n, t, K).lower

    def upper(t):
        return pressure_bounds(system, n, t, K).upper

    ends = {"lower_at_a": lower(a), "upper_at_b": upper(b), "a": a, "b": b}
    if ends["lower_at_a"] < 0 or ends["upper_at_b"] > 0:
        raise BracketError(f"no sign change of the pressure bounds on [{a}, {b}]", ends)
    # sign change of the upper bound lies right of the lower bound's
    t_lo, _ = _bisect(lower, a, b, tol)
    _, t_hi = _bisect(upper, a, b, tol)
    if isinstance(system, Alphabet):
        tail = truncation_tail(system)
        note = {"variant": type(system).__name__, "truncation_norm": tail.norm,
                "letters_omitted": tail.omitted, "tail_sum": tail.tail_sum}
    else:
        note = {"variant": "similarity", "truncation_norm": "", "n_maps": len(_ratios(system))}
    return DimensionBracket(t_lo, t_hi, n, note,
                            {"lower_at_t_lo": lower(t_lo), "upper_at_t_hi": upper(t_hi)})


# ---------------------------------------------------------------------------
# regularity

@dataclass(frozen=True)
class RegularityClass:
    verdict: str
    theta_estimate: float
    note: str = ""
    evidence: dict = field(default_factory=dict, compare=False)


def _shell_stats(spec: Alphabet, k_max: int):
    """Letter counts and ``t = 1`` sums over dyadic shells ``2^k < |e| <= 2^(k+1)``."""
    re, im = letters_array(spec, norm=2.0 ** (k_max + 1))
    n2 = re.astype(float) ** 2 + im.astype(float) ** 2
    k = np.floor(np.log2(np.sqrt(n2)) - 1e-12).astype(int)   # |e| in (2^k, 2^(k+1)]
    k = np.maximum(k, 0)
    counts, sums = [], []
    for j in range(k_max + 1):
        sel = k == j
        counts.append(int(sel.sum()))
        sums.append(math.fsum(1.0 / n2[sel]))
    return counts, sums


def classify_regularity(spec: Alphabet, t_grid: Sequence[float] = (0.5, 1.0, 1.5),
                        *, k_max: int = 10) -> RegularityClass:
    """Regularity class of a CCF alphabet.

    Any ``I`` inside ``E`` has ``Z_1(t) < inf`` for ``t > 1``, so ``theta <= 1``.
    For infinite alphabets the test is the divergence of ``Z_1(1)``: shell sums
    ``s_k`` of ``|e|^-2`` with ``k s_k`` bounded below dominate a harmonic
    series, so ``theta = 1`` and ``P(theta) = inf``.
    """
    grid = [float(t) for t in t_grid]
    if isinstance(spec, Finite):
        lows = {t: pressure_bounds(spec, 1, t).lower for t in grid}
        if len(spec.letters) == 1:
            return RegularityClass("regular", 0.0, "single letter: P(0) = 0",
                                   {"lower_bounds_depth1": lows})
        return RegularityClass("strongly-regular", 0.0, "regular(finite)",
                               {"P(0)": math.log(len(spec.letters)), "lower_bounds_depth1": lows})
    if isinstance(spec, Powers):
        # Z_1(t) ~ sum_k base^(-2kt): finite for t > 0, infinite at t = 0
        return RegularityClass("co-finitely-regular", 0.0,
                               "geometric letters: Z_1(0) = inf, Z_1(t) < inf for t > 0",
                               {"base": spec.base})
    counts, sums = _shell_stats(spec, k_max)
    ks = np.arange(2, k_max + 1)
    ksk = np.array([k * sums[k] for k in ks])
    tail = counts[-3:]
    beta = math.log2(tail[-1] / tail[-2]) if tail[-2] > 0 and tail[-1] > 0 else math.nan
    evidence = {"shell_counts": counts, "shell_sums_t1": sums, "k_times_shell_sum": ksk.tolist(),
                "growth_exponent": beta}
    if ksk.size and ksk.min() > 0 and ksk[-1] >= 0.5 * ksk[0]:
        return RegularityClass("co-finitely-regular", 1.0,
                               "Z_1(1) diverges by comparison with a harmonic series", evidence)
    est = beta / 2 if math.isfinite(beta) else math.nan
    return RegularityClass("unknown", est, "divergence at t = 1 not established", evidence)
