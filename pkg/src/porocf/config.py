"""INI run configuration, validated in full before any computation."""
from __future__ import annotations

import configparser
import hashlib
import math
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .ccf import DEFAULT_BUDGET, Disc, SimilarityMap
from .criterion import CriterionParams
from .gaussian import CoFinite, Finite, GaussianInt, PrimeSector, Powers, as_gaussian

__all__ = ["ConfigError", "BudgetExceeded", "RunConfig", "load_config", "DEMO_CONFIG", "OUTPUT_ENV"]

OUTPUT_ENV = "POROCF_OUTPUT_DIR"
DEMO_CONFIG = "demo.ini"
MAX_PIXELS = 8192


class ConfigError(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    pass


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.replace(",", " ").split()]


def _int_range(text: str) -> list[int]:
    """``"1:100"`` (inclusive), ``"1:100:3"`` or an explicit list."""
    text = text.strip()
    if ":" in text:
        parts = [int(p) for p in text.split(":")]
        lo, hi, step = (parts + [1])[:3]
        return list(range(lo, hi + 1, step))
    return [int(float(x)) for x in text.replace(",", " ").split()]


def _letters(text: str) -> list[GaussianInt]:
    return [as_gaussian(x) for x in text.split(",") if x.strip()]


@dataclass(frozen=True)
class RunConfig:
    alphabet: object                   # an Alphabet, or a tuple of SimilarityMap
    depth: int
    truncation_norm: float
    criterion: CriterionParams
    criterion_letters: tuple
    scales_per_letter: int
    scales: tuple[float, int, int]     # (s, j_min, j_max)
    betas: tuple[float, ...]
    base_word: tuple
    pressure: tuple[int, tuple[float, ...]]
    render: tuple[int, int, Disc]
    density_R: tuple[int, ...]
    boxdim_R: tuple[float, ...]
    boxdim_window: tuple[complex, float]
    primes_norm: float
    output_dir: Path
    seed: int = 0
    budget: int = DEFAULT_BUDGET
    echo: dict = field(default_factory=dict, compare=False)

    @property
    def is_similarity(self) -> bool:
        return isinstance(self.alphabet, tuple)

    def config_hash(self) -> str:
        text = "\n".join(f"{s}.{k}={v}" for s in sorted(self.echo) for k, v in sorted(self.echo[s].items()))
        return hashlib.sha256(text.encode()).hexdigest()


def _build_alphabet(sec) -> tuple[object, float]:
    kind = sec.get("kind", "cofinite").strip().lower()
    N = float(sec.get("truncation_norm", "10"))
    if kind == "similarity":
        return tuple(SimilarityMap(r) for r in _floats(sec["ratios"])), N
    if kind == "finite":
        return Finite(_letters(sec["letters"])), math.inf
    excluded = tuple(_letters(sec.get("excluded", "")))
    if kind == "cofinite":
        return CoFinite(excluded, N), N
    if kind == "prime_sector":
        return PrimeSector(float(sec.get("a", str(-math.pi / 2))), float(sec.get("b", str(math.pi / 2))),
                           excluded, N), N
    if kind == "powers":
        return Powers(int(sec.get("base", "2")), N), N
    raise ConfigError(f"unknown alphabet kind {kind!r}")


def _pick_letters(alpha, sec, seed: int) -> tuple:
    text = sec.get("letters", "auto").strip()
    if text != "auto":
        letters = _letters(text)
        bad = [str(z) for z in letters if not alpha.contains(z)]
        if bad:
            raise ConfigError(f"criterion letters not in the alphabet: {', '.join(bad)}")
        return tuple(letters)
    import numpy as np
    lo, hi = float(sec.get("letter_min_abs", "20")), float(sec.get("letter_max_abs", "100"))
    count = int(sec.get("n_letters", "20"))
    if not 0 < lo <= hi or count < 1:
        raise ConfigError("criterion letter range must satisfy 0 < min <= max and n_letters >= 1")
    if isinstance(alpha, Finite):
        pool = [z for z in alpha.letters if lo <= abs(z) <= hi]
    else:
        k = int(math.floor(hi))
        re, im = alpha.box_points(1, k, -k, k)
        r = np.hypot(re, im)
        keep = (r >= lo) & (r <= hi)
        pool = [GaussianInt(int(a), int(b)) for a, b in zip(re[keep], im[keep])]
    if not pool:
        raise ConfigError("no alphabet letters in the criterion letter range")
    rng = np.random.default_rng(seed)
    idx = rng.choice(len(pool), size=min(count, len(pool)), replace=False)
    return tuple(sorted(pool[i] for i in idx))


def _validate(raw: configparser.ConfigParser, output_override: str | None) -> RunConfig:
    get = lambda s: raw[s] if raw.has_section(s) else {}
    run, al = get("run"), get("alphabet")
    seed = int(run.get("seed", "0"))
    depth = int(run.get("depth", "3"))
    budget = int(run.get("budget", str(DEFAULT_BUDGET)))
    if not 1 <= depth <= 12:
        raise ConfigError("run.depth must lie in 1..12")
    if budget < 1:
        raise ConfigError("run.budget must be positive")
    alpha, N = _build_alphabet(al)

    cr = get("criterion")
    params = CriterionParams(float(cr.get("theta", "0.4")), float(cr.get("kappa", "0.3")),
                             float(cr.get("rho", "0")))
    spl = int(cr.get("scales_per_letter", "3"))
    if spl < 1:
        raise ConfigError("criterion.scales_per_letter must be >= 1")
    letters = () if isinstance(alpha, tuple) else _pick_letters(alpha, cr, seed)

    po = get("porosity")
    s = float(po.get("s", "1"))
    j_min, j_max = int(po.get("j_min", "1")), int(po.get("j_max", "8"))
    if not s > 0:
        raise ConfigError("porosity.s must be positive")
    if not 1 <= j_min <= j_max:
        raise ConfigError("porosity needs 1 <= j_min <= j_max")
    betas = tuple(_floats(po.get("betas", "0.1")))
    if not betas or any(not 0 < b < 1 for b in betas):
        raise ConfigError("porosity.betas must lie in (0, 1)")
    word = tuple(_letters(po.get("base_word", "1")))
    if not word:
        raise ConfigError("porosity.base_word must be nonempty")
    if not isinstance(alpha, tuple):
        bad = [str(z) for z in word if not alpha.contains(z)]
        if bad:
            raise ConfigError(f"porosity.base_word letters not in the alphabet: {', '.join(bad)}")

    pr = get("pressure")
    n = int(pr.get("n", "4"))
    t_grid = tuple(_floats(pr.get("t_grid", "0.5, 1.0, 1.5")))
    if n < 1:
        raise ConfigError("pressure.n must be >= 1")
    if not t_grid or any(not t >= 0 for t in t_grid):
        raise ConfigError("pressure.t_grid must be nonnegative")

    rd = get("render")
    w, h = int(rd.get("width", "512")), int(rd.get("height", "512"))
    if not (1 <= w <= MAX_PIXELS and 1 <= h <= MAX_PIXELS):
        raise ConfigError(f"render size must lie in 1..{MAX_PIXELS}")
    vp = Disc(complex(rd.get("viewport_center", "0.5").replace(" ", "")),
              float(rd.get("viewport_radius", "0.5")))
    if not vp.radius > 0:
        raise ConfigError("render.viewport_radius must be positive")

    de, bx, gp = get("density"), get("boxdim"), get("primes")
    dR = tuple(_int_range(de.get("R_values", "1:50")))
    if not dR or dR[0] < 1 or any(b <= a for a, b in zip(dR, dR[1:])):
        raise ConfigError("density.R_values must be increasing integers >= 1")
    bR = tuple(_floats(bx.get("R_values", "4, 8, 16, 32")))
    if not bR or bR[0] < 2 or any(b <= a for a, b in zip(bR, bR[1:])):
        raise ConfigError("boxdim.R_values must be increasing and >= 2")
    win = (complex(bx.get("window_center", "32").replace(" ", "")), float(bx.get("window_side", "64")))
    if not win[1] >= 0:
        raise ConfigError("boxdim.window_side must be nonnegative")
    pn = float(gp.get("norm", "100"))
    if not pn >= 1:
        raise ConfigError("primes.norm must be >= 1")

    if not isinstance(alpha, tuple):
        from .gaussian import letters_array
        nl = letters_array(alpha)[0].size
        if nl == 0:
            raise ConfigError("alphabet has no letters within the truncation")
        if max(nl ** depth, nl ** n) > budget:
            raise BudgetExceeded(f"{max(nl ** depth, nl ** n)} words exceed budget {budget}")

    out = output_override or os.environ.get(OUTPUT_ENV) or run.get("output_dir", "porocf-out")
    echo = {s: dict(raw[s]) for s in raw.sections()}
    return RunConfig(alpha, depth, N, params, letters, spl, (s, j_min, j_max), betas, word,
                     (n, t_grid), (w, h, vp), dR, bR, win, pn, Path(out), seed, budget, echo)


def load_config(path: str | None = None, overrides: list[str] = (),
                output_dir: str | None = None) -> RunConfig:
    """Read ``path`` (bundled demo when None), apply ``section.key=value`` overrides, validate."""
    raw = configparser.ConfigParser()
    try:
        if path is None:
            raw.read_string(resources.files("porocf").joinpath(DEMO_CONFIG).read_text())
        else:
            with open(path, encoding="utf-8") as fh:
                raw.read_file(fh)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    for item in overrides:
        key, sep, value = item.partition("=")
        section, dot, option = key.strip().partition(".")
        if not sep or not dot or not option:
            raise ConfigError(f"override must look like section.key=value, got {item!r}")
        if not raw.has_section(section):
            raw.add_section(section)
        raw[section][option] = value.strip()
    try:
        return _validate(raw, output_dir)
    except (KeyError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
