"""``porocf`` command line.

Every subcommand reads one INI config (the bundled demo when ``--config`` is
omitted), validates all of it, then writes CSV/JSON/SVG/PPM files with fixed
names under the output directory.  Exit status: 0 success, 1 usage, 2 invalid
configuration, 3 budget exceeded.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from contextlib import nullcontext

from . import __version__
from ._csv import write_csv
from .ccf import BudgetError, enumerate_cylinders, fixed_point, sample_limit_set
from .config import BudgetExceeded, ConfigError, RunConfig, load_config
from .criterion import criterion_scan
from .gaussian import (PrimeSector, SquareWindow, letters_array, truncation_tail,
                       upper_boxdim_curve, upper_density_curve)
from .porosity import build_index, mean_porosity_stat, porosity_profile
from .pressure import (BracketError, bowen_bracket, brackets_to_csv, classify_regularity,
                       pressure_bounds, pressure_table_to_csv)
from .render import render_limit_set
from .report import ReportDocument, write_report

__all__ = ["main", "Session", "COMMANDS"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


class Session:
    """One validated config plus the executor and shared intermediate results."""

    def __init__(self, cfg: RunConfig, executor=None):
        self.cfg = cfg
        self.ex = executor
        self.out = cfg.output_dir
        self._profile = None
        self._cylinders = None
        self.out.mkdir(parents=True, exist_ok=True)

    def ccf(self, what: str):
        if self.cfg.is_similarity:
            raise ConfigError(f"{what} needs a continued-fraction alphabet")
        return self.cfg.alphabet

    def cylinders(self):
        if self._cylinders is None:
            self._cylinders = enumerate_cylinders(self.ccf("ccf"), self.cfg.depth, max_depth=12,
                                                  budget=self.cfg.budget)
        return self._cylinders

    def profile(self):
        if self._profile is None:
            spec = self.ccf("porosity")
            cloud = sample_limit_set(spec, self.cfg.depth, max_depth=12, budget=self.cfg.budget)
            cloud.to_csv(self.out / "limit_set_samples.csv")
            x = fixed_point(self.cfg.base_word)
            s, j_min, j_max = self.cfg.scales
            prof = porosity_profile(build_index(cloud), x, s, j_max, j_min=j_min, executor=self.ex)
            self._profile = (cloud, prof)
        return self._profile


def alphabet_density(ses: Session) -> dict:
    curve = upper_density_curve(ses.ccf("alphabet density"), ses.cfg.density_R)
    curve.to_csv(ses.out / "density.csv")
    return {"file": "density.csv", "final_R": curve.entries[-1][0], "final": curve.final,
            "max": float(curve.values.max()), "error": "exact lattice counts"}


def alphabet_boxdim(ses: Session) -> dict:
    center, side = ses.cfg.boxdim_window
    curve = upper_boxdim_curve(ses.ccf("alphabet boxdim"), ses.cfg.boxdim_R, SquareWindow(center, side))
    curve.to_csv(ses.out / "boxdim.csv")
    return {"file": "boxdim.csv", "final": curve.final, "counts": curve.meta["counts"],
            "window_center": center, "window_side": side,
            "error": "window-restricted maximum: lower bound for the full supremum"}


def alphabet_primes(ses: Session) -> dict:
    spec = ses.ccf("alphabet primes")
    N = ses.cfg.primes_norm
    sector = (PrimeSector(spec.a, spec.b, spec.excluded, N) if isinstance(spec, PrimeSector)
              else PrimeSector(truncation_norm=N))
    re, im = letters_array(sector)
    n2 = re * re + im * im
    write_csv(ses.out / "primes.csv", ("re", "im", "norm2"), zip(re.tolist(), im.tolist(), n2.tolist()))
    X = N * N
    ratio = len(re) / (2 * X / math.log(X)) if X > 1 else math.nan
    return {"file": "primes.csv", "sector": [sector.a, sector.b], "abs_bound": N, "count": len(re),
            "count_over_2X_logX": ratio}


def criterion_cmd(ses: Session) -> dict:
    rep = criterion_scan(ses.ccf("criterion scan"), ses.cfg.criterion, ses.cfg.criterion_letters,
                         ses.cfg.scales_per_letter, executor=ses.ex)
    rep.to_csv(ses.out / "criterion.csv")
    d = rep.to_dict()
    (ses.out / "criterion.json").write_text(json.dumps(_finite(d), indent=2, sort_keys=True) + "\n",
                                           encoding="utf-8")
    d["file"] = "criterion.csv"
    return d


def _finite(d):
    return {k: (repr(v) if isinstance(v, float) and not math.isfinite(v) else v) for k, v in d.items()}


def ccf_cylinders(ses: Session) -> dict:
    from .ccf import cylinders_to_csv
    cyl = ses.cylinders()
    cylinders_to_csv(cyl, ses.out / "cylinders.csv")
    tail = truncation_tail(ses.cfg.alphabet)
    return {"file": "cylinders.csv", "count": len(cyl), "depth": ses.cfg.depth,
            "max_radius": max(c.image.radius for c in cyl), "truncation_norm": tail.norm,
            "tail_sum": tail.tail_sum, "tail_radius": tail.tail_radius}


def ccf_render(ses: Session) -> dict:
    w, h, vp = ses.cfg.render
    ok = render_limit_set(ses.cylinders(), w, h, vp, ses.out / "limit_set.svg", ses.out / "limit_set.ppm")
    return {"files": ["limit_set.svg", "limit_set.ppm"] if ok else [], "width": w, "height": h,
            "viewport_center": vp.center, "viewport_radius": vp.radius}


def porosity_scan(ses: Session) -> dict:
    cloud, prof = ses.profile()
    prof.to_csv(ses.out / "porosity_profile.csv")
    return {"files": ["porosity_profile.csv", "limit_set_samples.csv"], "base_point": prof.base, "covering_radius": cloud.covering_radius,
            "values": [p for _, p in prof.values], "resolution_bands": list(prof.resolution_bound),
            "truncated": prof.truncated, "tail_radius": cloud.meta["tail_radius"]}


def porosity_mean(ses: Session) -> dict:
    _, prof = ses.profile()
    rows, est = [], {}
    for beta in ses.cfg.betas:
        stat = mean_porosity_stat(prof, beta)
        rows.extend((beta, i, c, c / i) for i, c in stat.counts)
        est[repr(beta)] = stat.lower_estimate
    write_csv(ses.out / "mean_porosity.csv", ("beta", "i", "count", "fraction"), rows)
    return {"file": "mean_porosity.csv", "fraction_by_beta": est, "scales": len(prof.values),
            "error": "counts use porosity estimates with +- eps/r resolution bands"}


def pressure_dim(ses: Session) -> dict:
    system = ses.cfg.alphabet
    n, t_grid = ses.cfg.pressure
    table = [pressure_bounds(system, m, t) for t in t_grid for m in range(1, n + 1)]
    pressure_table_to_csv(table, ses.out / "pressure_table.csv")
    brackets, skipped = [], []
    for m in range(1, n + 1):
        try:
            brackets.append(bowen_bracket(system, m))
        except BracketError as exc:
            # shallow depths may fail (phi_1 has derivative 1 at 0); only the last must bracket
            if m == n:
                raise ConfigError(f"{exc}; endpoint pressures {exc.endpoint_pressures}") from exc
            skipped.append(m)
    brackets_to_csv(brackets, ses.out / "bracket.csv")
    b = brackets[-1]
    out = {"files": ["pressure_table.csv", "bracket.csv"], "t_lo": b.t_lo, "t_hi": b.t_hi,
           "depth": b.depth, "alphabet_note": b.alphabet_note, "depths_without_bracket": skipped,
           "error": "bisection tolerance 1e-06 per endpoint; distortion slack t log K / n"}
    if not ses.cfg.is_similarity:
        reg = classify_regularity(system, t_grid)
        out["regularity"] = {"verdict": reg.verdict, "theta_estimate": reg.theta_estimate,
                             "note": reg.note}
    return out


COMMANDS = {
    ("alphabet", "density"): alphabet_density,
    ("alphabet", "boxdim"): alphabet_boxdim,
    ("alphabet", "primes"): alphabet_primes,
    ("criterion", "scan"): criterion_cmd,
    ("ccf", "cylinders"): ccf_cylinders,
    ("ccf", "render"): ccf_render,
    ("porosity", "scan"): porosity_scan,
    ("porosity", "mean"): porosity_mean,
    ("pressure", "dim"): pressure_dim,
}

_SECTION = {("alphabet", "density"): "density", ("alphabet", "boxdim"): "boxdim",
            ("alphabet", "primes"): "primes", ("criterion", "scan"): "criterion",
            ("ccf", "cylinders"): "cylinders", ("ccf", "render"): "render",
            ("porosity", "scan"): "porosity", ("porosity", "mean"): "mean_porosity",
            ("pressure", "dim"): "pressure"}


def report_all(ses: Session) -> dict:
    cfg = ses.cfg
    doc = ReportDocument(config=cfg.echo, config_hash=cfg.config_hash())
    for key, fn in COMMANDS.items():
        if cfg.is_similarity and key != ("pressure", "dim"):
            doc.sections[_SECTION[key]] = {"skipped": "similarity system"}
            continue
        doc.sections[_SECTION[key]] = fn(ses)
    if not cfg.is_similarity:
        tail = truncation_tail(cfg.alphabet)
        doc.notes.append(f"truncation at |e| <= {tail.norm}: tail sum {tail.tail_sum}, "
                         f"tail radius {tail.tail_radius}")
        doc.notes.append("criterion holes below radius 0.1 are searched but never certified absent")
    write_report(doc, ses.out / "report")
    return doc.sections


def _parser() -> _Parser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="INI file (default: bundled demo)")
    common.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
                        help="override one config key (repeatable)")
    common.add_argument("--output-dir", help="overrides run.output_dir and $POROCF_OUTPUT_DIR")
    common.add_argument("--threads", type=int, default=1, help="worker threads (results do not depend on it)")
    p = _Parser(prog="porocf", description="Porosity of complex continued fraction limit sets.")
    p.add_argument("--version", action="version", version=f"porocf {__version__}")
    groups = p.add_subparsers(dest="group", required=True, parser_class=_Parser)
    subs = {}
    for group, cmd in list(COMMANDS) + [("report", "all")]:
        if group not in subs:
            subs[group] = groups.add_parser(group).add_subparsers(dest="cmd", required=True,
                                                                  parser_class=_Parser)
        subs[group].add_parser(cmd, parents=[common])
    return p


def main(argv=None) -> int:
    try:
        args = _parser().parse_args(argv)
        if args.threads < 1:
            raise UsageError("porocf: error: --threads must be >= 1")
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    fn = report_all if args.group == "report" else COMMANDS[(args.group, args.cmd)]
    try:
        cfg = load_config(args.config, args.set, args.output_dir)
        pool = ThreadPoolExecutor(args.threads) if args.threads > 1 else nullcontext()
        with pool as ex:
            result = fn(Session(cfg, ex))
    except ConfigError as exc:
        print(f"porocf: invalid configuration: {exc}", file=sys.stderr)
        return 2
    except (BudgetError, BudgetExceeded) as exc:
        print(f"porocf: budget exceeded: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"porocf: {exc}", file=sys.stderr)
        return 2
    print(f"porocf {args.group} {args.cmd}: wrote results to {cfg.output_dir}")
    if args.group == "pressure":
        print(f"bracket [{result['t_lo']!r}, {result['t_hi']!r}] at depth {result['depth']}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
