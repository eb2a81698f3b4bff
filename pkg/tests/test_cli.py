import csv
import json
import math

import numpy as np
import pytest

from porocf.cli import main
from porocf.config import OUTPUT_ENV, load_config


# keeps co-finite alphabets within the word budget
SMALL = ("--set", "run.depth=2", "--set", "pressure.n=2")


def run(tmp_path, *args, name="out"):
    out = tmp_path / name
    code = main([*args, "--output-dir", str(out)])
    return code, out


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def read_ppm(path):
    data = path.read_bytes()
    magic, w, h, maxval, rest = data.split(maxsplit=4)
    assert magic == b"P6" and maxval == b"255"
    return np.frombuffer(rest, dtype=np.uint8).reshape(int(h), int(w), 3)


def write_ini(tmp_path, text, name="c.ini"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


class TestExitCodes:
    def test_usage_errors(self, capsys):
        assert main([]) == 1
        assert main(["alphabet"]) == 1
        assert main(["alphabet", "nonsense"]) == 1
        assert main(["pressure", "dim", "--threads", "0"]) == 1

    def test_invalid_config(self, tmp_path, capsys):
        assert run(tmp_path, "alphabet", "density", "--set", "alphabet.kind=bogus")[0] == 2
        assert run(tmp_path, "ccf", "render", "--set", "render.width=0")[0] == 2
        assert run(tmp_path, "porosity", "scan", "--set", "porosity.betas=1.5")[0] == 2
        assert run(tmp_path, "pressure", "dim", "--config", str(tmp_path / "missing.ini"))[0] == 2
        assert "invalid configuration" in capsys.readouterr().err

    def test_validation_happens_before_output(self, tmp_path):
        code, out = run(tmp_path, "alphabet", "density", "--set", "density.R_values=5,3")
        assert code == 2 and not out.exists()

    def test_budget(self, tmp_path, capsys):
        code, _ = run(tmp_path, "ccf", "cylinders", "--set", "alphabet.kind=cofinite",
                      "--set", "run.depth=12", "--set", "alphabet.truncation_norm=10")
        assert code == 3 and "budget" in capsys.readouterr().err

    def test_unwritable_output(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("")
        assert main(["alphabet", "density", "--output-dir", str(blocker / "sub")]) == 2


class TestOutputDirectory:
    def test_env_var(self, tmp_path, monkeypatch):
        monkeypatch.setenv(OUTPUT_ENV, str(tmp_path / "env"))
        assert main(["alphabet", "primes"]) == 0
        assert (tmp_path / "env" / "primes.csv").exists()

    def test_flag_beats_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv(OUTPUT_ENV, str(tmp_path / "env"))
        code, out = run(tmp_path, "alphabet", "primes", name="flag")
        assert code == 0 and (out / "primes.csv").exists() and not (tmp_path / "env").exists()

    def test_config_value(self, tmp_path, monkeypatch):
        monkeypatch.delenv(OUTPUT_ENV, raising=False)
        target = tmp_path / "cfg"
        assert main(["alphabet", "primes", "--set", f"run.output_dir={target}"]) == 0
        assert (target / "primes.csv").exists()


class TestCommands:
    def test_density_full_E(self, tmp_path):
        code, out = run(tmp_path, "alphabet", "density", *SMALL, "--set", "alphabet.kind=cofinite",
                        "--set", "density.R_values=1:30")
        assert code == 0
        body = rows(out / "density.csv")
        assert body[0] == ["R", "value"] and len(body) == 31
        assert all(float(v) == 1.0 for _, v in body[1:])

    def test_boxdim(self, tmp_path):
        code, out = run(tmp_path, "alphabet", "boxdim")
        assert code == 0 and rows(out / "boxdim.csv")[0] == ["R", "value"]

    def test_primes(self, tmp_path):
        code, out = run(tmp_path, "alphabet", "primes", "--set", "primes.norm=10")
        body = rows(out / "primes.csv")
        assert body[0] == ["re", "im", "norm2"]
        for re, im, n2 in body[1:]:
            assert int(re) > 0 and int(re) ** 2 + int(im) ** 2 == int(n2) <= 100

    def test_criterion_cofinite_falsified(self, tmp_path):
        code, out = run(tmp_path, "criterion", "scan", *SMALL, "--set", "alphabet.kind=cofinite",
                        "--set", "alphabet.excluded=1, 2, 3", "--set", "criterion.letters=40, 61+3i, 90-5i")
        assert code == 0
        rep = json.loads((out / "criterion.json").read_text())
        assert rep["verdict"] == "criterion-falsified" and rep["norm"] == "euclidean"
        assert rows(out / "criterion.csv")[0] == ["letter_re", "letter_im", "R", "outcome",
                                                  "hole_x", "hole_y", "min_dist"]

    def test_criterion_bad_letter(self, tmp_path):
        assert run(tmp_path, "criterion", "scan", "--set", "criterion.letters=5")[0] == 2

    def test_cylinders(self, tmp_path):
        code, out = run(tmp_path, "ccf", "cylinders", "--set", "run.depth=3")
        body = rows(out / "cylinders.csv")
        assert code == 0 and len(body) - 1 == 7 ** 3

    def test_render(self, tmp_path):
        code, out = run(tmp_path, "ccf", "render", "--set", "run.depth=3",
                        "--set", "render.width=100", "--set", "render.height=100")
        assert code == 0
        img = read_ppm(out / "limit_set.ppm")
        assert img.shape == (100, 100, 3)
        ink = (img == 0).all(axis=2)
        assert 0 < ink.sum() < ink.size
        # viewport [0,1] x [-1/2,1/2] at 100 px per unit: every inked pixel touches a cylinder disc
        svg = (out / "limit_set.svg").read_text()
        assert svg.startswith("<?xml") and svg.count("<circle") == 7 ** 3
        circles = [tuple(float(v) for v in part.split('"')[1::2][:3])
                   for part in svg.split("<circle")[1:]]
        cx = np.array([c[0] for c in circles])
        cy = -np.array([c[1] for c in circles])
        r = np.array([c[2] for c in circles])
        for i, j in zip(*np.nonzero(ink)):
            x, y = (j + 0.5) / 100, 0.5 - (i + 0.5) / 100
            gap = np.hypot(cx - x, cy - y) - r
            assert gap.min() <= 0.5 / 100 * math.sqrt(2) + 1e-12

    def test_render_byte_stable(self, tmp_path):
        _, a = run(tmp_path, "ccf", "render", name="a")
        _, b = run(tmp_path, "ccf", "render", "--threads", "4", name="b")
        for n in ("limit_set.ppm", "limit_set.svg"):
            assert (a / n).read_bytes() == (b / n).read_bytes()

    def test_render_empty_viewport(self, tmp_path):
        code, out = run(tmp_path, "ccf", "render", "--set", "render.viewport_center=5+5j",
                        "--set", "render.viewport_radius=0.1")
        assert code == 0 and not (read_ppm(out / "limit_set.ppm") == 0).any()

    def test_porosity(self, tmp_path):
        code, out = run(tmp_path, "porosity", "scan")
        assert code == 0
        body = rows(out / "porosity_profile.csv")
        assert body[0] == ["j", "r", "por", "resolution_band"]
        assert all(0 <= float(r[2]) <= 1 for r in body[1:])
        meta = json.loads((out / "limit_set_samples.json").read_text())
        assert meta["covering_radius"] > 0

    def test_porosity_mean(self, tmp_path):
        code, out = run(tmp_path, "porosity", "mean")
        body = rows(out / "mean_porosity.csv")
        assert code == 0 and body[0] == ["beta", "i", "count", "fraction"]

    def test_pressure_similarity(self, tmp_path, capsys):
        cfg = write_ini(tmp_path, "[alphabet]\nkind = similarity\nratios = 0.5, 0.5\n[pressure]\nn = 3\n")
        code, out = run(tmp_path, "pressure", "dim", "--config", cfg)
        assert code == 0
        last = rows(out / "bracket.csv")[-1]
        assert abs(float(last[0]) - 1) <= 1e-6 and abs(float(last[1]) - 1) <= 1e-6
        assert "bracket [" in capsys.readouterr().out

    def test_pressure_ccf(self, tmp_path):
        code, out = run(tmp_path, "pressure", "dim", "--set", "pressure.n=3")
        assert code == 0
        table = rows(out / "pressure_table.csv")
        assert table[0] == ["t", "n", "lower", "upper"] and len(table) == 1 + 3 * 3
        assert all(float(lo) <= float(up) for _, _, lo, up in table[1:])

    def test_pressure_letter_one_skips_depth_one(self, tmp_path):
        cfg = write_ini(tmp_path, "[alphabet]\nkind = finite\nletters = 1, 2\n"
                        "[porosity]\nbase_word = 1\n[criterion]\nletters = 1, 2\n[pressure]\nn = 3\n")
        code, out = run(tmp_path, "report", "all", "--config", cfg)
        assert code == 0
        doc = json.loads((out / "report.json").read_text())
        assert doc["sections"]["pressure"]["depths_without_bracket"] == [1]
        assert [r[2] for r in rows(out / "bracket.csv")[1:]] == ["2", "3"]

    def test_pressure_no_sign_change(self, tmp_path, capsys):
        # at depth 1 the upper bound for {1, 2} is still positive at t = 2
        cfg = write_ini(tmp_path, "[alphabet]\nkind = finite\nletters = 1, 2\n[porosity]\nbase_word = 1\n"
                        "[criterion]\nletters = 1, 2\n[pressure]\nn = 1\n")
        code, _ = run(tmp_path, "pressure", "dim", "--config", cfg)
        assert code == 2 and "endpoint pressures" in capsys.readouterr().err


class TestReport:
    def test_report_all(self, tmp_path):
        code, out = run(tmp_path, "report", "all")
        assert code == 0
        txt = (out / "report.txt").read_text().splitlines()
        assert txt[0] == "schema_version = 1"
        assert txt[1].startswith("tool_version = ") and txt[2].startswith("config_hash = ")
        doc = json.loads((out / "report.json").read_text())
        cfg = load_config(None, [], str(out))
        assert doc["config_hash"] == cfg.config_hash()
        assert doc["config"]["alphabet"]["kind"] == "finite"
        assert set(doc["sections"]) == {"density", "boxdim", "primes", "criterion", "cylinders",
                                        "render", "porosity", "mean_porosity", "pressure"}
        assert any(line.startswith("config.alphabet.letters = ") for line in txt)
        assert any("truncation" in n for n in doc["notes"])

    def test_report_similarity(self, tmp_path):
        cfg = write_ini(tmp_path, "[alphabet]\nkind = similarity\nratios = 0.25, 0.5\n[pressure]\nn = 2\n")
        code, out = run(tmp_path, "report", "all", "--config", cfg)
        doc = json.loads((out / "report.json").read_text())
        assert code == 0 and doc["sections"]["density"] == {"skipped": "similarity system"}
        b = doc["sections"]["pressure"]
        # 0.25^h + 0.5^h = 1 at h = log(golden ratio) / log 2
        h = math.log((1 + math.sqrt(5)) / 2) / math.log(2)
        assert abs(b["t_lo"] - h) <= 1e-6 and abs(b["t_hi"] - h) <= 1e-6

    def test_config_hash_tracks_config(self):
        a = load_config(None, [], None).config_hash()
        b = load_config(None, ["pressure.n=3"], None).config_hash()
        assert a != b and a == load_config(None, [], None).config_hash()

    def test_threads_byte_identical(self, tmp_path):
        _, a = run(tmp_path, "report", "all", "--threads", "1", name="a")
        _, b = run(tmp_path, "report", "all", "--threads", "8", name="b")
        names = sorted(p.name for p in a.iterdir())
        assert names == sorted(p.name for p in b.iterdir())
        for n in names:
            assert (a / n).read_bytes() == (b / n).read_bytes(), n
