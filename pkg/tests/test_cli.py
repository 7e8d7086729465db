import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from hirzebruch_bps import cli
from hirzebruch_bps.cli import TABLES, JobConfig, auto_qmax, golden, run
from hirzebruch_bps.lattice import DivisorClass


def call(*argv):
    buf = io.StringIO()
    code = run(list(argv), out=buf)
    return code, buf.getvalue()


def test_betti_table1_markdown():
    code, out = call("betti", "--ell", "1", "--rank", "3", "--c1", "-1,0", "--c2-min", "2", "--c2-max", "3",
                     "--J", "1,0,plus", "--format", "md")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("| c2 | b_0 | b_2 |")
    assert lines[2] == "| 2 | 1 | 2 | 4 | 4 |  |  |  | 18 |"
    assert lines[3] == "| 3 | 1 | 3 | 9 | 20 | 37 | 53 | 59 | 305 |"


def test_betti_json_schema():
    code, out = call("betti", "--rank", "3", "--c1", "-1,1", "--c2-min", "3", "--J", "1,0,plus")
    (row,) = json.loads(out)
    assert code == 0
    assert row["c1"] == [-1, 1] and row["euler"] == 69
    assert row["J"] == {"m": 1, "n": 0, "side": "plus"}


def test_hilbert_rows():
    code, out = call("betti", "--rank", "1", "--c1", "0,0", "--c2-min", "0", "--c2-max", "2", "--format", "csv")
    assert code == 0
    assert out.splitlines()[1:] == ["0,1,,,1", "1,1,2,,4", "2,1,3,6,14"]


def test_euler_csv():
    code, out = call("euler", "--rank", "3", "--c1", "-1,2", "--c2-min", "3", "--c2-max", "4", "--J", "1,0,plus",
                     "--format", "csv")
    assert out.splitlines() == ["c2,dim,chi", "3,4,9", "4,10,162"]


def test_series_is_canonical_json():
    code, out = call("series", "--kind", "f", "--rank", "1", "--qmax", "3")
    assert code == 0
    assert json.loads(out)["type"] in ("QSeries", "PoleSeries")
    assert out.strip() == json.dumps(json.loads(out), sort_keys=True, separators=(",", ":"))


def test_series_empty_in_vanishing_chamber():
    code, out = call("series", "--kind", "f", "--rank", "2", "--c1", "1,0", "--J", "0,1,minus", "--qmax", "4")
    assert code == 0
    assert json.loads(out)["body"]["terms"] == []


def test_walls_figure():
    code, out = call("walls", "--rank", "2", "--c1", "-1,1", "--c2-min", "3")
    (entry,) = json.loads(out)
    assert [(w["m"], w["n"]) for w in entry["walls"]] == [(1, 5), (1, 3), (1, 1)]


def test_walls_empty_below_bound():
    code, out = call("walls", "--rank", "2", "--c1", "1,0", "--c2-min", "-1")
    assert json.loads(out)[0]["walls"] == []


def test_wallcross_path_independent():
    code, out = call("wallcross", "--rank", "3", "--c1", "-1,1", "--c2-min", "2", "--c2-max", "4",
                     "--J", "0,1,minus", "--J-to", "1,0,plus", "--via", "1,1,plus")
    rows = json.loads(out)
    assert code == 0
    assert rows and all(r["consistent"] and r["path_independent"] for r in rows)


def test_tables_match_goldens():
    code, out = call("tables", "--format", "md", "--jobs", "2")
    assert code == 0
    assert out.count("golden: match") == 3


def test_goldens_are_shipped():
    for name in TABLES:
        rows = golden(name)
        assert rows and all(set(r) >= {"c2", "betti", "euler", "dim"} for r in rows)
    assert [r["euler"] for r in golden("table1")] == [18, 305, 2936, 20891]


@pytest.mark.parametrize("ell,code", [(1, 0), (2, 0)])
def test_blowup_exit_codes(ell, code):
    rc, out = call("check", "blowup", "--ell", str(ell))
    rep = json.loads(out)
    assert rc == code
    assert rep["pass"] is (ell == 1) and rep["expected"] is (ell == 1)


def test_check_anomaly():
    rc, out = call("check", "anomaly")
    reps = [json.loads(x) for x in out.splitlines()]
    assert rc == 0
    assert any(r["check"] == "upsilon" and r["point"]["J"] == [2, 1] for r in reps)


def test_cache_roundtrip(tmp_path, monkeypatch):
    argv = ["betti", "--rank", "3", "--c1", "-1,0", "--c2-min", "2", "--c2-max", "4", "--J", "1,0,plus"]
    _, fresh = call(*argv)
    _, first = call(*argv, "--cache-dir", str(tmp_path))
    assert len(list(tmp_path.iterdir())) == 1
    _, cached = call(*argv, "--cache-dir", str(tmp_path))
    monkeypatch.setenv(cli.CACHE_ENV, str(tmp_path))
    _, env = call(*argv)
    assert fresh == first == cached == env


def test_parallel_output_identical():
    argv = ["betti", "--rank", "3", "--c1", "-1,1", "--c2-min", "2", "--c2-max", "6", "--J", "1,0,plus"]
    assert call(*argv)[1] == call(*argv, "--jobs", "3")[1]


def test_cache_key_tracks_config():
    a = JobConfig("betti", c2_min=2)
    assert a.key() == JobConfig("betti", c2_min=2).key()
    assert a.key() != JobConfig("betti", c2_min=3).key()


def test_auto_qmax():
    # Delta(3, -C, 3) = 10/9 on Sigma_1: 3 * 10/9 - 1/2 + 1
    assert auto_qmax(3, DivisorClass(-1, 0), 3, 1) == Fraction(23, 6)


def test_qmax_too_small(capsys):
    code, _ = call("betti", "--c2-min", "3", "--qmax", "0")
    err = json.loads(capsys.readouterr().err)
    assert code == 2 and err["error"] == "CLIError"


def test_module_error_is_structured(capsys):
    code, _ = call("betti", "--rank", "3", "--c1", "0,1", "--c2-min", "3")
    err = json.loads(capsys.readouterr().err)
    assert code == 2 and err["error"] == "BetaDivisible"


def test_bad_polarization_rejected():
    with pytest.raises(SystemExit):
        call("betti", "--J", "0,0", "--c2-min", "1")


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "hirzebruch_bps", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip()


def test_f3_golden():
    from importlib import resources

    from hirzebruch_bps.invariants.extraction import betti_extract, extract_refined
    from hirzebruch_bps.invariants.genfun import h_from_f
    from hirzebruch_bps.lattice import ChernVector, Surface
    from hirzebruch_bps.qseries import loads

    text = resources.files("hirzebruch_bps").joinpath("goldens", "f3_ell1_minusC.json").read_text()
    _, fresh = call("series", "--kind", "f", "--rank", "3", "--c1", "-1,0", "--J", "1,0,plus",
                    "--c2-min", "2", "--c2-max", "5")
    assert fresh == text
    h = h_from_f(loads(text), 3)
    S = Surface(1)
    euler = []
    for c2 in (2, 3, 4, 5):
        g = ChernVector(3, DivisorClass(-1, 0), c2)
        euler.append(betti_extract(extract_refined(h, g, S).reduce(), g, S).euler)
    assert euler == [18, 305, 2936, 20891]
