import csv
import io
import json
import math

import pytest

from widomlab.cli import main
from widomlab.sets import CircularArc, IntervalUnion, to_json


@pytest.fixture
def set_file(tmp_path):
    def make(desc, name="set.json"):
        p = tmp_path / name
        p.write_text(json.dumps(to_json(desc)))
        return str(p)
    return make


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_compute(set_file, capsys):
    assert main(["compute", "--set", set_file(IntervalUnion(((-1, 1),))), "--degree", "4"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["norm"] == pytest.approx(1 / 8)
    assert out["widom_factor"] == pytest.approx(2.0)


def test_input_errors(set_file, tmp_path, capsys):
    f = set_file(IntervalUnion(((-1, 1),)))
    assert main(["compute", "--set", f, "--degree", "0"]) == 2
    assert main(["compute", "--set", str(tmp_path / "missing.json"), "--degree", "2"]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"type": "intervals", "intervals": [[1, 0]]}')
    assert main(["compute", "--set", str(bad), "--degree", "2"]) == 2
    assert main(["frobnicate"]) == 2
    assert main(["sweep", "--set", f, "--degrees", "0..3"]) == 2


def test_solver_failure_exit_code(set_file):
    # a tiny end band makes high-degree leveling hopeless in double precision
    f = set_file(IntervalUnion(((-1, -0.711681), (0.900927, 1))))
    assert main(["compute", "--set", f, "--degree", "36"]) == 3


def test_verify_interval(set_file, tmp_path, capsys):
    f = set_file(IntervalUnion(((-1, 1),)))
    assert main(["verify", "--suite", "bounds", "--set", f, "--out", str(tmp_path / "v")]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "set_id,n,norm,capacity,widom_factor,check,margin,pass"
    assert all(r["pass"] in ("true", "UNSUPPORTED") for r in rows(out))
    assert (tmp_path / "v" / "bounds.csv").exists() and (tmp_path / "v" / "bounds.json").exists()


def test_verify_failure_exit_code(set_file, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"set": to_json(IntervalUnion(((-1, -0.3), (0.2, 1)))),
                               "degrees": "3", "tolerances": {"norm_identity": 1e-300}}))
    assert main(["verify", "--config", str(cfg)]) == 1


def test_sweep_arc_monotone(set_file, tmp_path, capsys):
    f = set_file(CircularArc(math.pi / 2))
    plot = tmp_path / "w.svg"
    assert main(["sweep", "--set", f, "--degrees", "1..8", "--plot", str(plot)]) == 0
    data = rows(capsys.readouterr().out)
    w = [float(r["widom_factor"]) for r in data]
    assert all(b > a - 1e-7 for a, b in zip(w, w[1:]))
    assert plot.read_text().startswith("<?xml")


def test_zeros_csv_and_svg(set_file, tmp_path, capsys):
    f = set_file(IntervalUnion(((-1, 1),)))
    svg = tmp_path / "z.svg"
    assert main(["zeros", "--set", f, "--degree", "5", "--svg", str(svg)]) == 0
    data = rows(capsys.readouterr().out)
    assert len(data) == 5 and svg.exists()


def test_report_renders_figures(set_file, tmp_path, capsys):
    f = set_file(IntervalUnion(((-1, -0.3), (0.2, 1))))
    vdir = tmp_path / "v"
    assert main(["verify", "--set", f, "--degrees", "1..5", "--out", str(vdir)]) == 0
    rdir = tmp_path / "r"
    assert main(["report", str(vdir / "bounds.json"), "--out", str(rdir)]) == 0
    assert (rdir / "summary.csv").read_text().startswith("check,results,pass")
    assert (rdir / "margins.svg").exists() and (rdir / "widom.svg").exists()
    # figures are reproducible byte for byte
    first = (rdir / "margins.svg").read_bytes()
    assert main(["report", str(vdir / "bounds.json"), "--out", str(rdir)]) == 0
    assert (rdir / "margins.svg").read_bytes() == first
    assert main(["report", str(vdir / "bounds.json"), "--out", str(rdir), "--format", "png"]) == 0
    assert (rdir / "widom.png").read_bytes()[:4] == b"\x89PNG"


def test_report_bad_input(tmp_path):
    junk = tmp_path / "junk.json"
    junk.write_text("[1, 2]")
    assert main(["report", str(junk), "--out", str(tmp_path / "r")]) == 2
    assert main(["report", str(tmp_path / "none.json")]) == 2
