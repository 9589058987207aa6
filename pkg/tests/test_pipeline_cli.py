import json
import math
import re
import subprocess
import sys

import numpy as np
import pytest

from flatreach import cli
from flatreach.bound import optimize_c
from flatreach.exceptions import ParameterError
from flatreach.io import write_pgm, write_polygon
from flatreach.pipeline import PipelineConfig, dumps, run_verify, worker_count
from flatreach.shapes import disk_mask, dumbbell

KEYS = ["lambda", "c_hat", "threshold", "energies", "components", "overall", "tool_version", "config_echo"]


@pytest.fixture(scope="module")
def disk_pgm(tmp_path_factory):
    p = tmp_path_factory.mktemp("in") / "disk.pgm"
    write_pgm(p, disk_mask(32, 128))
    return p


@pytest.fixture(scope="module")
def dumbbell_json(tmp_path_factory):
    p = tmp_path_factory.mktemp("in") / "dumbbell.json"
    write_polygon(p, dumbbell(40.0, 4.0, 1.0))
    return p


def _verify(tmp_path, inp, lam, **kw):
    cfg = PipelineConfig(input_path=str(inp), lam=lam, output_report=str(tmp_path / "r.json"), **kw)
    return run_verify(cfg), json.loads((tmp_path / "r.json").read_text())


# ---------------------------------------------------------------- pipeline


def test_disk_passes(tmp_path, disk_pgm):
    rep, doc = _verify(tmp_path, disk_pgm, 4 / 32)
    assert doc["overall"] == "pass"
    assert list(doc) == KEYS
    assert len(doc["components"]) == 1
    comp = doc["components"][0]
    assert comp["perimeter"] == pytest.approx(2 * math.pi * 32, rel=0.03)
    assert comp["max_curvature"] <= 1.1 * (4 / 32)
    assert comp["reach_value"] >= 0.9 * doc["threshold"]
    assert doc["threshold"] == float(f"{optimize_c()[0] / 0.125:.12g}")
    assert doc["energies"]["minimizer"] <= doc["energies"]["input"] * 1.01


def test_disk_vacuous(tmp_path, disk_pgm):
    rep, doc = _verify(tmp_path, disk_pgm, 1 / 32)
    assert doc["overall"] == "vacuous"
    assert doc["components"] == []
    assert doc["energies"]["minimizer"] == pytest.approx(doc["energies"]["empty"])


def test_dumbbell_neck_does_not_survive(tmp_path, dumbbell_json):
    # threshold C_hat / lambda is well above the 4 px neck half-gap
    for lam in (0.02, 0.05):
        rep, doc = _verify(tmp_path, dumbbell_json, lam, spacing=1.0)
        thr = doc["threshold"]
        assert thr > 4.0
        for comp in doc["components"]:
            assert comp["reach_value"] >= 0.9 * thr
        assert doc["overall"] in ("pass", "vacuous")


def test_report_consistency(tmp_path, dumbbell_json):
    rep, doc = _verify(tmp_path, dumbbell_json, 0.05, spacing=1.0, curvature_factor=0.5)
    flags = [c["curvature_ok"] and c["reach_ok"] for c in doc["components"]]
    assert doc["overall"] == ("pass" if all(flags) else "fail")
    assert doc["overall"] == "fail"  # a tightened curvature factor is honoured


def test_verify_deterministic_bytes(tmp_path, dumbbell_json):
    # same config (including output paths, which are echoed) run twice
    cfg = PipelineConfig(
        input_path=str(dumbbell_json),
        lam=0.05,
        spacing=1.0,
        output_report=str(tmp_path / "r.json"),
        output_svg=str(tmp_path / "r.svg"),
    )
    outs = []
    for _ in range(2):
        run_verify(cfg)
        outs.append(((tmp_path / "r.json").read_bytes(), (tmp_path / "r.svg").read_bytes()))
    assert outs[0] == outs[1]


def test_thread_count_does_not_change_report(tmp_path, dumbbell_json, monkeypatch):
    docs = []
    for n in ("1", "4"):
        monkeypatch.setenv("FLATREACH_THREADS", n)
        rep, _ = _verify(tmp_path, dumbbell_json, 0.05, spacing=1.0)
        docs.append(rep.to_json())
    assert docs[0] == docs[1]


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("FLATREACH_THREADS", "3")
    assert worker_count() == 3
    monkeypatch.setenv("FLATREACH_THREADS", "0")
    with pytest.raises(ParameterError):
        worker_count()
    monkeypatch.delenv("FLATREACH_THREADS")
    assert worker_count() >= 1


def test_svg_concentric_disk(tmp_path, disk_pgm):
    svg = tmp_path / "d.svg"
    _verify(tmp_path, disk_pgm, 4 / 32, output_svg=str(svg))
    text = svg.read_text()
    paths = re.findall(r'<path d="M([^"]*) Z"', text)
    assert len(paths) == 2  # input and minimizer boundaries
    centres = []
    for d in paths:
        pts = np.array([[float(v) for v in p.split(",")] for p in d.split(" L")])
        centres.append(pts.mean(axis=0))
    assert np.allclose(centres[0], centres[1], atol=0.5)


def test_config_validation():
    with pytest.raises(ParameterError):
        PipelineConfig(input_path="x.pgm", lam=0.0)
    with pytest.raises(ParameterError):
        PipelineConfig(input_path="", lam=1.0)
    with pytest.raises(ParameterError):
        PipelineConfig(input_path="x.pgm", lam=1.0, reach_method="guess")
    assert PipelineConfig(input_path="a.JSON", lam=1.0).kind == "polygon_json"


def test_dumps_rounding():
    doc = {"b": 1 / 3, "a": [math.inf, 2.0, True, np.float64(0.1) + np.float64(0.2)]}
    text = dumps(doc)
    assert list(json.loads(text)) == ["b", "a"]
    assert '"b": 0.333333333333' in text
    assert json.loads(text)["a"] == [None, 2.0, True, 0.3]


# ---------------------------------------------------------------- CLI


def test_cli_bound(capsys):
    assert cli.main(["bound", "--lambda", "2"]) == 0
    out = dict(line.split() for line in capsys.readouterr().out.splitlines())
    assert float(out["c_hat"]) == pytest.approx(0.2217, abs=5e-4)
    assert float(out["theta_star"]) == pytest.approx(5.231, abs=5e-3)
    assert float(out["threshold"]) == pytest.approx(float(out["c_hat"]) / 2, rel=1e-11)


def test_cli_bound_plot(tmp_path):
    p = tmp_path / "b.svg"
    assert cli.main(["bound", "--plot", str(p)]) == 0
    text = p.read_text()
    for layer in ("R1", "R2", "Sstar"):
        assert f'id="{layer}"' in text


def test_cli_verify_pass_and_fail(tmp_path, disk_pgm):
    assert cli.main(["verify", "--input", str(disk_pgm), "--lambda", "0.125", "--report", str(tmp_path / "a.json")]) == 0
    assert cli.main(["verify", "--input", str(disk_pgm), "--lambda", "0.03125", "--report", str(tmp_path / "b.json")]) == 0


def test_cli_verify_fail_exit_code(tmp_path, disk_pgm, monkeypatch):
    import flatreach.pipeline as pl

    orig = pl.PipelineConfig

    def strict(**kw):
        return orig(**kw, reach_factor=100.0)

    monkeypatch.setattr(pl, "PipelineConfig", strict)
    assert cli.main(["verify", "--input", str(disk_pgm), "--lambda", "0.125", "--report", str(tmp_path / "c.json")]) == 2


def test_cli_minimize(tmp_path, disk_pgm):
    out = tmp_path / "m.pgm"
    assert cli.main(["minimize", "--input", str(disk_pgm), "--lambda", "0.125", "--out", str(out)]) == 0
    assert out.read_bytes().startswith(b"P5")


def test_cli_reach(tmp_path, capsys):
    from flatreach.shapes import circle

    p = tmp_path / "c.json"
    write_polygon(p, circle(2.0, 400))
    assert cli.main(["reach", "--input", str(p), "--method", "both"]) == 0
    vals = [float(line.split()[1]) for line in capsys.readouterr().out.splitlines()]
    assert vals == pytest.approx([2.0, 2.0], rel=0.02)


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "--input", "MISSING.pgm", "--lambda", "1", "--report", "r.json"],
        ["bound", "--lambda", "-1"],
        ["verify", "--input", "x.pgm", "--lambda", "-2", "--report", "r.json"],
    ],
)
def test_cli_input_errors(tmp_path, argv, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert cli.main(argv) == 3


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "--lambda", "1"],
        ["minimize", "--input", "x.pgm", "--lambda", "1", "--stencil", "5", "--out", "o.pgm"],
        ["frobnicate"],
    ],
)
def test_cli_usage_exits_three(argv):
    with pytest.raises(SystemExit) as exc:
        cli.main(argv)
    assert exc.value.code == 3


def test_cli_malformed_files(tmp_path):
    bad = tmp_path / "bad.pgm"
    bad.write_bytes(b"P9 nonsense")
    assert cli.main(["verify", "--input", str(bad), "--lambda", "1", "--report", str(tmp_path / "r.json")]) == 3
    openpoly = tmp_path / "open.json"
    openpoly.write_text('{"vertices": [[0,0],[1,0],[1,1]], "closed": false}')
    assert cli.main(["reach", "--input", str(openpoly)]) == 3


def test_cli_internal_error(tmp_path, disk_pgm, monkeypatch):
    import flatreach.pipeline as pl

    def boom(config):
        raise RuntimeError("boom")

    monkeypatch.setattr(pl, "run_verify", boom)
    assert cli.main(["verify", "--input", str(disk_pgm), "--lambda", "1", "--report", str(tmp_path / "r.json")]) == 4


def test_console_script_entry_point():
    res = subprocess.run([sys.executable, "-m", "flatreach.cli", "bound"], capture_output=True, text=True)
    assert res.returncode == 0
    assert res.stdout.startswith("c_hat 0.2217")
