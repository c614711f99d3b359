"""Command line interface: output formats, exit codes, determinism."""

import csv
import math
import subprocess
import sys

import pytest

from symphot.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_overlap_identical_pulses(capsys):
    code, out, _ = run_cli(capsys, "overlap",
                           "--sigma1", "1.0", "--sigma2", "1.0")
    assert code == 0
    assert out.splitlines()[0] == "1.000000000000+0.000000000000i"


def test_overlap_quadrature_cross_check(capsys):
    code, out, _ = run_cli(capsys, "overlap",
                           "--sigma1", "1.0", "--sigma2", "1.3",
                           "--tau2", "0.9", "--omega2", "1.7",
                           "--quadrature")
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 3
    # last line is the absolute closed-form/quadrature difference
    assert float(lines[2]) < 1e-8


def test_overlap_rejects_bad_sigma(capsys):
    with pytest.raises(SystemExit) as info:
        main(["overlap", "--sigma1", "-1.0", "--sigma2", "1.0"])
    assert info.value.code == 2
    err = capsys.readouterr().err
    assert "--sigma1" in err


def test_hom_sweep_csv_contents(tmp_path, capsys):
    out_file = tmp_path / "sweep.csv"
    code, _, _ = run_cli(capsys, "hom-sweep",
                         "--dtau-range", "-2:2:5",
                         "--domega-range", "0:0:1",
                         "--out", str(out_file))
    assert code == 0
    rows = list(csv.DictReader(out_file.open()))
    assert len(rows) == 5
    assert list(rows[0]) == ["delta_tau", "delta_omega", "gamma_sq", "p_coinc"]
    for row in rows:
        gsq = float(row["gamma_sq"])
        # every row satisfies the two-photon coincidence law
        assert math.isclose(float(row["p_coinc"]), 0.5 * (1 - gsq),
                            abs_tol=1e-12)
        # equal widths, no detuning in frequency:
        # gamma_sq = exp(-dtau^2 / (4 sigma^2))
        expected = math.exp(-float(row["delta_tau"]) ** 2 / 4.0)
        assert math.isclose(gsq, expected, abs_tol=1e-10)
    center = [r for r in rows if float(r["delta_tau"]) == 0.0]
    assert center[0]["p_coinc"] == "0"
    assert center[0]["gamma_sq"] == "1"


def test_hom_sweep_is_deterministic(tmp_path, capsys):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    for f in (a, b):
        code, _, _ = run_cli(capsys, "hom-sweep",
                             "--dtau-range", "-1:1:3",
                             "--domega-range", "-1:1:3",
                             "--out", str(f))
        assert code == 0
    assert a.read_bytes() == b.read_bytes()


def test_hom_sweep_range_validation(capsys):
    with pytest.raises(SystemExit) as info:
        main(["hom-sweep", "--dtau-range", "0:1:1", "--out", "x.csv"])
    assert info.value.code == 2


def test_hom_sweep_unwritable_path(tmp_path, capsys):
    code, _, err = run_cli(capsys, "hom-sweep",
                           "--dtau-range", "0:0:1",
                           "--domega-range", "0:0:1",
                           "--out", str(tmp_path / "missing" / "x.csv"))
    assert code == 3
    assert err != ""


def test_hom_sweep_plot_renders_png(tmp_path, capsys):
    out_file = tmp_path / "sweep.csv"
    png_file = tmp_path / "dip.png"
    code, _, _ = run_cli(capsys, "hom-sweep",
                         "--dtau-range", "-2:2:9",
                         "--domega-range", "0:0:1",
                         "--out", str(out_file),
                         "--plot", str(png_file))
    assert code == 0
    assert png_file.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_hom_sweep_plot_default_name(tmp_path, capsys):
    out_file = tmp_path / "sweep.csv"
    code, _, _ = run_cli(capsys, "hom-sweep",
                         "--dtau-range", "0:0:1",
                         "--domega-range", "0:0:1",
                         "--out", str(out_file),
                         "--plot")
    assert code == 0
    sibling = tmp_path / "sweep.csv.png"
    assert sibling.exists()


def test_selfcheck_passes(capsys):
    code, out, _ = run_cli(capsys, "selfcheck", "--seed", "7", "--cases", "8")
    assert code == 0
    assert "permanent-identity" in out
    assert "ccr-preservation" in out
    assert " ok" in out and "FAIL" not in out


def test_selfcheck_deterministic(capsys):
    _, out1, _ = run_cli(capsys, "selfcheck", "--seed", "3", "--cases", "6")
    _, out2, _ = run_cli(capsys, "selfcheck", "--seed", "3", "--cases", "6")
    assert out1 == out2


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "symphot.cli", "overlap",
         "--sigma1", "1.0", "--sigma2", "1.0"],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "1.000000000000+0.000000000000i"
