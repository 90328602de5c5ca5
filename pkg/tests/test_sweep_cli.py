import math
import subprocess
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from qcomplement.cli import build_state, main
from qcomplement.errors import DomainError
from qcomplement.paper_formulas import FormulaId
from qcomplement.sweep import (
    FigureDataset,
    SweepConfig,
    audit_formula,
    compat_report,
    figure_data,
)


def run_cli(*args, cwd=None):
    return subprocess.run(
        [sys.executable, "-m", "qcomplement.cli", *args], capture_output=True, text=True, cwd=cwd
    )


def test_sweep_config_validation():
    with pytest.raises(ValueError):
        SweepConfig(alpha_steps=1)
    a, b = SweepConfig(seed=1), SweepConfig(seed=1, out_dir=Path("elsewhere"))
    assert a.config_hash() == b.config_hash()
    assert a.config_hash() != SweepConfig(seed=2).config_hash()


def test_fig1_bell_row_and_reload(tmp_path):
    ds = figure_data("fig1", SweepConfig(alpha_steps=3, param_steps=4))
    f_cl = ds.column("f_cl")
    np.testing.assert_allclose(ds.column("numeric")[f_cl == 0.5], 0.5)
    path = ds.write(tmp_path)
    again = FigureDataset.read(path)
    assert again.columns == ds.columns
    assert len(again.rows) == 12
    assert path.read_bytes().count(b"\r") == 0


def test_fig8_optimal_cloner_row():
    ds = figure_data("fig8", SweepConfig(alpha_steps=2, param_steps=2))
    row = dict(zip(ds.columns, ds.rows[-2]))  # alpha = 1, xi = 1/6
    assert row["alpha"] == 1.0 and row["xi"] == pytest.approx(1 / 6)
    assert row["dg_aa"] == pytest.approx(1 / 9)
    assert row["dg_cd"] == pytest.approx(1 / 16)
    assert row["printed_cd_valid"] == 0


def test_fig7_bound_on_small_grid():
    ds = figure_data("fig7", SweepConfig(alpha_steps=2))
    assert len(ds.rows) == 10
    assert np.all(ds.column("delta") <= 1 + 1e-4)


def test_empty_printed_cell_only_when_invalid(tmp_path):
    ds = figure_data("fig2", SweepConfig(alpha_steps=3, param_steps=3))
    text = ds.to_csv()
    for line in text.splitlines()[5:]:
        cells = line.split(",")
        if cells[3] == "":
            assert cells[4] == "0"
    path = tmp_path / "fig2.csv"
    tampered = text.replace(",,0\n", ",,1\n", 1)
    if tampered != text:
        path.write_text(tampered)
        with pytest.raises(ValueError):
            FigureDataset.read(path)


def test_reload_rejects_unsorted_rows(tmp_path):
    ds = figure_data("fig6", SweepConfig(param_steps=4))
    lines = ds.to_csv().splitlines()
    lines[5], lines[6] = lines[6], lines[5]
    path = tmp_path / "fig6.csv"
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(ValueError):
        FigureDataset.read(path)


def test_unknown_figure():
    with pytest.raises(DomainError):
        figure_data("fig10", SweepConfig())


def test_compat_report_examples():
    cfg = SweepConfig(alpha_steps=11, param_steps=11)
    assert audit_formula(FormulaId.CLONE_DG, cfg).verdict == "CONSISTENT"
    assert audit_formula(FormulaId.DC_DG_BB, cfg).verdict == "CONSISTENT"
    del_n = audit_formula(FormulaId.DEL_N, cfg)
    assert del_n.verdict == "DISCREPANT"
    assert del_n.max_deviation >= 0.5
    assert del_n.invalid_fraction == 1.0


def test_compat_report_is_deterministic():
    cfg = SweepConfig(alpha_steps=3, param_steps=3)
    ids = [FormulaId.CLONE_D, FormulaId.DEL_D]
    assert compat_report(cfg, ids).to_csv() == compat_report(cfg, ids).to_csv()


@pytest.mark.parametrize(
    "spec,dims",
    [
        ("clone:xi=0.25,alpha=0.6", (2, 2)),
        ("delete:alpha=0.6", (2, 2)),
        ("cd:xi=0.25,alpha=0.6", (2, 2)),
        ("cd:N=3,M=2,alpha=0.6", (2, 2, 2)),
        ("dc:xi=0.25,alpha=0.6,branch=bb", (2, 2)),
        ("dc:N=3,M=3,alpha=0.6", (2, 2, 2)),
        ("gm:N=3,alpha=0.6", (2, 2, 2)),
        ("gm:N=4,M=2,alpha=0.6", (2, 2, 2, 2)),
    ],
)
def test_build_state(spec, dims):
    assert build_state(spec).dims == dims


def test_cli_figure_is_byte_identical(tmp_path):
    args = ["figure", "fig3", "--alpha-steps", "4", "--param-steps", "5", "--seed", "3"]
    a = run_cli(*args, "--out", str(tmp_path / "a"))
    b = run_cli(*args, "--out", str(tmp_path / "b"))
    assert a.returncode == 0 and b.returncode == 0, a.stderr
    first = (tmp_path / "a" / "fig3.csv").read_bytes()
    assert first == (tmp_path / "b" / "fig3.csv").read_bytes()
    assert first.startswith(b"# tool=artifact")
    FigureDataset.read(tmp_path / "a" / "fig3.csv")


def test_cli_discord_figure_is_byte_identical(tmp_path):
    for name in ("a", "b"):
        assert main(["figure", "fig5", "--param-steps", "4", "--out", str(tmp_path / name)]) == 0
    assert (tmp_path / "a" / "fig5.csv").read_bytes() == (tmp_path / "b" / "fig5.csv").read_bytes()


def test_cli_measures():
    out = run_cli("measures", "clone:xi=0.5,alpha=0.3")
    assert out.returncode == 0
    values = dict(line.split("=") for line in out.stdout.split())
    assert float(values["negativity"]) == pytest.approx(0.5)
    assert float(values["geometric_discord"]) == pytest.approx(1.0)
    assert float(values["discord"]) == pytest.approx(1.0, abs=1e-6)


def test_cli_measures_multiqubit(capsys):
    assert main(["measures", "dc:N=3,M=3,alpha=0.5"]) == 0
    assert "D(1|rest)=" in capsys.readouterr().out


@pytest.mark.parametrize(
    "args",
    [
        ["figure", "fig10"],
        ["measures", "warp:alpha=1"],
        ["measures", "clone:xi=0.9,alpha=1"],
        ["measures", "clone:alpha=1"],
        ["measures", "clone:xi=0.2,alpha=1,extra=3"],
        ["accept", "--criteria", "42"],
        ["figure", "fig1", "--alpha-steps", "1"],
    ],
)
def test_cli_usage_errors(args):
    assert run_cli(*args).returncode == 2


def test_cli_compat_writes_report(tmp_path):
    out = run_cli("compat", "--alpha-steps", "3", "--param-steps", "3", "--out", str(tmp_path))
    assert out.returncode == 0, out.stderr
    text = (tmp_path / "compat.csv").read_text()
    assert "DEL_N" in text and "reduction" in text


def test_cli_accept_exit_codes():
    ok = run_cli("accept", "--criteria", "2,3", "--alpha-steps", "2")
    assert ok.returncode == 0, ok.stdout
    assert ok.stdout.count("[PASS]") == 2
    tampered = run_cli("accept", "--criteria", "1", "--tol", "0")
    assert tampered.returncode == 1
    assert "[FAIL] criterion 1" in tampered.stdout
