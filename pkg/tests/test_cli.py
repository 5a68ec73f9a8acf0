"""End-to-end CLI behavior: exit codes, artifacts, precedence, determinism."""

from __future__ import annotations

import filecmp
import json
import math
from pathlib import Path

import numpy as np
import pytest

from timelens import energy, fwhm, read_waveform_csv, write_artifacts
from timelens.cli import (
    EXIT_IO,
    EXIT_OK,
    EXIT_PHYSICS,
    EXIT_SEMANTIC,
    EXIT_SYNTAX,
    OUTPUT_ENV_VAR,
    main,
)

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"

FAST_GAUSSIAN = """\
[input]
kind = gaussian
fwhm = 5 ps

[system]
topology = field-lens
magnification = -20
focal_gdd = 5 ps2

[grid]
n_samples = 4096
"""


@pytest.fixture(autouse=True)
def _no_output_env(monkeypatch):
    monkeypatch.delenv(OUTPUT_ENV_VAR, raising=False)


@pytest.fixture
def fast_scenario(tmp_path):
    path = tmp_path / "fast.scn"
    path.write_text(FAST_GAUSSIAN, encoding="utf-8")
    return path


class TestSimulate:
    def test_writes_reports_and_stage_waveforms(self, fast_scenario, tmp_path):
        out = tmp_path / "results"
        assert main(["simulate", str(fast_scenario), "--out", str(out)]) == EXIT_OK
        report = json.loads((out / "report.json").read_text())
        names = sorted(p.name for p in out.iterdir())
        assert "report.json" in names
        assert "stage_00_input.csv" in names
        assert "stage_04_field_lens.csv" in names
        assert set(report["artifacts"]) == set(names)
        assert report["magnification"] == -20.0
        assert report["image"]["fwhm_ps"] == pytest.approx(100.0, rel=0.01)

    def test_report_rederivable_from_waveform_csv(self, fast_scenario, tmp_path):
        out = tmp_path / "results"
        main(["simulate", str(fast_scenario), "--out", str(out)])
        report = json.loads((out / "report.json").read_text())
        final = read_waveform_csv(
            (out / "stage_04_field_lens.csv").read_text()
        )
        assert energy(final) == pytest.approx(report["image"]["energy"], rel=1e-12)
        assert fwhm(final) == pytest.approx(report["image"]["fwhm_ps"], rel=1e-12)
        stage = report["stages"][-1]
        assert stage["energy"] == pytest.approx(energy(final), rel=1e-12)

    def test_waveform_csv_axis_uniform_and_increasing(self, fast_scenario, tmp_path):
        out = tmp_path / "results"
        main(["simulate", str(fast_scenario), "--out", str(out)])
        report = json.loads((out / "report.json").read_text())
        lines = (out / "stage_00_input.csv").read_text().splitlines()
        assert lines[0] == "t_ps,re,im,intensity"
        t = np.array([float(row.split(",")[0]) for row in lines[1:]])
        steps = np.diff(t)
        assert np.all(steps > 0)
        assert np.max(np.abs(steps - report["grid"]["dt_ps"])) < 1e-12

    def test_far_field_check_present_for_lens_systems(self, fast_scenario, tmp_path):
        out = tmp_path / "results"
        main(["simulate", str(fast_scenario), "--out", str(out)])
        report = json.loads((out / "report.json").read_text())
        assert report["far_field"]["passed"] is False  # focal gdd far too small
        assert report["far_field"]["margin"] == pytest.approx(
            12.5 / math.pi, rel=1e-9
        )

    def test_deterministic_artifacts(self, tmp_path):
        scenario = SCENARIO_DIR / "ideal_magnifier.scn"
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        assert main(["simulate", str(scenario), "--out", str(out_a)]) == EXIT_OK
        assert main(["simulate", str(scenario), "--out", str(out_b)]) == EXIT_OK
        names = sorted(p.name for p in out_a.iterdir())
        assert names == sorted(p.name for p in out_b.iterdir())
        match, mismatch, errors = filecmp.cmpfiles(out_a, out_b, names, shallow=False)
        assert mismatch == [] and errors == []
        assert sorted(match) == names


class TestOutputPrecedence:
    def test_flag_beats_scenario_output_dir(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        scenario = tmp_path / "s.scn"
        scenario.write_text(
            FAST_GAUSSIAN + "\n[output]\ndir = from-scenario\n", encoding="utf-8"
        )
        assert main(["simulate", str(scenario), "--out", "from-flag"]) == EXIT_OK
        assert (tmp_path / "from-flag" / "report.json").exists()
        assert not (tmp_path / "from-scenario").exists()

    def test_scenario_dir_beats_environment(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        monkeypatch.setenv(OUTPUT_ENV_VAR, "from-env")
        scenario = tmp_path / "s.scn"
        scenario.write_text(
            FAST_GAUSSIAN + "\n[output]\ndir = from-scenario\n", encoding="utf-8"
        )
        assert main(["simulate", str(scenario)]) == EXIT_OK
        assert (tmp_path / "from-scenario" / "report.json").exists()
        assert not (tmp_path / "from-env").exists()

    def test_environment_beats_default(self, tmp_path, monkeypatch, fast_scenario):
        monkeypatch.chdir(tmp_path)
        monkeypatch.setenv(OUTPUT_ENV_VAR, "from-env")
        assert main(["simulate", str(fast_scenario)]) == EXIT_OK
        assert (tmp_path / "from-env" / "report.json").exists()

    def test_default_directory(self, tmp_path, monkeypatch, fast_scenario):
        monkeypatch.chdir(tmp_path)
        assert main(["simulate", str(fast_scenario)]) == EXIT_OK
        assert (tmp_path / "timelens-out" / "report.json").exists()


class TestExitCodes:
    def test_missing_scenario_file(self, tmp_path):
        assert main(["simulate", str(tmp_path / "nope.scn")]) == EXIT_IO

    def test_syntax_error(self, tmp_path):
        bad = tmp_path / "bad.scn"
        bad.write_text("[input\nkind = gaussian\n", encoding="utf-8")
        assert main(["simulate", str(bad)]) == EXIT_SYNTAX

    def test_semantic_error(self, tmp_path):
        bad = tmp_path / "bad.scn"
        bad.write_text(
            FAST_GAUSSIAN.replace("fwhm = 5 ps", "fwhm = 5 rad"), encoding="utf-8"
        )
        assert main(["simulate", str(bad)]) == EXIT_SEMANTIC

    def test_physics_error(self, tmp_path):
        # a 30 ps window cannot hold the 100 ps magnified image
        cramped = tmp_path / "cramped.scn"
        cramped.write_text(
            FAST_GAUSSIAN + "window = 30 ps\n", encoding="utf-8"
        )
        assert main(["simulate", str(cramped), "--out", str(tmp_path / "o")]) == (
            EXIT_PHYSICS
        )

    def test_physics_failure_leaves_no_artifacts(self, tmp_path):
        cramped = tmp_path / "cramped.scn"
        cramped.write_text(FAST_GAUSSIAN + "window = 30 ps\n", encoding="utf-8")
        out = tmp_path / "o"
        main(["simulate", str(cramped), "--out", str(out)])
        assert not out.exists() or list(out.iterdir()) == []

    def test_unwritable_output_dir(self, tmp_path, fast_scenario):
        blocker = tmp_path / "blocker"
        blocker.write_text("a file where a directory must go", encoding="utf-8")
        assert main(["simulate", str(fast_scenario), "--out", str(blocker)]) == EXIT_IO

    def test_usage_errors(self, tmp_path, capsys):
        assert main([]) == EXIT_SYNTAX
        assert main(["replicate", "x.scn"]) == EXIT_SYNTAX
        assert main(["sweep", "x.scn"]) == EXIT_SYNTAX  # --param/--range required
        capsys.readouterr()

    def test_bad_range_spec(self, fast_scenario, tmp_path):
        args = ["sweep", str(fast_scenario), "--param", "system.focal_gdd",
                "--out", str(tmp_path / "o")]
        assert main(args + ["--range", "0:1"]) == EXIT_SYNTAX
        assert main(args + ["--range", "0:1:0"]) == EXIT_SYNTAX
        assert main(args + ["--range", "a:b:3"]) == EXIT_SYNTAX

    def test_sweep_of_non_numeric_key(self, fast_scenario, tmp_path):
        code = main(
            [
                "sweep", str(fast_scenario),
                "--param", "input.kind",
                "--range", "0:1:2",
                "--out", str(tmp_path / "o"),
            ]
        )
        assert code == EXIT_SEMANTIC


class TestDesign:
    def test_design_artifacts_and_values(self, tmp_path):
        out = tmp_path / "design"
        scenario = SCENARIO_DIR / "design_field_lens.scn"
        assert main(["design", str(scenario), "--out", str(out)]) == EXIT_OK
        report = json.loads((out / "report.json").read_text())
        bounds = {
            e["element"]: e["dispersion_bound_ps2"] for e in report["entries"]
        }
        assert bounds["D1"] == pytest.approx(5.25, rel=1e-12)
        assert bounds["Df"] == pytest.approx(5.0, rel=1e-12)
        assert bounds["D2"] == pytest.approx(105.0, rel=1e-12)
        assert bounds["Dr"] == pytest.approx(100.0, rel=1e-12)
        rows = (out / "design.csv").read_text().splitlines()
        assert rows[0].startswith("element,bound_kind,dispersion_bound_ps2")
        assert len(rows) == 1 + len(report["entries"])

    def test_design_subcommand_needs_design_section(self, fast_scenario, tmp_path):
        code = main(["design", str(fast_scenario), "--out", str(tmp_path / "o")])
        assert code == EXIT_SEMANTIC


class TestSweep:
    def test_sweep_rows_sorted_by_parameter(self, fast_scenario, tmp_path):
        out = tmp_path / "sweep"
        code = main(
            [
                "sweep", str(fast_scenario),
                "--param", "system.focal_gdd",
                "--range", "10:5:3",  # descending request
                "--out", str(out),
            ]
        )
        assert code == EXIT_OK
        rows = (out / "sweep.csv").read_text().splitlines()
        assert rows[0].split(",")[0] == "system_focal_gdd_ps2"
        values = [float(r.split(",")[0]) for r in rows[1:]]
        assert values == [5.0, 7.5, 10.0]
        # ideal imaging: the output width is set by M alone
        widths = [float(r.split(",")[1]) for r in rows[1:]]
        assert all(w == pytest.approx(100.0, rel=0.01) for w in widths)

    def test_fringe_scan_contrast_matches_visibility(self, tmp_path):
        scenario = SCENARIO_DIR / "fringe_scan.scn"
        sim_out = tmp_path / "sim"
        assert main(["simulate", str(scenario), "--out", str(sim_out)]) == EXIT_OK
        visibility = json.loads((sim_out / "report.json").read_text())[
            "interference"
        ]["visibility"]

        sweep_out = tmp_path / "fringe"
        code = main(
            [
                "sweep", str(scenario),
                "--param", "analysis.analyzer_phase",
                "--range", f"0:{2 * math.pi}:9",
                "--out", str(sweep_out),
            ]
        )
        assert code == EXIT_OK
        rows = (sweep_out / "sweep.csv").read_text().splitlines()
        header = rows[0].split(",")
        assert header[0] == "analysis_analyzer_phase_rad"
        column = header.index("central_energy")
        fringe = np.array([float(r.split(",")[column]) for r in rows[1:]])
        # single-port energy is sinusoidal in the analyzer phase
        phases = np.array([float(r.split(",")[0]) for r in rows[1:]])
        design = np.column_stack(
            [np.ones_like(phases), np.cos(phases), np.sin(phases)]
        )
        coeffs, *_ = np.linalg.lstsq(design, fringe, rcond=None)
        residual = fringe - design @ coeffs
        assert np.max(np.abs(residual)) < 1e-6 * np.max(fringe)
        contrast = (fringe.max() - fringe.min()) / (fringe.max() + fringe.min())
        assert contrast == pytest.approx(visibility, abs=1e-6)


class TestWriteArtifacts:
    def test_partial_writes_rolled_back(self, tmp_path):
        out = tmp_path / "artifacts"
        files = {"first.csv": "ok\n", "missing/second.csv": "fails\n"}
        with pytest.raises(OSError):
            write_artifacts(out, files)
        assert not (out / "first.csv").exists()
