"""Command-line surface: JSON envelopes, exit codes, and flag validation."""

import json
import math
import shutil
import subprocess

import pytest

from leggettlab import MeasurementSettings, ensemble_averages, model_from_json, reduced_lhs_exact
from leggettlab._json import render
from leggettlab.cli import EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, main

RT2 = 1.0 / math.sqrt(2.0)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv, expect=EXIT_OK):
    code, out, err = run(capsys, *argv)
    assert code == expect, f"exit {code}, stderr: {err!r}"
    return json.loads(out)


class TestEnvelope:
    def test_key_order_and_version(self, capsys):
        doc = run_json(capsys, "eval", "--c", "0.5", "--alpha", "0", "--beta", "0")
        assert list(doc) == ["command", "inputs", "results", "artifact_version"]
        assert doc["command"] == "eval"
        from leggettlab import __version__

        assert doc["artifact_version"] == __version__

    def test_seed_present_only_for_random_commands(self, capsys):
        doc = run_json(capsys, "mc", "--c", "0.3", "--alpha", "0.7", "--beta", "1.1",
                       "--n", "1000", "--seed", "9")
        assert list(doc) == ["command", "inputs", "results", "artifact_version", "seed"]
        assert doc["seed"] == 9
        doc = run_json(capsys, "eval", "--c", "0.1", "--alpha", "0", "--beta", "0")
        assert "seed" not in doc

    def test_output_round_trips_byte_exactly(self, capsys):
        code, out, _ = run(capsys, "eval", "--c", "0.37", "--alpha", "0.71", "--beta", "2.9")
        assert code == EXIT_OK
        assert render(json.loads(out)) == out.strip()

    def test_floats_parse_back_to_exact_values(self, capsys):
        doc = run_json(capsys, "eval", "--c", "0.37", "--alpha", "0.71", "--beta", "2.9")
        expected = reduced_lhs_exact(0.37, MeasurementSettings(0.71, 2.9))
        assert doc["results"]["S"] == expected  # bit-exact through 17-digit rendering

    def test_help_exits_zero(self, capsys):
        code, _, _ = run(capsys, "--help")
        assert code == EXIT_OK

    def test_unknown_command_is_usage_error(self, capsys):
        code, _, _ = run(capsys, "transmogrify")
        assert code == EXIT_USAGE


class TestEval:
    def test_product_state_probabilities(self, capsys):
        doc = run_json(capsys, "eval", "--c", "0.5", "--alpha", "0", "--beta", "0")
        results = doc["results"]
        assert results["marginals"]["p_a_plus"] == pytest.approx(0.75, abs=1e-15)
        assert results["joint"]["p_pp"] == pytest.approx(0.75, abs=1e-15)
        assert results["joint"]["p_mm"] == pytest.approx(0.25, abs=1e-15)
        assert results["bounds"]["satisfied"] is True
        assert results["S"] <= 1.0 + 1e-12

    def test_degrees_flag_converts_and_reports_radians(self, capsys):
        doc = run_json(capsys, "eval", "--c", "0", "--alpha", "0", "--beta", "90", "--degrees")
        assert doc["inputs"]["beta"] == pytest.approx(math.pi / 2.0)
        assert doc["results"]["S"] == pytest.approx(1.0, abs=1e-15)

    def test_out_of_range_weight_is_usage_error(self, capsys):
        code, _, err = run(capsys, "eval", "--c", "2", "--alpha", "0", "--beta", "0")
        assert code == EXIT_USAGE
        assert "[0, 1]" in err

    def test_missing_flag_is_usage_error(self, capsys):
        code, _, _ = run(capsys, "eval", "--c", "0.5", "--alpha", "0")
        assert code == EXIT_USAGE


class TestScan:
    def test_small_diagonal_scan(self, capsys):
        doc = run_json(capsys, "scan", "--step", "0.05", "--c-max", "0.2")
        results = doc["results"]
        assert results["max_S"] <= 1.0 + 1e-9
        assert results["violation_count"] == 0
        assert results["violations"] == []
        assert results["refined"] is True
        assert results["grid_points"] == 5 * 63 * 63
        assert results["truncation_discrepancy"] is False  # no ladder attached

    def test_eps_ladder_marks_predictions(self, capsys):
        doc = run_json(capsys, "scan", "--step", "0.02", "--c-max", "0.1",
                       "--eps-ladder", "1e-2:5e-3")
        results = doc["results"]
        predicted = results["first_order_predicted_violations"]
        assert predicted and all(set(p) == {"c", "eps"} for p in predicted)
        assert results["truncation_discrepancy"] is True
        assert results["violation_count"] == 0

    def test_negative_tolerance_exits_three(self, capsys):
        doc = run_json(capsys, "scan", "--step", "0.1", "--c-max", "0.1",
                       "--tolerance", "-0.5", expect=EXIT_VIOLATION)
        assert doc["results"]["violation_count"] > 0
        assert doc["results"]["violations"]

    def test_invalid_step_is_usage_error(self, capsys):
        code, _, err = run(capsys, "scan", "--step", "-1")
        assert code == EXIT_USAGE
        assert "step" in err

    def test_no_refine_flag(self, capsys):
        doc = run_json(capsys, "scan", "--family", "singlet", "--step", "0.2", "--no-refine")
        assert doc["results"]["refined"] is False

    def test_csv_export(self, capsys, tmp_path):
        path = str(tmp_path / "out.csv")
        doc = run_json(capsys, "scan", "--family", "singlet", "--step", "0.2", "--csv", path)
        assert doc["results"]["csv_path"] == path
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
        assert lines[0] == "c,alpha,beta,S"
        assert len(lines) > 1

    def test_fixed_matrix_via_coeffs(self, capsys):
        direct = run_json(capsys, "scan", "--family", "singlet", "--step", "0.2", "--no-refine")
        coeffs = f"0,{RT2!r},{-RT2!r},0"
        supplied = run_json(capsys, "scan", "--family", "fixed-matrix",
                            "--coeffs", coeffs, "--step", "0.2", "--no-refine")
        assert supplied["results"]["max_S"] == direct["results"]["max_S"]
        assert supplied["inputs"]["coeffs"] == coeffs

    def test_coeffs_require_fixed_matrix_family(self, capsys):
        code, _, _ = run(capsys, "scan", "--coeffs", "1,0,0,0", "--step", "0.2")
        assert code == EXIT_USAGE

    def test_unnormalized_coeffs_rejected(self, capsys):
        code, _, _ = run(capsys, "scan", "--family", "fixed-matrix",
                         "--coeffs", "1,1,1,1", "--step", "0.2")
        assert code == EXIT_USAGE

    def test_backend_flag_changes_nothing_but_timing(self, capsys):
        from leggettlab.kernels import HAVE_NUMBA

        if not HAVE_NUMBA:
            pytest.skip("numba not importable")
        args = ("scan", "--step", "0.05", "--c-max", "0.2", "--no-refine")
        compiled = run_json(capsys, *args, "--backend", "numba")
        plain = run_json(capsys, *args, "--backend", "numpy")
        del compiled["results"]["wall_time"], plain["results"]["wall_time"]
        assert compiled == plain


class TestMc:
    def test_quantum_sampling_with_z_scores(self, capsys):
        doc = run_json(capsys, "mc", "--c", "0.3", "--alpha", "0.7", "--beta", "1.1",
                       "--n", "100000", "--seed", "1")
        results = doc["results"]
        assert results["counts"]["n_total"] == 100000
        assert sum(results["counts"][k] for k in ("n_pp", "n_pm", "n_mp", "n_mm")) == 100000
        for z in results["z_scores"]:
            assert abs(z) < 6.0

    def test_degenerate_product_average_has_zero_error(self, capsys):
        # At aligned analyzers every draw lands in an equal-outcome cell,
        # so the product estimate is exactly 1 with zero standard error.
        doc = run_json(capsys, "mc", "--c", str(RT2), "--alpha", "0", "--beta", "0",
                       "--n", "10000", "--seed", "3")
        results = doc["results"]
        assert results["estimate"]["triple"]["ab_bar"] == 1.0
        assert results["estimate"]["std_errors"][2] == 0.0
        assert results["z_scores"][2] == 0.0

    def test_worker_count_invisible_in_output(self, capsys):
        args = ("mc", "--c", "0.3", "--alpha", "0.7", "--beta", "1.1",
                "--n", "50000", "--seed", "5")
        _, base, _ = run(capsys, *args, "--workers", "1")
        _, multi, _ = run(capsys, *args, "--workers", "4")
        assert base == multi

    def test_model_file_round_trip(self, capsys, tmp_path):
        path = str(tmp_path / "model.json")
        run_json(capsys, "hv", "--models", "1", "--labels", "13", "--seed", "21",
                 "--frechet-grid", "0", "--emit-model", path)
        doc = run_json(capsys, "mc", "--model", path, "--n", "20000", "--seed", "2")
        with open(path, encoding="utf-8") as fh:
            model = model_from_json(fh.read())
        exact = ensemble_averages(model)
        assert doc["results"]["analytic"]["triple"]["ab_bar"] == exact.ab_bar
        assert doc["inputs"] == {"model": path, "n": 20000}

    def test_model_excludes_state_flags(self, capsys, tmp_path):
        path = str(tmp_path / "model.json")
        run_json(capsys, "hv", "--models", "1", "--labels", "3", "--seed", "1",
                 "--frechet-grid", "0", "--emit-model", path)
        code, _, _ = run(capsys, "mc", "--model", path, "--c", "0.5")
        assert code == EXIT_USAGE

    def test_missing_model_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "mc", "--model", str(tmp_path / "absent.json"))
        assert code == EXIT_USAGE
        assert "cannot read model file" in err

    def test_invalid_sample_count(self, capsys):
        code, _, _ = run(capsys, "mc", "--c", "0.3", "--alpha", "0", "--beta", "0", "--n", "0")
        assert code == EXIT_USAGE

    def test_state_flags_required_without_model(self, capsys):
        code, _, err = run(capsys, "mc", "--c", "0.3", "--alpha", "0.7")
        assert code == EXIT_USAGE
        assert "beta" in err


class TestHv:
    def test_property_run_reports_compliance(self, capsys):
        doc = run_json(capsys, "hv", "--models", "50", "--labels", "7", "--seed", "4",
                       "--frechet-grid", "5")
        results = doc["results"]
        assert results["max_overshoot"] <= 1e-12
        assert results["all_within_bounds"] is True
        assert results["frechet"]["max_lower_error"] <= 1e-9
        assert results["frechet"]["max_upper_error"] <= 1e-9
        triple = results["first_triple"]
        assert abs(triple["ab_bar"]) <= 1.0

    def test_single_point_mass_model(self, capsys):
        doc = run_json(capsys, "hv", "--models", "1", "--labels", "1", "--seed", "0",
                       "--frechet-grid", "0")
        triple = doc["results"]["first_triple"]
        assert abs(triple["a_bar"]) == 1.0 and abs(triple["b_bar"]) == 1.0
        assert triple["ab_bar"] == triple["a_bar"] * triple["b_bar"]
        assert doc["results"]["frechet"] is None

    def test_enumeration_method(self, capsys):
        doc = run_json(capsys, "hv", "--models", "1", "--labels", "3", "--seed", "2",
                       "--frechet-grid", "3", "--method", "enumeration")
        assert doc["results"]["frechet"]["method"] == "enumeration"
        assert doc["results"]["frechet"]["max_lower_error"] <= 1e-9

    def test_validation(self, capsys):
        assert run(capsys, "hv", "--labels", "0")[0] == EXIT_USAGE
        assert run(capsys, "hv", "--models", "0")[0] == EXIT_USAGE
        assert run(capsys, "hv", "--frechet-grid", "-1")[0] == EXIT_USAGE


class TestExpand:
    def test_discrepancy_flagged_for_small_weight(self, capsys):
        doc = run_json(capsys, "expand", "--c", "0.005", "--eps", "0.01")
        row = doc["results"]["rows"][0]
        assert row["lhs_first_order"] > 1.0
        assert row["lhs_exact"] <= 1.0
        assert row["first_order_holds"] is False
        assert row["discrepancy"] is True
        assert doc["results"]["any_discrepancy"] is True

    def test_default_ladder_shows_second_order_residual(self, capsys):
        doc = run_json(capsys, "expand", "--c", "0.3")
        results = doc["results"]
        assert len(results["rows"]) == 10
        assert all(3.5 <= r <= 4.5 for r in results["ratios"])
        assert all(row["first_order_holds"] is True for row in results["rows"])
        assert results["any_discrepancy"] is False

    def test_zero_weight_has_no_discrepancy(self, capsys):
        doc = run_json(capsys, "expand", "--c", "0", "--eps", "0.01")
        row = doc["results"]["rows"][0]
        assert row["lhs_first_order"] == 1.0  # equality, not a predicted violation
        assert row["discrepancy"] is False

    def test_predicate_undefined_reported_as_null(self, capsys):
        doc = run_json(capsys, "expand", "--c", "0.8", "--eps", "0.01")
        assert doc["results"]["rows"][0]["first_order_holds"] is None

    def test_flag_conflicts(self, capsys):
        code, _, _ = run(capsys, "expand", "--c", "0.3", "--eps", "0.01",
                         "--eps-ladder", "1e-2:1e-3")
        assert code == EXIT_USAGE
        code, _, _ = run(capsys, "expand", "--c", "0.3", "--eps-ladder", "bogus")
        assert code == EXIT_USAGE


class TestConsoleScript:
    def test_installed_entry_point(self):
        exe = shutil.which("leggettlab")
        assert exe, "console script 'leggettlab' not on PATH"
        proc = subprocess.run(
            [exe, "eval", "--c", "0.5", "--alpha", "0", "--beta", "0"],
            capture_output=True, text=True, timeout=60,
        )
        assert proc.returncode == EXIT_OK
        doc = json.loads(proc.stdout)
        assert doc["command"] == "eval"
