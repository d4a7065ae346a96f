import csv
import io
import json

import pytest

from transistor_ops import (
    Activation,
    AnalysisLevel,
    FP64,
    LinearModel,
    analyze,
    parse_model,
)
from transistor_ops.cli import main
from transistor_ops.energy import write_linear_model

from conftest import fc_model, model_doc, write_model_doc


def run_cli(capsys, *args):
    code = main([str(a) for a in args])
    captured = capsys.readouterr()
    return code, captured.out


def rows_of(text):
    return list(csv.reader(io.StringIO(text)))


@pytest.fixture
def width4_doc(tmp_path):
    return write_model_doc(tmp_path / "w4.json", model_doc([4, 4, 4, 4, 1]))


@pytest.fixture
def eq_fitted(tmp_path):
    path = tmp_path / "fitted.json"
    path.write_text(write_linear_model(LinearModel(2393.0, 9.605e-6, 1.0, 2)))
    return str(path)


class TestCount:
    def test_width4_inference_totals(self, capsys, width4_doc):
        code, out = run_cli(capsys, "count", width4_doc, "--level", "inference")
        assert code == 0
        rows = rows_of(out)
        total = next(r for r in rows if r[:3] == ["per_instance", "all", "total"])
        assert total[3:] == ["65", "13", "52", "13", "13"]

    def test_missing_file(self, capsys):
        code, _ = run_cli(capsys, "count", "no-such-model.json")
        assert code == 2

    def test_conv_model_at_training_level(self, capsys, tmp_path):
        doc = model_doc([4, 1])
        doc["layers"] = [{"kind": "convolutional", "out_width": 2, "kernel": 3,
                         "in_channels": 1, "out_channels": 2, "activation": "gelu"}]
        path = write_model_doc(tmp_path / "conv.json", doc)
        code, _ = run_cli(capsys, "count", path, "--level", "training")
        assert code == 3

    def test_validation_includes_loss_row(self, capsys, width4_doc):
        code, out = run_cli(capsys, "count", width4_doc, "--level", "validation")
        assert code == 0
        rows = rows_of(out)
        loss = next(r for r in rows if r[2] == "loss")
        assert loss[3:] == ["0", "1", "1", "1", "0"]


class TestTos:
    def test_total_matches_library(self, capsys, width4_doc, width4_dnn):
        code, out = run_cli(capsys, "tos", width4_doc, "--level", "training", "--raw")
        assert code == 0
        rows = rows_of(out)
        total = float(next(r for r in rows if r[:2] == ["per_run", "total"])[2])
        want = analyze(width4_dnn, AnalysisLevel.TRAINING).per_run.total
        assert total == want

    def test_fp64_override_increases_total(self, capsys, width4_doc):
        def total_for(*extra):
            _, out = run_cli(capsys, "tos", width4_doc, "--raw", *extra)
            rows = rows_of(out)
            return float(next(r for r in rows if r[:2] == ["per_run", "total"])[2])
        assert total_for("--format", "fp64") > total_for()

    def test_nonlinear_share_reported(self, capsys, width4_doc):
        code, out = run_cli(capsys, "tos", width4_doc, "--raw")
        assert code == 0
        rows = rows_of(out)
        share = float(next(r for r in rows if r[1] == "nonlinear_share")[2])
        assert 0.0 < share < 1.0

    def test_bad_cost_table(self, capsys, width4_doc, tmp_path):
        bad = tmp_path / "table.json"
        bad.write_text('{"nand": 4}')
        code, _ = run_cli(capsys, "tos", width4_doc, "--cost-table", str(bad))
        assert code == 2

    def test_cost_table_env_var(self, capsys, width4_doc, tmp_path, monkeypatch):
        table = tmp_path / "table.json"
        table.write_text('{"fa": 20}')
        _, out_default = run_cli(capsys, "tos", width4_doc, "--raw")
        monkeypatch.setenv("TOS_COST_TABLE", str(table))
        _, out_env = run_cli(capsys, "tos", width4_doc, "--raw")
        assert out_env != out_default

    def test_out_file(self, capsys, width4_doc, tmp_path):
        out_path = tmp_path / "tos.csv"
        code, out = run_cli(capsys, "tos", width4_doc, "--out", out_path)
        assert code == 0 and out == ""
        assert out_path.read_text().startswith("scope,quantity,value")


def write_trace(path, samples):
    lines = ["elapsed_s,power_w"] + [f"{t},{p}" for t, p in samples]
    path.write_text("\n".join(lines) + "\n")
    return str(path)


class TestIngest:
    def test_constant_power_runs_aggregate_to_the_constant(self, capsys, tmp_path):
        paths = []
        for run in range(60):
            paths.append(write_trace(tmp_path / f"m1__r{run:02d}.csv",
                                     [(0.0, 8.0), (10.0, 8.0)]))
        code, out = run_cli(capsys, "ingest", *paths)
        assert code == 0
        rows = rows_of(out)
        agg = next(r for r in rows if r[1] == "trimmed_mean")
        assert agg[0] == "m1"
        assert float(agg[2]) == 80.0

    def test_polyline_fixture_matches_analytic_value(self, capsys, tmp_path):
        path = write_trace(tmp_path / "poly__r0.csv",
                           [(0.0, 1.0), (1.0, 3.0), (2.0, 1.0)])
        code, out = run_cli(capsys, "ingest", path, "--trim-k", "0")
        assert code == 0
        rows = rows_of(out)
        sample = next(r for r in rows if r[1] == "r0")
        assert float(sample[2]) == 4.0

    def test_trim_k_too_large(self, capsys, tmp_path):
        path = write_trace(tmp_path / "m__r0.csv", [(0.0, 1.0), (1.0, 1.0)])
        code, _ = run_cli(capsys, "ingest", path, "--trim-k", "5")
        assert code == 2

    def test_malformed_trace_names_file_and_row(self, capsys, tmp_path):
        path = tmp_path / "bad__r0.csv"
        path.write_text("elapsed_s,power_w\n0.0,1\noops,1\n")
        code = main(["ingest", str(path)])
        err = capsys.readouterr().err
        assert code == 2
        assert "bad__r0.csv" in err and "row 3" in err

    def test_vendor_adapter(self, capsys, tmp_path):
        trace = tmp_path / "m__r0.csv"
        trace.write_text("ts,watts\n0.0,10\n5.0,10\n")
        adapter = tmp_path / "adapter.json"
        adapter.write_text('{"time_column": "ts", "power_column": "watts"}')
        code, out = run_cli(capsys, "ingest", str(trace), "--trim-k", "0",
                            "--adapter", str(adapter))
        assert code == 0
        sample = next(r for r in rows_of(out) if r[1] == "r0")
        assert float(sample[2]) == 50.0


class TestFit:
    def test_two_point_reference(self, capsys, tmp_path):
        pairs = tmp_path / "pairs.csv"
        pairs.write_text("tos,joules\n0,2393\n1e9,11998\n")
        code, out = run_cli(capsys, "fit", str(pairs))
        assert code == 0
        doc = json.loads(out)
        assert doc["intercept_j"] == pytest.approx(2393.0, rel=1e-12)
        assert doc["slope_j_per_to"] == pytest.approx(9.605e-6, rel=1e-12)
        assert doc["r_squared"] == 1.0

    def test_single_point_fails(self, capsys, tmp_path):
        pairs = tmp_path / "pairs.csv"
        pairs.write_text("tos,joules\n1,1\n")
        code, _ = run_cli(capsys, "fit", str(pairs))
        assert code == 2


class TestEstimate:
    def test_zero_workload_predicts_the_intercept(self, capsys, tmp_path, eq_fitted):
        tos_file = tmp_path / "tos.csv"
        tos_file.write_text("model_id,tos\nsynthetic,0\n")
        code, out = run_cli(capsys, "estimate", "--fitted", eq_fitted,
                            "--tos-file", str(tos_file), "--raw")
        assert code == 0
        row = rows_of(out)[1]
        assert row[0] == "synthetic"
        assert float(row[2]) == 2393.0

    def test_identity_model_predicts_the_workload(self, capsys, tmp_path, width4_doc):
        fitted = tmp_path / "identity.json"
        fitted.write_text(write_linear_model(LinearModel(0.0, 1.0, 1.0, 2)))
        code, out = run_cli(capsys, "estimate", width4_doc, "--fitted", str(fitted),
                            "--level", "training", "--scale", "run", "--raw")
        assert code == 0
        row = rows_of(out)[1]
        assert float(row[1]) == float(row[2])

    def test_verification_family_gives_fifteen_rows(self, capsys, tmp_path,
                                                    width4_dnn, eq_fitted):
        from transistor_ops import model_family, serialize_model
        paths = []
        family = model_family(width4_dnn, range(14, 19),
                              [Activation.SIGMOID, Activation.TANH,
                               Activation.GELU])
        for member in family:
            path = tmp_path / f"{member.name}.json"
            path.write_text(serialize_model(member))
            paths.append(str(path))
        code, out = run_cli(capsys, "estimate", *paths, "--fitted", eq_fitted,
                            "--level", "training", "--scale", "step")
        assert code == 0
        assert len(rows_of(out)) == 1 + 15

    def test_needs_some_input(self, capsys, eq_fitted):
        code, _ = run_cli(capsys, "estimate", "--fitted", eq_fitted)
        assert code == 2


class TestSweep:
    def test_training_widths_produce_monotone_rows(self, capsys, tmp_path, width4_doc):
        code, out = run_cli(capsys, "sweep", width4_doc, "--widths", "4..13",
                            "--activations", "sigmoid", "--raw")
        assert code == 0
        rows = rows_of(out)[1:]
        assert len(rows) == 10
        tos = [float(r[2]) for r in rows]
        assert tos == sorted(tos)
        assert all(t1 < t2 for t1, t2 in zip(tos, tos[1:]))

    def test_verification_family_row_count(self, capsys, width4_doc):
        code, out = run_cli(capsys, "sweep", width4_doc, "--widths", "14..18",
                            "--activations", "sigmoid,tanh,gelu")
        assert code == 0
        assert len(rows_of(out)) == 1 + 15

    def test_tanh_and_gelu_rows_within_two_percent(self, capsys, width4_doc):
        code, out = run_cli(capsys, "sweep", width4_doc, "--widths", "4..13",
                            "--activations", "tanh,gelu", "--raw")
        assert code == 0
        rows = rows_of(out)[1:]
        for i in range(0, len(rows), 2):
            tanh_tos, gelu_tos = float(rows[i][2]), float(rows[i + 1][2])
            assert abs(tanh_tos - gelu_tos) / gelu_tos < 0.02

    def test_empty_width_range(self, capsys, width4_doc):
        code, _ = run_cli(capsys, "sweep", width4_doc, "--widths", "9..4")
        assert code == 2

    def test_predictions_column_with_fitted_model(self, capsys, width4_doc, eq_fitted):
        code, out = run_cli(capsys, "sweep", width4_doc, "--widths", "4..5",
                            "--activations", "sigmoid", "--fitted-model", eq_fitted,
                            "--raw")
        assert code == 0
        for row in rows_of(out)[1:]:
            assert float(row[5]) == pytest.approx(2393.0 + 9.605e-6 * float(row[2]),
                                                  rel=1e-12)

    def test_byte_stable_output(self, capsys, width4_doc):
        _, first = run_cli(capsys, "sweep", width4_doc, "--widths", "4..8")
        _, second = run_cli(capsys, "sweep", width4_doc, "--widths", "4..8")
        assert first == second

    def test_svg_rendering(self, capsys, tmp_path, width4_doc):
        svg = tmp_path / "sweep.svg"
        code, _ = run_cli(capsys, "sweep", width4_doc, "--widths", "4..6",
                          "--svg", svg)
        assert code == 0
        body = svg.read_text()
        assert body.startswith("<svg") and "polyline" in body


class TestCompare:
    @staticmethod
    def write_predictions(path, rows):
        lines = ["model_id,predicted_j"] + [f"{m},{v}" for m, v in rows]
        path.write_text("\n".join(lines) + "\n")
        return str(path)

    @staticmethod
    def write_actual(path, rows):
        lines = ["model_id,joules"] + [f"{m},{v}" for m, v in rows]
        path.write_text("\n".join(lines) + "\n")
        return str(path)

    def test_identical_predictions_give_identical_columns(self, capsys, tmp_path):
        preds = [("a", 98.0), ("b", 210.0)]
        actual = [("a", 100.0), ("b", 200.0)]
        p1 = self.write_predictions(tmp_path / "p1.csv", preds)
        p2 = self.write_predictions(tmp_path / "p2.csv", preds)
        act = self.write_actual(tmp_path / "act.csv", actual)
        code, out = run_cli(capsys, "compare", p1, p2, act, "--raw")
        assert code == 0
        per_model, summary = out.split("\n\n")
        for row in rows_of(per_model)[1:]:
            assert row[2] == row[4] and row[3] == row[5]
        summary_rows = rows_of(summary)
        assert summary_rows[1][1:] == summary_rows[2][1:]

    def test_mismatched_lengths(self, capsys, tmp_path):
        p1 = self.write_predictions(tmp_path / "p1.csv", [("a", 1.0)])
        p2 = self.write_predictions(tmp_path / "p2.csv", [("a", 1.0), ("b", 2.0)])
        act = self.write_actual(tmp_path / "act.csv", [("a", 1.0), ("b", 2.0)])
        code, _ = run_cli(capsys, "compare", p1, p2, act)
        assert code == 2


class TestTradeoff:
    @staticmethod
    def write_candidates(path, rows):
        lines = ["model_id,energy_j,loss"] + [f"{m},{e},{l}" for m, e, l in rows]
        path.write_text("\n".join(lines) + "\n")
        return str(path)

    def test_ledger_fixture(self, capsys, tmp_path):
        path = self.write_candidates(tmp_path / "c.csv",
                                     [("A", 10.0, 0.5), ("B", 5.0, 0.9)])
        code, out = run_cli(capsys, "tradeoff", path, "--alpha", "0.5")
        assert code == 0
        assert out.strip() == "B"

    def test_boundaries(self, capsys, tmp_path):
        path = self.write_candidates(tmp_path / "c.csv",
                                     [("A", 10.0, 0.5), ("B", 5.0, 0.9)])
        _, out = run_cli(capsys, "tradeoff", path, "--alpha", "1")
        assert out.strip() == "B"
        _, out = run_cli(capsys, "tradeoff", path, "--alpha", "0")
        assert out.strip() == "A"

    def test_alpha_out_of_range(self, capsys, tmp_path):
        path = self.write_candidates(tmp_path / "c.csv", [("A", 1.0, 1.0)])
        code, _ = run_cli(capsys, "tradeoff", path, "--alpha", "2")
        assert code == 2


class TestOracleCommand:
    def test_segments_match_the_census(self, capsys, width4_doc, width4_dnn):
        from transistor_ops import count_model
        code, out = run_cli(capsys, "oracle", width4_doc)
        assert code == 0
        rows = rows_of(out)
        forward = next(r for r in rows if r[0] == "forward")
        report = count_model(width4_dnn, AnalysisLevel.TRAINING)
        total = [0] * 5
        for profile in report.layers:
            total = [a + b for a, b in zip(total, profile.forward.as_tuple())]
        assert [int(v) for v in forward[1:]] == total
