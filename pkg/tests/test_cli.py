import csv
import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from dendrocut.cli import main
from dendrocut.fixtures import make_planted_blobs


@pytest.fixture(scope="module")
def fixture_files(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli_data")
    planted = make_planted_blobs(n=90, seed=11)
    header = ",".join(name for name, _ in planted.dataset.schema)
    data_lines = [header] + [
        ",".join(f"{v:.10g}" for v in row) for row in planted.dataset.values
    ]
    (root / "data.csv").write_text("\n".join(data_lines) + "\n")
    emb_lines = ["x,y"] + [",".join(f"{v:.10g}" for v in row) for row in planted.embedding.coords]
    (root / "embedding.csv").write_text("\n".join(emb_lines) + "\n")
    return root


def invoke(args):
    return CliRunner().invoke(main, args)


class TestRun:
    def test_planted_fixture_reports_three_clusters(self, fixture_files, tmp_path):
        out = tmp_path / "solution.json"
        result = invoke(
            [
                "run",
                "--data", str(fixture_files / "data.csv"),
                "--embedding", str(fixture_files / "embedding.csv"),
                "--alpha", "250", "--beta", "1.6",
                "--time-limit", "5000", "--iteration-cap", "8",
                "--out", str(out),
            ]
        )
        assert result.exit_code == 0, result.output
        doc = json.loads(out.read_text())
        assert doc["scores"]["si"] > 0
        assert len(doc["patterns"]) == 3
        report = Path(str(out) + ".report.txt").read_text()
        assert "clusters: 3" in report
        assert "cluster 0" in report

    def test_negative_alpha_is_usage_error(self, fixture_files, tmp_path):
        result = invoke(
            [
                "run",
                "--data", str(fixture_files / "data.csv"),
                "--embedding", str(fixture_files / "embedding.csv"),
                "--alpha=-1", "--beta", "1.6",
                "--time-limit", "1000",
                "--out", str(tmp_path / "x.json"),
            ]
        )
        assert result.exit_code == 2

    def test_iteration_cap_one_gives_single_cluster(self, fixture_files, tmp_path):
        out = tmp_path / "k1.json"
        result = invoke(
            [
                "run",
                "--data", str(fixture_files / "data.csv"),
                "--embedding", str(fixture_files / "embedding.csv"),
                "--alpha", "250", "--beta", "1.6",
                "--time-limit", "5000", "--iteration-cap", "1",
                "--out", str(out),
            ]
        )
        assert result.exit_code == 0, result.output
        doc = json.loads(out.read_text())
        assert len(doc["patterns"]) == 1
        assert doc["scores"]["si"] == 0

    def test_pca_flag_replaces_embedding(self, fixture_files, tmp_path):
        out = tmp_path / "pca.json"
        result = invoke(
            [
                "run",
                "--data", str(fixture_files / "data.csv"),
                "--pca",
                "--alpha", "250", "--beta", "1.6",
                "--time-limit", "3000", "--iteration-cap", "4",
                "--out", str(out),
            ]
        )
        assert result.exit_code == 0, result.output

    def test_run_is_reproducible_with_iteration_cap(self, fixture_files, tmp_path):
        outputs = []
        for name in ("a.json", "b.json"):
            out = tmp_path / name
            result = invoke(
                [
                    "run",
                    "--data", str(fixture_files / "data.csv"),
                    "--embedding", str(fixture_files / "embedding.csv"),
                    "--alpha", "300", "--beta", "1.4",
                    "--time-limit", "60000", "--iteration-cap", "5",
                    "--out", str(out),
                ]
            )
            assert result.exit_code == 0
            text = out.read_text()
            outputs.append(json.loads(text))
        # traces carry wall-clock times; everything else is bit-identical
        outputs[0]["trace"] = outputs[1]["trace"] = None
        assert outputs[0] == outputs[1]


class TestSweep:
    def test_single_cell_matches_run(self, fixture_files, tmp_path):
        sweep_out = tmp_path / "sweep.csv"
        result = invoke(
            [
                "sweep",
                "--data", str(fixture_files / "data.csv"),
                "--embedding", str(fixture_files / "embedding.csv"),
                "--alpha-grid", "250", "--beta-grid", "1.6",
                "--time-limit", "5000", "--iteration-cap", "8",
                "--out", str(sweep_out),
            ]
        )
        assert result.exit_code == 0, result.output
        run_out = tmp_path / "single.json"
        invoke(
            [
                "run",
                "--data", str(fixture_files / "data.csv"),
                "--embedding", str(fixture_files / "embedding.csv"),
                "--alpha", "250", "--beta", "1.6",
                "--time-limit", "5000", "--iteration-cap", "8",
                "--out", str(run_out),
            ]
        )
        rows = list(csv.DictReader(sweep_out.open()))
        doc = json.loads(run_out.read_text())
        assert len(rows) == 1
        assert int(rows[0]["k"]) == len(doc["patterns"])
        assert float(rows[0]["information"]) == pytest.approx(
            doc["scores"]["information"], rel=1e-12
        )

    def test_grid_covers_all_cells_in_order(self, fixture_files, tmp_path):
        out = tmp_path / "grid.csv"
        result = invoke(
            [
                "sweep",
                "--data", str(fixture_files / "data.csv"),
                "--embedding", str(fixture_files / "embedding.csv"),
                "--alpha-grid", "0,250", "--beta-grid", "1.6,2.0",
                "--time-limit", "3000", "--iteration-cap", "5",
                "--out", str(out),
            ]
        )
        assert result.exit_code == 0, result.output
        rows = list(csv.DictReader(out.open()))
        assert [(float(r["alpha"]), float(r["beta"])) for r in rows] == [
            (0.0, 1.6), (0.0, 2.0), (250.0, 1.6), (250.0, 2.0),
        ]
        for row in rows:
            if float(row["alpha"]) == 0.0:
                assert int(row["k"]) <= 2

    def test_bad_grid_is_usage_error(self, fixture_files, tmp_path):
        result = invoke(
            [
                "sweep",
                "--data", str(fixture_files / "data.csv"),
                "--embedding", str(fixture_files / "embedding.csv"),
                "--alpha-grid", "abc", "--beta-grid", "1.2",
                "--time-limit", "1000",
                "--out", str(tmp_path / "x.csv"),
            ]
        )
        assert result.exit_code == 2


class TestBench:
    def test_iterations_monotone_in_time_limit(self, fixture_files, tmp_path):
        out = tmp_path / "bench.csv"
        result = invoke(
            [
                "bench",
                "--data", str(fixture_files / "data.csv"),
                "--embedding", str(fixture_files / "embedding.csv"),
                "--time-limits", "30,2000",
                "--out", str(out),
            ]
        )
        assert result.exit_code == 0, result.output
        rows = list(csv.DictReader(out.open()))
        assert len(rows) == 2
        assert int(rows[0]["n"]) == 90 and int(rows[0]["m"]) == 10
        assert int(rows[0]["iterations"]) <= int(rows[1]["iterations"])

    def test_tiny_limit_reports_one_iteration_with_expiry(self, fixture_files, tmp_path):
        out = tmp_path / "tiny.csv"
        result = invoke(
            [
                "bench",
                "--data", str(fixture_files / "data.csv"),
                "--embedding", str(fixture_files / "embedding.csv"),
                "--time-limits", "0.001",
                "--out", str(out),
            ]
        )
        assert result.exit_code == 0, result.output
        row = next(csv.DictReader(out.open()))
        assert int(row["iterations"]) == 1
        assert int(row["expired"]) == 1


class TestErrors:
    def test_missing_embedding_and_pca(self, fixture_files, tmp_path):
        result = invoke(
            [
                "run",
                "--data", str(fixture_files / "data.csv"),
                "--alpha", "250", "--beta", "1.6",
                "--time-limit", "1000",
                "--out", str(tmp_path / "x.json"),
            ]
        )
        assert result.exit_code == 2

    def test_ingestion_error_exits_nonzero(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b\n1,2\n3,\n")
        result = invoke(
            [
                "run",
                "--data", str(bad), "--pca",
                "--alpha", "250", "--beta", "1.6",
                "--time-limit", "1000",
                "--out", str(tmp_path / "x.json"),
            ]
        )
        assert result.exit_code == 1
        assert "missing" in result.output
