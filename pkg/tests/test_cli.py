import json
import subprocess
import sys

import pytest

from rclass.streams import gaussian_stream, write_csv


@pytest.fixture
def dataset(tmp_path):
    path = tmp_path / "stream.csv"
    write_csv(gaussian_stream(119, seed=11, std=0.05), str(path))
    return path


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "params.conf"
    path.write_text(
        "init_radius = 0.05   # cluster-scale radius\n"
        "recurrent_init = 1.0\n"
    )
    return path


def run_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "rclass.cli", *args],
        capture_output=True, text=True, timeout=120)


class TestRunCommand:
    def test_basic_run_emits_report_and_traces(self, dataset, config_file, tmp_path):
        out = tmp_path / "out"
        proc = run_cli("run", "--data", str(dataset), "--train", "50",
                       "--test", "69", "--budget", "0.5",
                       "--config", str(config_file), "--seed", "11",
                       "--outdir", str(out))
        assert proc.returncode == 0, proc.stderr
        report = json.loads(proc.stdout)
        assert 0.0 <= report["classification_rate"] <= 1.0
        assert report["labeled_count"] <= 50
        assert (out / "rules_trace.csv").exists()
        assert (out / "feature_weights.csv").exists()
        rules_lines = (out / "rules_trace.csv").read_text().strip().splitlines()
        assert rules_lines[0] == "sample_index,rule_count"
        assert len(rules_lines) == 51

    def test_snapshot_written_and_loadable(self, dataset, config_file, tmp_path):
        snap = tmp_path / "model.rcsn"
        proc = run_cli("run", "--data", str(dataset), "--train", "50",
                       "--test", "0", "--budget", "0.5",
                       "--config", str(config_file), "--seed", "11",
                       "--outdir", str(tmp_path), "--snapshot", str(snap))
        assert proc.returncode == 0, proc.stderr
        from rclass.snapshot import snapshot_load
        model = snapshot_load(str(snap))
        assert model.n_rules >= 1

    def test_folds_mode(self, dataset, config_file, tmp_path):
        proc = run_cli("run", "--data", str(dataset), "--train", "50",
                       "--test", "69", "--budget", "0.5",
                       "--config", str(config_file), "--seed", "3",
                       "--folds", "3", "--outdir", str(tmp_path))
        assert proc.returncode == 0, proc.stderr
        payload = json.loads(proc.stdout)
        assert len(payload["folds"]) == 3
        agg = payload["aggregate"]
        assert 0.0 <= agg["classification_rate_mean"] <= 1.0
        assert agg["classification_rate_std"] >= 0.0

    def test_bad_split_fails(self, dataset, tmp_path):
        proc = run_cli("run", "--data", str(dataset), "--train", "500",
                       "--test", "69", "--outdir", str(tmp_path))
        assert proc.returncode == 2
        assert "exceeds" in proc.stderr

    def test_deterministic_stdout(self, dataset, config_file, tmp_path):
        args = ("run", "--data", str(dataset), "--train", "50", "--test", "69",
                "--budget", "0.5", "--config", str(config_file), "--seed", "11",
                "--outdir", str(tmp_path))
        a = json.loads(run_cli(*args).stdout)
        b = json.loads(run_cli(*args).stdout)
        a.pop("runtime_seconds")
        b.pop("runtime_seconds")
        assert a == b
