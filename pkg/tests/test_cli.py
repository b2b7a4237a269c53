import json

import pytest

from hugkit.cli import EXIT_OK, EXIT_RUNTIME, EXIT_SUITE_FAILED, EXIT_USAGE, main
from hugkit.schemas.verify import VerifyCheck, VerifySuite
from hugkit.services import verify_service
from hugkit.services.persistence_service import save_state


def stdout_json(capsys):
    return json.loads(capsys.readouterr().out)


class TestOptimize:
    def test_triangle(self, capsys, tmp_path):
        out = tmp_path / "triangle.json"
        code = main(["optimize", "--n", "3", "--d", "2", "--restarts", "1", "--out", str(out)])
        assert code == EXIT_OK
        result = stdout_json(capsys)
        assert result["energy"] == pytest.approx(2.0, abs=1e-8)
        assert json.loads(out.read_text())["config"]["n"] == 3

    def test_invalid_arguments(self, capsys):
        assert main(["optimize", "--n", "1", "--d", "2"]) == EXIT_USAGE
        assert main(["optimize", "--n", "3", "--d", "2", "--s", "0"]) == EXIT_USAGE

    def test_missing_required_flag(self):
        with pytest.raises(SystemExit) as info:
            main(["optimize", "--n", "3"])
        assert info.value.code == EXIT_USAGE


class TestDiagnose:
    def test_saved_state(self, capsys, small_state, tmp_path):
        path = save_state(small_state, tmp_path / "state.json")
        assert main(["diagnose", "--state", str(path)]) == EXIT_OK
        report = stdout_json(capsys)
        assert 0.0 <= report["nearest_mean_agreement"] <= 1.0

    def test_missing_state(self, tmp_path):
        assert main(["diagnose", "--state", str(tmp_path / "missing.json")]) == EXIT_RUNTIME


class TestVerify:
    def test_passing_suite(self, capsys):
        assert main(["verify", "--suite", "mhs_limit"]) == EXIT_OK
        assert stdout_json(capsys)["passed"] is True

    def test_failing_suite(self, capsys, monkeypatch):
        def failing(seed):
            return [VerifyCheck(name="always", measured=1.0, target=0.0, tolerance=0.0, passed=False)]

        monkeypatch.setitem(verify_service.SUITES, VerifySuite.CIRCLE, failing)
        assert main(["verify", "--suite", "circle"]) == EXIT_SUITE_FAILED
        assert stdout_json(capsys)["passed"] is False

    def test_unknown_suite(self):
        with pytest.raises(SystemExit) as info:
            main(["verify", "--suite", "nonexistent"])
        assert info.value.code == EXIT_USAGE


class TestTrainAndSweep:
    def test_train(self, capsys, tmp_path):
        config = tmp_path / "experiment.json"
        config.write_text(json.dumps({
            "C": 3, "d": 2, "samples_per_class": 3,
            "optim": {"max_iters": 10, "record_every": 5},
        }))
        out = tmp_path / "run"
        assert main(["train", "--config", str(config), "--out", str(out)]) == EXIT_OK
        manifest = stdout_json(capsys)
        assert manifest["iterations"] == 10
        assert (out / "manifest.json").exists()

    def test_train_with_invalid_config(self, tmp_path):
        config = tmp_path / "experiment.json"
        config.write_text(json.dumps({"C": 1, "d": 2}))
        assert main(["train", "--config", str(config)]) == EXIT_USAGE

    def test_sweep(self, capsys, tmp_path):
        config = tmp_path / "sweep.json"
        config.write_text(json.dumps({
            "base": {"C": 2, "d": 2, "samples_per_class": 2, "optim": {"max_iters": 5, "record_every": 5}},
            "grid": {"seed": [0, 1]},
            "output_dir": str(tmp_path / "grid"),
        }))
        assert main(["sweep", "--config", str(config)]) == EXIT_OK
        rows = stdout_json(capsys)
        assert [row["output_dir"] for row in rows] == [
            str(tmp_path / "grid" / "point_000"),
            str(tmp_path / "grid" / "point_001"),
        ]
