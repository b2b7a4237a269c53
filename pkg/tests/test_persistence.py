import json

import numpy as np
import pandas as pd
import pytest

from hugkit.core.exceptions import InvalidInputError, ParseError, SchemaVersionMismatchError
from hugkit.models.geometry import Labels, PointConfig
from hugkit.models.proxy_set import ProxySet, ProxyStrategy
from hugkit.models.state import LabeledState
from hugkit.models.trajectory import Trajectory, TrajectoryRecord
from hugkit.services.gnc_service import gnc_report
from hugkit.services.persistence_service import load_state, read_state, save_state, state_to_document


class TestStateDocuments:
    def test_round_trip_is_exact(self, small_state, tmp_path):
        path = save_state(small_state, tmp_path / "state.json")
        loaded = load_state(path)
        np.testing.assert_array_equal(loaded.X, small_state.X)
        np.testing.assert_array_equal(loaded.W, small_state.W)
        np.testing.assert_array_equal(loaded.labels.y, small_state.labels.y)
        assert gnc_report(loaded.features, loaded.labels, loaded.proxies) == \
            gnc_report(small_state.features, small_state.labels, small_state.proxies)

    def test_raw_state_round_trip(self, raw_state, tmp_path):
        loaded = load_state(save_state(raw_state, tmp_path / "raw.json"))
        assert not loaded.normalized
        np.testing.assert_array_equal(loaded.X, raw_state.X)

    def test_empty_class_flag_round_trip(self, tmp_path):
        state = LabeledState(
            features=PointConfig(points=[[1.0, 0.0]]),
            labels=Labels(y=[0], num_classes=2, allow_empty=True),
            proxies=PointConfig(points=[[1.0, 0.0], [-1.0, 0.0]]),
        )
        loaded = load_state(save_state(state, tmp_path / "single.json"))
        assert loaded.labels.allow_empty
        np.testing.assert_array_equal(loaded.labels.counts, [1, 0])

    def test_proxy_set_round_trip(self, small_state, tmp_path):
        ps = ProxySet(base=small_state.proxies, strategy=ProxyStrategy.PARTIALLY_LEARNABLE,
                      rotation_params=[0.1, -0.2, 0.3])
        save_state(small_state, tmp_path / "state.json", ps)
        _, loaded = read_state(tmp_path / "state.json")
        assert loaded.strategy == ProxyStrategy.PARTIALLY_LEARNABLE
        np.testing.assert_array_equal(loaded.rotation_params, ps.rotation_params)

    def test_malformed_json_reports_line(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{\n  "schema_version": 1,\n  "labels": [0,\n')
        with pytest.raises(ParseError) as info:
            load_state(path)
        assert info.value.line is not None and info.value.line >= 3

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError):
            load_state(tmp_path / "missing.json")

    def test_schema_version_mismatch(self, small_state, tmp_path):
        doc = json.loads(state_to_document(small_state).model_dump_json())
        doc["schema_version"] = 99
        path = tmp_path / "future.json"
        path.write_text(json.dumps(doc))
        with pytest.raises(SchemaVersionMismatchError):
            load_state(path)

    def test_missing_schema_version(self, small_state, tmp_path):
        doc = json.loads(state_to_document(small_state).model_dump_json())
        del doc["schema_version"]
        path = tmp_path / "old.json"
        path.write_text(json.dumps(doc))
        with pytest.raises(ParseError) as info:
            load_state(path)
        assert info.value.field == "schema_version"

    def test_features_off_the_sphere(self, small_state, tmp_path):
        doc = json.loads(state_to_document(small_state).model_dump_json())
        doc["features"][0] = [2.0, 0.0, 0.0]
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(doc))
        with pytest.raises(ParseError) as info:
            load_state(path)
        assert info.value.field == "points"

    def test_unknown_field(self, small_state, tmp_path):
        doc = json.loads(state_to_document(small_state).model_dump_json())
        doc["comment"] = "hello"
        path = tmp_path / "extra.json"
        path.write_text(json.dumps(doc))
        with pytest.raises(ParseError) as info:
            load_state(path)
        assert info.value.field == "comment"


class TestTrajectory:
    def test_iterations_must_increase(self):
        trajectory = Trajectory()
        trajectory.append(TrajectoryRecord(iteration=0, loss=1.0, inter_term=0.5, intra_term=0.5, grad_norm=1.0))
        with pytest.raises(InvalidInputError):
            trajectory.append(TrajectoryRecord(iteration=0, loss=1.0, inter_term=0.5, intra_term=0.5, grad_norm=1.0))

    def test_csv_without_snapshots(self, tmp_path):
        trajectory = Trajectory()
        for i, loss in enumerate([3.0, 2.0, 1.0 / 3.0]):
            trajectory.append(TrajectoryRecord(iteration=10 * i, loss=loss, inter_term=loss,
                                               intra_term=0.0, grad_norm=0.1))
        frame = pd.read_csv(trajectory.to_csv(tmp_path / "trajectory.csv"))
        assert list(frame.columns) == ["iteration", "loss", "inter_term", "intra_term", "grad_norm"]
        assert frame["iteration"].tolist() == [0, 10, 20]
        assert frame["loss"].iloc[2] == 1.0 / 3.0

    def test_snapshot_columns(self, collapsed_state):
        report = gnc_report(collapsed_state.features, collapsed_state.labels, collapsed_state.proxies)
        trajectory = Trajectory()
        trajectory.append(TrajectoryRecord(iteration=0, loss=1.0, inter_term=1.0, intra_term=0.0,
                                           grad_norm=0.0, gnc=report))
        trajectory.append(TrajectoryRecord(iteration=1, loss=1.0, inter_term=1.0, intra_term=0.0,
                                           grad_norm=0.0))
        frame = trajectory.to_frame()
        assert frame["acme"].iloc[0] == pytest.approx(1.0 / 3.0)
        assert pd.isna(frame["acme"].iloc[1])
