import json

import pytest

from oicloc.config import PROFILES, RunConfig, load_config, save_config
from oicloc.errors import ConfigError


def write(tmp_path, data):
    path = tmp_path / "run.json"
    path.write_text(json.dumps(data))
    return path


class TestLoadConfig:
    def test_minimal(self, tmp_path):
        cfg = load_config(write(tmp_path, {"version": 1}))
        assert cfg == RunConfig()

    def test_profile_base_with_overrides(self, tmp_path):
        cfg = load_config(write(tmp_path, {"version": 1, "profile": "synthetic", "alpha": 0.5}))
        assert cfg.anchors == PROFILES["synthetic"].anchors
        assert cfg.alpha == 0.5

    def test_missing_version(self, tmp_path):
        with pytest.raises(ConfigError, match="version"):
            load_config(write(tmp_path, {"alpha": 0.5}))

    def test_wrong_version(self, tmp_path):
        with pytest.raises(ConfigError, match="version"):
            load_config(write(tmp_path, {"version": 2}))

    def test_unknown_keys_are_hard_errors(self, tmp_path):
        with pytest.raises(ConfigError, match="learning_rate"):
            load_config(write(tmp_path, {"version": 1, "learning_rate": 0.1}))

    def test_unknown_profile(self, tmp_path):
        with pytest.raises(ConfigError, match="profile"):
            load_config(write(tmp_path, {"version": 1, "profile": "charades"}))

    def test_invalid_anchors_rejected_eagerly(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(write(tmp_path, {"version": 1, "anchors": [4, 2]}))

    def test_not_an_object(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text("[1, 2]")
        with pytest.raises(ConfigError):
            load_config(path)

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text("{")
        with pytest.raises(ConfigError):
            load_config(path)


class TestProfiles:
    def test_expected_profiles_exist(self):
        assert set(PROFILES) == {"thumos", "activitynet", "synthetic"}

    def test_thumos_anchor_ladder(self):
        assert PROFILES["thumos"].anchors == (1, 2, 4, 8, 16, 32)

    def test_activitynet_anchor_ladder(self):
        assert PROFILES["activitynet"].anchors == (16, 32, 64, 128, 256, 512)
        assert PROFILES["activitynet"].lr_step == 500


class TestSaveConfig:
    def test_roundtrip(self, tmp_path):
        cfg = PROFILES["synthetic"]
        path = tmp_path / "out.json"
        save_config(path, cfg)
        assert load_config(path) == cfg
