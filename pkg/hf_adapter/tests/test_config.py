import pytest

from hf_adapter import AdapterError
from hf_adapter.config import AdapterConfig, load_config

from .conftest import make_config


class TestConfig:
    def test_defaults_follow_task_settings(self):
        config = AdapterConfig(checkpoint="x")
        assert config.epochs == 30
        assert config.learning_rate == pytest.approx(3e-6)
        assert config.threshold == 0.5

    def test_epochs_must_be_positive(self):
        with pytest.raises(AdapterError, match="epochs"):
            AdapterConfig(checkpoint="x", epochs=0).validate()

    def test_learning_rate_must_be_positive(self):
        with pytest.raises(AdapterError, match="learning_rate"):
            AdapterConfig(checkpoint="x", learning_rate=0.0).validate()

    def test_load_resolves_relative_paths(self, tmp_path):
        (tmp_path / "labels.txt").write_text("A\n", encoding="utf-8")
        path = make_config(tmp_path / "config.json", checkpoint="some/hub-name",
                           labels="labels.txt")
        config = load_config(path)
        assert config.labels == str(tmp_path / "labels.txt")
        assert config.checkpoint == "some/hub-name"  # hub names stay untouched

    def test_load_rejects_unknown_keys(self, tmp_path):
        path = make_config(tmp_path / "config.json", checkpoint="x", lerning_rate=1)
        with pytest.raises(AdapterError, match="lerning_rate"):
            load_config(path)

    def test_load_requires_checkpoint(self, tmp_path):
        path = make_config(tmp_path / "config.json", epochs=1)
        with pytest.raises(AdapterError, match="checkpoint"):
            load_config(path)

    def test_require_reports_missing_fields(self):
        config = AdapterConfig(checkpoint="x")
        with pytest.raises(AdapterError, match="train"):
            config.require("train", "valid")
