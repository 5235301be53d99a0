import json

import pytest

from hf_adapter import AdapterError
from hf_adapter.config import AdapterConfig
from hf_adapter.runner import finetune

from .conftest import SMOKE_ROWS, write_jsonl


def smoke_config(tiny_checkpoint, smoke_data, tmp_path, **overrides):
    fields = dict(
        checkpoint=str(tiny_checkpoint),
        labels=str(smoke_data["labels"]),
        train=str(smoke_data["train"]),
        valid=str(smoke_data["valid"]),
        output_dir=str(tmp_path / "finetuned"),
        epochs=1,
        learning_rate=3e-6,
        seed=0,
        batch_size=4,
        max_length=32,
        device="cpu",
    )
    fields.update(overrides)
    return AdapterConfig(**fields)


class TestFinetune:
    def test_one_epoch_cpu_smoke(self, tiny_checkpoint, smoke_data, tmp_path):
        config = smoke_config(tiny_checkpoint, smoke_data, tmp_path)
        out_dir = finetune(config)
        assert (out_dir / "labels.txt").read_text(encoding="utf-8").splitlines() == [
            "Loaded Language", "Name Calling", "Doubt"]
        assert (out_dir / "adapter_manifest.json").is_file()
        # a loadable checkpoint was written
        assert any(out_dir.glob("*.safetensors")) or any(out_dir.glob("pytorch_model*"))

    def test_manifest_records_hyperparameters(self, tiny_checkpoint, smoke_data, tmp_path):
        config = smoke_config(tiny_checkpoint, smoke_data, tmp_path, epochs=2)
        out_dir = finetune(config)
        manifest = json.loads((out_dir / "adapter_manifest.json").read_text(encoding="utf-8"))
        assert manifest["epochs"] == 2
        assert manifest["learning_rate"] == pytest.approx(3e-6)
        assert manifest["best_epoch"] in (1, 2)
        assert len(manifest["history"]) == 2
        for entry in manifest["history"]:
            assert 0.0 <= entry["valid_micro_f1"] <= 1.0

    def test_labels_file_mismatch_fails_before_training(self, tiny_checkpoint, smoke_data,
                                                        tmp_path):
        bad_labels = tmp_path / "labels.txt"
        bad_labels.write_text("Loaded Language\nName Calling\n", encoding="utf-8")
        config = smoke_config(tiny_checkpoint, smoke_data, tmp_path, labels=str(bad_labels))
        with pytest.raises(AdapterError, match="Doubt"):
            finetune(config)
        assert not (tmp_path / "finetuned").exists()

    def test_unlabeled_training_example_rejected(self, tiny_checkpoint, smoke_data, tmp_path):
        train = tmp_path / "train.jsonl"
        write_jsonl(train, SMOKE_ROWS + [{"id": "bad", "text": "x", "labels": []}])
        config = smoke_config(tiny_checkpoint, smoke_data, tmp_path, train=str(train))
        with pytest.raises(AdapterError, match="bad"):
            finetune(config)

    def test_missing_checkpoint_fails(self, smoke_data, tmp_path):
        config = smoke_config(tmp_path / "nope", smoke_data, tmp_path)
        with pytest.raises(AdapterError, match="checkpoint"):
            finetune(config)
