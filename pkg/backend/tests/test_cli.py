import importlib
import json
from pathlib import Path
from types import SimpleNamespace

import pytest
from click.testing import CliRunner

from main import cli

COMMANDS = ["tokenize", "gen-toy", "extract-features", "train-ae", "train", "synth", "export-embeddings", "bench"]


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture(autouse=True)
def isolated_settings(monkeypatch):
    monkeypatch.setenv("FEATURE_CACHE_DIR", "")
    monkeypatch.setenv("LOG_LEVEL", "WARNING")


@pytest.mark.parametrize("command", COMMANDS)
def test_every_command_has_help(runner, command):
    result = runner.invoke(cli, [command, "--help"])
    assert result.exit_code == 0, result.output
    assert "Usage" in result.output


def test_tokenize_chinese(runner):
    result = runner.invoke(cli, ["tokenize", "--lang", "zh", "ni3 hao3"])
    assert result.exit_code == 0, result.output
    assert result.stdout.splitlines() == ["| n i | x au |", "0 0 3 0 0 3 0"]


def test_tokenize_json(runner):
    result = runner.invoke(cli, ["tokenize", "--lang", "en", "--json", "good day"])
    assert result.exit_code == 0, result.output
    payload = json.loads(result.stdout)
    assert payload["phonemes"] == ["|", "g", "u", "d", "|", "d", "ei", "|"]
    assert len(payload["ids"]["phonemes"]) == len(payload["ids"]["styles"]) == 8


def test_out_of_vocabulary_word_exits_2(runner):
    result = runner.invoke(cli, ["tokenize", "--lang", "en", "zzxqy"])
    assert result.exit_code == 2
    error = json.loads(result.stderr.strip().splitlines()[-1])
    assert error["error"] == "OutOfVocabularyWord"
    assert error["word"] == "zzxqy"


def test_huge_number_exits_2(runner):
    result = runner.invoke(cli, ["tokenize", "--lang", "en", "1" * 5000])
    assert result.exit_code == 2
    error = json.loads(result.stderr.strip().splitlines()[-1])
    assert error["error"] == "UnknownCharacter"


def test_missing_config_file_exits_4(runner, tmp_path):
    result = runner.invoke(cli, ["--config", str(tmp_path / "absent.env"), "tokenize", "--lang", "zh", "ma1"])
    assert result.exit_code == 4
    assert "config file not found" in result.stderr


def test_config_file_is_applied(runner, tmp_path):
    path = tmp_path / "run.env"
    path.write_text("SEED=3\n", encoding="utf-8")
    out = tmp_path / "toy"
    result = runner.invoke(cli, ["--config", str(path), "gen-toy", "--n", "2", "--out", str(out)])
    assert result.exit_code == 0, result.output
    assert result.stdout.strip().endswith("2 utterances")
    assert (out / "manifest.jsonl").exists()


def test_train_forwards_options(runner, mocker, tmp_path):
    manifest = tmp_path / "m.jsonl"
    manifest.write_text("{}\n", encoding="utf-8")
    train_module = importlib.import_module("commands.train")
    fake = mocker.patch.object(train_module, "run_training", return_value=SimpleNamespace(
        checkpoint_path=tmp_path / "run" / "model.pt", steps=5, final_loss=0.25,
        loss_csv_path=tmp_path / "run" / "losses.csv",
    ))
    result = runner.invoke(cli, ["train", "--manifest", str(manifest), "--out", str(tmp_path / "run"),
                                 "--preset", "desk", "--steps", "5", "--no-style", "--fusion", "additive"])
    assert result.exit_code == 0, result.output
    config = fake.call_args.args[0]
    assert (config.max_steps, config.use_style, config.fusion, config.embedding_dim) == (5, False, "additive", 32)
    assert fake.call_args.args[2] == Path(tmp_path / "run")
    assert "final loss 0.250000" in result.stdout


def test_synth_without_manifest_for_ground_truth_exits_2(runner, mocker, tmp_path):
    ckpt = tmp_path / "model.pt"
    ckpt.write_bytes(b"")
    synth_module = importlib.import_module("commands.synth")
    mocker.patch.object(synth_module.Synthesizer, "from_checkpoint", return_value=object())
    result = runner.invoke(cli, ["synth", "--ckpt", str(ckpt), "--lang", "zh", "--text", "ma1",
                                 "--out", str(tmp_path / "x.wav"), "--durations", "gt"])
    assert result.exit_code == 2
    assert json.loads(result.stderr.strip().splitlines()[-1])["error"] == "DurationMismatch"
