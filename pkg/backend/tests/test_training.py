import importlib
import math

import pandas as pd
import pytest
import torch

from core.acoustic_model import build_model
from core.batching import make_batch, redistribute_durations, token_durations
from core.checkpoint import load_checkpoint, save_checkpoint
from core.corpus import read_manifest, write_manifest
from core.errors import CheckpointError, DurationMismatch, EmptyCorpus, InvalidManifest, MissingFeature, NaNLoss
from core.feature_store import FeatureStore
from core.trainer import LOSS_COLUMNS, batch_order, lr_schedule, model_config_for, train, train_step
from models.corpus import UtteranceRecord
from models.training import TrainConfig


def _tiny_train_config(**overrides):
    values = dict(max_steps=4, batch_size=2, embedding_dim=8, ffn_dim=16, n_enc_layers=1, n_dec_layers=1,
                  warmup_steps=2, checkpoint_every=2, log_every=1, seed=3)
    values.update(overrides)
    return TrainConfig.from_preset("desk", **values)


@pytest.fixture(scope="module")
def mel_store(toy_corpus, test_settings, tmp_path_factory):
    manifest, _ = toy_corpus
    records = read_manifest(manifest)
    store = FeatureStore(tmp_path_factory.mktemp("features"), "mel", test_settings.mel_config)
    store.extract_all(records, workers=2)
    return records, store


# ── Schedule ──────────────────────────────────────────────────────────────────

def test_lr_schedule_peaks_at_warmup():
    assert lr_schedule(4000, 1.0, 4000) == pytest.approx(4000 ** -0.5)
    assert lr_schedule(1, 1.0, 4000) == pytest.approx(3.9528e-6, rel=1e-4)
    values = [lr_schedule(s, 1.0, 50) for s in range(1, 200)]
    peak = max(range(len(values)), key=values.__getitem__) + 1
    assert peak == 50
    assert all(a <= b for a, b in zip(values[:49], values[1:50]))
    assert all(a >= b for a, b in zip(values[49:], values[50:]))


def test_lr_schedule_rejects_step_zero():
    with pytest.raises(ValueError):
        lr_schedule(0, 1.0, 10)


def test_batch_order_is_seeded_permutation():
    first = batch_order(7, 3, seed=1, epoch=0)
    assert first == batch_order(7, 3, seed=1, epoch=0)
    assert [len(b) for b in first] == [3, 3, 1]
    assert sorted(i for b in first for i in b) == list(range(7))


def test_presets():
    paper = TrainConfig.from_preset("paper")
    assert (paper.embedding_dim, paper.warmup_steps, paper.batch_size) == (256, 4000, 32)
    desk = TrainConfig.from_preset("desk", max_steps=10, fusion=None)
    assert (desk.embedding_dim, desk.ffn_dim, desk.warmup_steps, desk.max_steps) == (32, 64, 400, 10)
    assert desk.fusion == "gated"


# ── Corpus and batching ──────────────────────────────────────────────────────

def test_manifest_round_trip(tmp_path):
    records = [UtteranceRecord(id="u1", language="en", text="good day", audio_path="wavs/u1.wav")]
    path = write_manifest(tmp_path / "m.jsonl", records)
    assert "durations" not in path.read_text(encoding="utf-8")
    assert read_manifest(path)[0].audio_path == str(tmp_path / "wavs" / "u1.wav")


def test_manifest_errors(tmp_path):
    empty = tmp_path / "empty.jsonl"
    empty.write_text("\n", encoding="utf-8")
    with pytest.raises(EmptyCorpus):
        read_manifest(empty)
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"id": "x", "language": "fr", "text": "t", "audio_path": "a.wav"}\n', encoding="utf-8")
    with pytest.raises(InvalidManifest):
        read_manifest(bad)


def test_make_batch_pads_and_masks(mel_store, tokenizer):
    records, store = mel_store
    batch = make_batch(records[:2], tokenizer, store)
    lengths = [len(tokenizer.tokenize_ipa(r.text, r.language)) for r in records[:2]]
    assert batch.phoneme_ids.shape == (2, max(lengths))
    assert batch.token_mask.sum(dim=1).tolist() == lengths
    assert batch.durations.sum(dim=1).tolist() == [sum(r.durations) for r in records[:2]]
    assert batch.frame_mask.sum(dim=1).tolist() == [sum(r.durations) for r in records[:2]]
    assert batch.features.shape[-1] == 80


def test_single_record_batch_has_no_padding(mel_store, tokenizer):
    records, store = mel_store
    batch = make_batch(records[:1], tokenizer, store)
    assert bool(batch.token_mask.all()) and bool(batch.frame_mask.all())


def test_make_batch_detects_duration_mismatch(mel_store, tokenizer):
    records, store = mel_store
    record = records[0]
    broken = record.model_copy(update={"durations": [d + 1 if i == 1 else d for i, d in enumerate(record.durations)]})
    with pytest.raises(DurationMismatch):
        make_batch([broken], tokenizer, store)


def test_make_batch_needs_cached_features(mel_store, tokenizer, tmp_path, test_settings):
    records, _ = mel_store
    with pytest.raises(MissingFeature):
        make_batch(records[:1], tokenizer, FeatureStore(tmp_path, "mel", test_settings.mel_config))


def test_alphabet_durations_are_redistributed_per_word(tokenizer):
    ipa = tokenizer.tokenize("good day", "en", "ipa")       # | g u d | d ei |
    letters = tokenizer.tokenize("good day", "en", "alphabet")    # | g o o d | d a y |
    durations = [4, 8, 8, 8, 4, 8, 8, 4]
    spread = redistribute_durations(tokenizer, ipa, letters, durations)
    assert spread == [4, 6, 6, 6, 6, 4, 6, 5, 5, 4]
    assert sum(spread) == sum(durations)


def test_token_durations_rejects_wrong_length(tokenizer):
    record = UtteranceRecord(id="x", language="zh", text="ni3", audio_path="x.wav", durations=[1, 2])
    with pytest.raises(DurationMismatch):
        token_durations(tokenizer, record, "ipa")


# ── Training loop ─────────────────────────────────────────────────────────────

def test_train_writes_checkpoint_and_csv(toy_corpus, test_settings, tokenizer, tmp_path):
    manifest, _ = toy_corpus
    result = train(_tiny_train_config(), manifest, tmp_path / "run", s=test_settings, tokenizer=tokenizer)
    frame = pd.read_csv(result.loss_csv_path)
    assert list(frame.columns) == LOSS_COLUMNS
    assert frame["step"].tolist() == [1, 2, 3, 4]
    assert (tmp_path / "run" / "model.pt").exists()
    assert (tmp_path / "run" / "step_000002.pt").exists()
    assert math.isfinite(result.final_loss)


def test_training_is_reproducible(toy_corpus, test_settings, tokenizer, tmp_path):
    manifest, _ = toy_corpus
    a = train(_tiny_train_config(), manifest, tmp_path / "a", s=test_settings, tokenizer=tokenizer)
    b = train(_tiny_train_config(), manifest, tmp_path / "b", s=test_settings, tokenizer=tokenizer)
    assert pd.read_csv(a.loss_csv_path).equals(pd.read_csv(b.loss_csv_path))


def test_resume_matches_uninterrupted_training(toy_corpus, test_settings, tokenizer, tmp_path):
    manifest, _ = toy_corpus
    full = train(_tiny_train_config(), manifest, tmp_path / "full", s=test_settings, tokenizer=tokenizer)
    resumed = train(_tiny_train_config(), manifest, tmp_path / "resumed", s=test_settings, tokenizer=tokenizer,
                    resume=tmp_path / "full" / "step_000002.pt")
    assert [r.loss_total for r in resumed.history] == [r.loss_total for r in full.history]


def test_checkpoint_round_trip_is_bit_exact(tiny_config, tmp_path, test_settings):
    model = build_model(tiny_config, seed=5)
    path = save_checkpoint(tmp_path / "m.pt", model, _tiny_train_config(), test_settings.mel_config, step=9)
    loaded = load_checkpoint(path)
    assert loaded.step == 9 and loaded.model_config == tiny_config
    rebuilt = loaded.build_model().state_dict()
    for name, tensor in model.state_dict().items():
        assert torch.equal(tensor, rebuilt[name]), name


def test_unknown_checkpoint_format(tmp_path):
    path = tmp_path / "x.pt"
    torch.save({"format": "other"}, path)
    with pytest.raises(CheckpointError):
        load_checkpoint(path)


def test_non_finite_loss_reports_step(mel_store, tokenizer):
    records, store = mel_store
    config = _tiny_train_config()
    model = build_model(model_config_for(config, tokenizer, store.n_bins), config.seed)
    optimizer = torch.optim.Adam(model.parameters())
    batch = make_batch(records[:1], tokenizer, store)
    batch = batch._replace(features=torch.full_like(batch.features, float("nan")))
    with pytest.raises(NaNLoss) as info:
        train_step(model, optimizer, batch, 17, config)
    assert info.value.details["step"] == 17


def test_batches_are_rebuilt_every_step(toy_corpus, test_settings, tokenizer, tmp_path, mocker):
    # 4 records in one batch have 24 orderings, so 30 steps must revisit some of them.
    manifest, _ = toy_corpus
    trainer_module = importlib.import_module("core.trainer")
    spy = mocker.patch.object(trainer_module, "make_batch", wraps=make_batch)
    config = _tiny_train_config(max_steps=30, batch_size=4, checkpoint_every=100, log_every=10)
    result = train(config, manifest, tmp_path / "run", s=test_settings, tokenizer=tokenizer)
    assert spy.call_count == 30
    assert result.steps == 30
