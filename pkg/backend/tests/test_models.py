import numpy as np
import pytest
from pydantic import ValidationError

from core.errors import ConfigMismatch, InputError, NaNLoss, OutOfVocabularyWord, StorageError, TonemarkError
from models.audio import AcousticFeature, AutoencoderConfig, MelConfig, Waveform
from models.bench import BenchReport, BenchRow
from models.tokens import TokenSequence
from models.training import ModelConfig, TrainConfig


def test_mel_config_defaults():
    cfg = MelConfig()
    assert cfg.frame_rate == 62.5
    assert cfg.frame_offset == 384
    assert cfg.config_hash() == MelConfig().config_hash()
    assert cfg.config_hash() != MelConfig(n_mels=64).config_hash()


@pytest.mark.parametrize("overrides", [
    {"hop_length": 2048},
    {"fmax": 9000.0},
    {"fmin": 8000.0},
    {"n_mels": 0},
])
def test_mel_config_rejects_inconsistent_values(overrides):
    with pytest.raises(ValidationError):
        MelConfig(**overrides)


def test_waveform_validation():
    w = Waveform(samples=[0.0, 0.5, -2.0], sample_rate=8000)
    assert w.samples.dtype == np.float32
    assert w.clipped().samples.tolist() == [0.0, 0.5, -1.0]
    assert w.duration_seconds == pytest.approx(3 / 8000)
    with pytest.raises(ValidationError):
        Waveform(samples=np.array([]), sample_rate=8000)
    with pytest.raises(ValidationError):
        Waveform(samples=np.array([np.nan]), sample_rate=8000)


def test_acoustic_feature_needs_frames():
    with pytest.raises(ValidationError):
        AcousticFeature(data=np.zeros((80, 0)), kind="mel", frame_rate=62.5, sample_rate=16000)
    feature = AcousticFeature(data=np.zeros((4, 3)), kind="latent", frame_rate=62.5, sample_rate=16000)
    assert (feature.n_bins, feature.n_frames) == (4, 3)


def test_token_rows_must_have_equal_length():
    with pytest.raises(ValidationError):
        TokenSequence(phoneme_ids=[1, 2], style_ids=[1], scheme="ipa", language="en")


def test_model_config_checks_heads_and_kernels():
    with pytest.raises(ValidationError):
        ModelConfig(n_phonemes=10, n_styles=10, embedding_dim=9, n_heads=2)
    with pytest.raises(ValidationError):
        ModelConfig(n_phonemes=10, n_styles=10, conv_kernel=4)


def test_autoencoder_ratio():
    assert AutoencoderConfig(strides=[16, 16], channels=[8]).ratio == 256
    assert AutoencoderConfig(strides=[2, 1], channels=[4]).layer_widths == [(1, 4), (4, 32)]


def test_train_config_overrides_skip_none():
    config = TrainConfig.from_preset("desk", batch_size=None, seed=11)
    assert config.batch_size == 32 and config.seed == 11


def test_bench_report_render():
    report = BenchReport(feature_kind="mel", n_frames=500, audio_seconds=8.0, repeat=5, rows=[
        BenchRow(component="acoustic model", parameters=1234567, median_ms=12.5),
        BenchRow(component="  style encoder", parameters=42),
    ])
    lines = report.render().splitlines()
    assert "1,234,567" in lines[2] and lines[2].endswith("12.50")
    assert lines[3].rstrip().endswith("-")
    assert lines[-1] == "mel backend, T=500 frames, 8.00 s audio, median of 5 runs"


def test_errors_carry_exit_codes():
    assert OutOfVocabularyWord("zzxqy").to_dict() == {
        "error": "OutOfVocabularyWord", "message": "word 'zzxqy' is not in the lexicon", "word": "zzxqy",
    }
    assert isinstance(OutOfVocabularyWord("x"), InputError)
    assert (InputError("x").exit_code, ConfigMismatch("x").exit_code, StorageError("p", "r").exit_code) == (2, 3, 4)
    assert NaNLoss(3).details == {"step": 3}
    assert TonemarkError("x").exit_code == 1
