import numpy as np
import pytest

from core import dsp
from core.errors import InputTooShort, KindMismatch, StorageError
from models.audio import AcousticFeature, MelConfig, Waveform

SR = 16000


def _sine(freq, seconds=0.5, sr=SR, amplitude=0.5):
    t = np.arange(int(seconds * sr)) / sr
    return Waveform(samples=(amplitude * np.sin(2 * np.pi * freq * t)).astype(np.float32), sample_rate=sr)


def test_frame_count_formula_on_fuzzed_lengths():
    cfg = MelConfig()
    rng = np.random.default_rng(7)
    for length in rng.integers(cfg.n_fft, 4 * SR, size=25):
        w = Waveform(samples=rng.standard_normal(int(length)).astype(np.float32) * 0.1, sample_rate=SR)
        feature = dsp.extract_mel(w, cfg)
        assert feature.n_frames == 1 + (int(length) - cfg.n_fft) // cfg.hop_length
        assert feature.n_bins == cfg.n_mels


def test_short_signal_is_rejected():
    with pytest.raises(InputTooShort):
        dsp.extract_mel(Waveform(samples=np.zeros(100, dtype=np.float32), sample_rate=SR), MelConfig())


def test_sine_peaks_in_nearest_mel_bin():
    cfg = MelConfig()
    feature = dsp.extract_mel(_sine(440.0), cfg)
    nearest = int(np.argmin(np.abs(dsp.mel_center_frequencies(cfg) - 440.0)))
    assert int(np.argmax(feature.data.mean(axis=1))) == nearest


def test_silence_hits_the_log_floor():
    cfg = MelConfig()
    feature = dsp.extract_mel(Waveform(samples=np.zeros(4096, dtype=np.float32), sample_rate=SR), cfg)
    assert np.allclose(feature.data, np.log(cfg.log_floor))


def test_griffin_lim_recovers_sine_frequency():
    cfg = MelConfig(n_mels=128)
    rebuilt = dsp.griffin_lim(dsp.extract_mel(_sine(440.0, seconds=1.0), cfg), cfg, 32)
    spectrum = np.abs(np.fft.rfft(rebuilt.samples * np.hanning(rebuilt.samples.size)))
    peak = np.argmax(spectrum) * SR / rebuilt.samples.size
    assert abs(peak - 440.0) <= SR / cfg.n_fft


def test_griffin_lim_error_is_non_increasing():
    cfg = MelConfig()
    errors: list[float] = []
    dsp.griffin_lim(dsp.extract_mel(_sine(300.0), cfg), cfg, 16, errors=errors)
    assert len(errors) == 17
    assert all(b <= a + 1e-6 * errors[0] for a, b in zip(errors, errors[1:]))


def test_griffin_lim_output_length_and_determinism():
    cfg = MelConfig()
    feature = dsp.extract_mel(_sine(500.0), cfg)
    a = dsp.griffin_lim(feature, cfg, 4)
    b = dsp.griffin_lim(feature, cfg, 4)
    assert a.samples.size == (feature.n_frames - 1) * cfg.hop_length + cfg.n_fft
    assert np.array_equal(a.samples, b.samples)
    assert np.max(np.abs(a.samples)) <= 1.0


def test_griffin_lim_needs_mel():
    cfg = MelConfig()
    latent = AcousticFeature(data=np.zeros((4, 3)), kind="latent", frame_rate=62.5, sample_rate=SR)
    with pytest.raises(KindMismatch):
        dsp.griffin_lim(latent, cfg, 1)


def test_wav_round_trip_is_pcm16(tmp_path):
    w = _sine(220.0, seconds=0.1)
    back = dsp.read_wav(dsp.write_wav(tmp_path / "a.wav", w))
    assert back.sample_rate == SR
    assert np.max(np.abs(back.samples - w.samples)) <= 1.0 / 32767


def test_wav_writer_clips_out_of_range_samples(tmp_path):
    w = Waveform(samples=[2.0, -3.0, 0.0], sample_rate=SR)
    back = dsp.read_wav(dsp.write_wav(tmp_path / "loud.wav", w))
    assert np.allclose(back.samples, [32767 / 32768, -32767 / 32768, 0.0])


def test_feature_file_round_trip(tmp_path):
    feature = AcousticFeature(data=np.arange(6, dtype=np.float32).reshape(2, 3) - 2.5, kind="latent",
                              frame_rate=62.5, sample_rate=SR)
    path = dsp.write_feature(tmp_path / "f.lstf", feature)
    back = dsp.read_feature(path, frame_rate=62.5, sample_rate=SR)
    assert back.kind == "latent"
    assert np.array_equal(back.data, feature.data)


def test_feature_file_rejects_bad_magic(tmp_path):
    path = tmp_path / "bad.lstf"
    path.write_bytes(b"NOPE" + bytes(20))
    with pytest.raises(StorageError):
        dsp.read_feature(path, frame_rate=62.5, sample_rate=SR)


def test_frame_aligned_span_length():
    cfg = MelConfig()
    samples = np.zeros(cfg.n_fft + 10 * cfg.hop_length, dtype=np.float32)
    assert dsp.frame_aligned_span(samples, cfg).size == dsp.num_frames(samples.size, cfg) * cfg.hop_length
