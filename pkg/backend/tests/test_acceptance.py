"""End-to-end runs on the toy corpus. Each takes minutes on a laptop CPU; run with --runslow."""
import numpy as np
import pytest

from core import dsp
from core.autoencoder import ae_decode, ae_encode, reconstruction_snr, save_autoencoder, train_autoencoder
from core.corpus import read_manifest
from core.oracle import frame_accuracy, tone_slope_signs
from core.synthesis import Synthesizer
from core.toy_corpus import ToneRenderer, generate_toy_corpus, swap_rising_falling
from core.trainer import train
from models.training import TrainConfig

pytestmark = pytest.mark.slow


@pytest.fixture(scope="module")
def corpus(tmp_path_factory, test_settings, tokenizer):
    return generate_toy_corpus(8, 7, tmp_path_factory.mktemp("accept"), s=test_settings, tokenizer=tokenizer)


@pytest.fixture(scope="module")
def renderer(tokenizer, test_settings):
    return ToneRenderer(tokenizer, test_settings.mel_config)


@pytest.fixture(scope="module")
def mel_run(corpus, test_settings, tokenizer, tmp_path_factory):
    manifest, _ = corpus
    return train(TrainConfig.from_preset("desk", seed=7), manifest, tmp_path_factory.mktemp("mel_run"),
                 s=test_settings, tokenizer=tokenizer)


def _recovery(synth, manifest, renderer):
    scores = []
    for record in read_manifest(manifest):
        seq, durations = synth.ground_truth(record.text, record.language, manifest)
        waveform, _ = synth.synthesize(seq, durations)
        scores.append(frame_accuracy(waveform.samples, seq, durations, renderer))
    return float(np.mean(scores))


def _minimal_pair(records):
    for record in records:
        if record.language == "zh":
            partner = swap_rising_falling(record.text)
            if partner != record.text and any(r.text == partner for r in records):
                return record.text, partner
    raise AssertionError("toy corpus has no rising/falling minimal pair")


def test_loss_falls_below_tenth_of_early_average(mel_run):
    losses = [r.loss_total for r in mel_run.history]
    assert len(losses) == 2000
    early = float(np.mean(losses[:10]))
    assert losses[-1] < 0.1 * early


def test_ground_truth_synthesis_recovers_phonemes(mel_run, corpus, renderer, test_settings, tokenizer):
    manifest, _ = corpus
    synth = Synthesizer.from_checkpoint(mel_run.checkpoint_path, s=test_settings, tokenizer=tokenizer)
    assert _recovery(synth, manifest, renderer) >= 0.90


def test_rising_and_falling_tones_keep_opposite_slopes(mel_run, corpus, renderer, test_settings, tokenizer):
    manifest, records = corpus
    synth = Synthesizer.from_checkpoint(mel_run.checkpoint_path, s=test_settings, tokenizer=tokenizer)
    text_a, text_b = _minimal_pair(records)
    seq_a, durations = synth.ground_truth(text_a, "zh", manifest)
    seq_b = synth.tokenize(text_b, "zh")
    wave_a, _ = synth.synthesize(seq_a, durations)
    wave_b, _ = synth.synthesize(seq_b, durations)
    pairs = tone_slope_signs(wave_a.samples, seq_a, wave_b.samples, seq_b, durations, renderer)
    assert pairs
    assert all(a * b < 0 for a, b in pairs), pairs


def test_outputs_depend_on_styles_only_through_style_ids(mel_run, corpus, test_settings, tokenizer):
    _, records = corpus
    synth = Synthesizer.from_checkpoint(mel_run.checkpoint_path, s=test_settings, tokenizer=tokenizer)
    text_a, text_b = _minimal_pair(records)
    seq_a, seq_b = synth.tokenize(text_a, "zh"), synth.tokenize(text_b, "zh")
    durations = [4] * len(seq_a)
    none_id = tokenizer.styles.none_id
    flat_a = seq_a.model_copy(update={"style_ids": [none_id] * len(seq_a)})
    flat_b = seq_b.model_copy(update={"style_ids": [none_id] * len(seq_b)})
    assert np.array_equal(synth.acoustic(flat_a, durations).data, synth.acoustic(flat_b, durations).data)
    assert not np.array_equal(synth.acoustic(seq_a, durations).data, synth.acoustic(seq_b, durations).data)


def test_latent_backend_end_to_end(corpus, renderer, test_settings, tokenizer, tmp_path_factory):
    manifest, _ = corpus
    records = read_manifest(manifest)
    waveforms = [dsp.read_wav(r.audio_path) for r in records]
    config = test_settings.autoencoder_config
    assert config.ratio == test_settings.HOP_LENGTH

    ae, history = train_autoencoder(waveforms[:-1], config, steps=test_settings.AE_STEPS, seed=7)
    held_out = waveforms[-1]
    rebuilt = ae_decode(ae_encode(held_out, ae), ae)
    assert reconstruction_snr(held_out.samples, rebuilt.samples) >= 15.0
    assert history[-1] < history[0]

    out = tmp_path_factory.mktemp("latent_run")
    ae_path = save_autoencoder(out / "ae.pt", ae, history)
    result = train(TrainConfig.from_preset("desk", seed=7, feature_kind="latent", ae_checkpoint=str(ae_path)),
                   manifest, out, s=test_settings, tokenizer=tokenizer)
    synth = Synthesizer.from_checkpoint(result.checkpoint_path, s=test_settings, tokenizer=tokenizer)
    assert synth.feature_kind == "latent"
    assert _recovery(synth, manifest, renderer) >= 0.85
