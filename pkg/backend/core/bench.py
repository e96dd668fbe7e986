"""Inference timing and parameter-size report, split into acoustic-model and vocoder stages."""
import logging
import math
import statistics
import time
from typing import Callable

import numpy as np

from core.acoustic_model import count_parameters, parameter_count
from core.autoencoder import parameter_count as ae_parameter_count
from core.synthesis import Synthesizer
from models.bench import BenchReport, BenchRow
from models.tokens import TokenSequence

logger = logging.getLogger(__name__)

FRAMES_PER_TOKEN = 8

COMPONENT_LABELS = {
    "phoneme_encoder": "  phoneme encoder",
    "style_encoder": "  style encoder",
    "duration_predictor": "  duration predictor",
    "decoder": "  acoustic decoder",
}


def build_bench_input(synthesizer: Synthesizer, seconds: float, seed: int = 0) -> tuple[TokenSequence, list[int]]:
    """Seeded random tokens whose fixed durations add up to ``seconds`` of audio."""
    cfg = synthesizer.mel_config
    n_frames = max(1, math.ceil(seconds * cfg.frame_rate))
    n_tokens = math.ceil(n_frames / FRAMES_PER_TOKEN)
    inventory = synthesizer.tokenizer.inventory(synthesizer.scheme)
    speakable = [e.id for e in inventory.phoneme_entries] or [inventory.separator_id]
    rng = np.random.default_rng(seed)
    phonemes = [int(p) for p in rng.choice(speakable, size=n_tokens)]
    durations = [FRAMES_PER_TOKEN] * n_tokens
    durations[-1] -= n_tokens * FRAMES_PER_TOKEN - n_frames
    seq = TokenSequence(
        phoneme_ids=phonemes, style_ids=[synthesizer.tokenizer.styles.none_id] * n_tokens,
        scheme=synthesizer.scheme, language="en",
    )
    return seq, durations


def _median_ms(fn: Callable[[], object], repeat: int) -> float:
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append((time.perf_counter() - start) * 1e3)
    return statistics.median(times)


def run_bench(synthesizer: Synthesizer, seconds: float = 8.0, repeat: int = 5, seed: int = 0) -> BenchReport:
    if repeat < 1:
        raise ValueError("repeat must be >= 1")
    seq, durations = build_bench_input(synthesizer, seconds, seed)
    feature = synthesizer.acoustic(seq, durations)
    acoustic_ms = _median_ms(lambda: synthesizer.acoustic(seq, durations), repeat)
    vocoder_ms = _median_ms(lambda: synthesizer.vocode(feature), repeat)

    model = synthesizer.model
    counts = parameter_count(model.config)
    rows = [BenchRow(component="acoustic model", parameters=count_parameters(model), median_ms=acoustic_ms)]
    rows += [BenchRow(component=label, parameters=counts[key]) for key, label in COMPONENT_LABELS.items()]
    if synthesizer.feature_kind == "latent":
        decoder_params = ae_parameter_count(synthesizer.autoencoder.config)["decoder"]
        rows.append(BenchRow(component="AE decoder", parameters=decoder_params, median_ms=vocoder_ms))
    else:
        rows.append(BenchRow(component="Griffin-Lim vocoder", parameters=0, median_ms=vocoder_ms))

    logger.info("Bench: acoustic %.2f ms, vocoder %.2f ms over %d runs", acoustic_ms, vocoder_ms, repeat)
    return BenchReport(
        feature_kind=synthesizer.feature_kind, n_frames=feature.n_frames,
        audio_seconds=feature.n_frames * synthesizer.mel_config.hop_length / synthesizer.mel_config.sample_rate,
        repeat=repeat, rows=rows,
    )
