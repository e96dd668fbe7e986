"""
DFT-peak oracle for toy-corpus audio: per-frame pitch, phoneme recovery
after undoing the tone contour, and pitch slopes of tone-bearing finals.
"""
from typing import NamedTuple

import numpy as np

from core.toy_corpus import ToneRenderer
from models.tokens import TokenSequence

SILENCE = -1
ZERO_PAD = 16
SILENCE_RATIO = 0.1    # frames quieter than this fraction of the loudest frame are silence


class FrameTruth(NamedTuple):
    token_index: np.ndarray    # (T,)
    position: np.ndarray       # (T,) relative position of the frame centre inside its token


def frame_truth(durations: list[int]) -> FrameTruth:
    tokens, positions = [], []
    for i, d in enumerate(durations):
        tokens += [i] * d
        positions += [(j + 0.5) / d for j in range(d)]
    return FrameTruth(np.asarray(tokens, dtype=np.int64), np.asarray(positions))


def frame_peaks(samples: np.ndarray, renderer: ToneRenderer, n_frames: int) -> tuple[np.ndarray, np.ndarray]:
    """Peak frequency (Hz) and RMS of each hop-sized cell, refined by parabolic interpolation."""
    cfg = renderer.cfg
    hop, start = cfg.hop_length, cfg.frame_offset
    window = np.hanning(hop)
    n_fft = hop * ZERO_PAD
    freqs, energy = np.zeros(n_frames), np.zeros(n_frames)
    for t in range(n_frames):
        cell = samples[start + t * hop:start + (t + 1) * hop]
        if cell.size < hop:
            cell = np.pad(cell, (0, hop - cell.size))
        energy[t] = float(np.sqrt(np.mean(cell.astype(np.float64) ** 2)))
        spectrum = np.abs(np.fft.rfft(cell * window, n=n_fft))
        k = int(np.argmax(spectrum[1:-1])) + 1
        a, b, c = np.log(spectrum[k - 1:k + 2] + 1e-12)
        denom = a - 2.0 * b + c
        offset = 0.5 * (a - c) / denom if denom != 0 else 0.0
        freqs[t] = (k + offset) * cfg.sample_rate / n_fft
    return freqs, energy


def classify_frames(samples: np.ndarray, seq: TokenSequence, durations: list[int],
                    renderer: ToneRenderer, *, compensate: bool = True) -> np.ndarray:
    """
    Phoneme id per frame (or SILENCE) by nearest pitch on the renderer's ladder.

    With ``compensate`` the contour expected from ``seq``'s own style ids is
    divided out of each peak first. That is lenient: the styles are taken as
    given, so a wrong tone in the audio can still be read as the right phoneme.
    Tone correctness is checked separately by ``pitch_slopes``. With
    ``compensate=False`` the raw peak is used and tone glides count against
    the phoneme label.
    """
    truth = frame_truth(durations)
    freqs, energy = frame_peaks(samples, renderer, len(truth.token_index))
    if compensate:
        style = np.asarray(seq.style_ids)[truth.token_index]
        expected = np.array([renderer.contour(int(s), np.array([u]))[0] for s, u in zip(style, truth.position)])
        freqs = freqs / 2.0 ** (expected / 12.0)
    ladder = np.log2([renderer.frequency(p) for p in renderer.phoneme_ids])
    nearest = np.abs(np.log2(np.maximum(freqs, 1e-6))[:, None] - ladder[None, :]).argmin(axis=1)
    labels = np.asarray(renderer.phoneme_ids)[nearest]
    loud = energy >= SILENCE_RATIO * max(float(energy.max()), 1e-12)
    return np.where(loud, labels, SILENCE)


def expected_labels(seq: TokenSequence, durations: list[int], renderer: ToneRenderer) -> np.ndarray:
    ids = np.asarray(seq.phoneme_ids)[frame_truth(durations).token_index]
    return np.array([p if renderer.is_speakable(int(p)) else SILENCE for p in ids])


def frame_accuracy(samples: np.ndarray, seq: TokenSequence, durations: list[int], renderer: ToneRenderer,
                   *, compensate: bool = True) -> float:
    predicted = classify_frames(samples, seq, durations, renderer, compensate=compensate)
    return float(np.mean(predicted == expected_labels(seq, durations, renderer)))


def pitch_slopes(samples: np.ndarray, seq: TokenSequence, durations: list[int],
                 renderer: ToneRenderer) -> dict[int, float]:
    """Least-squares pitch slope (semitones per frame) of each tone-bearing token, keyed by token index."""
    truth = frame_truth(durations)
    freqs, _ = frame_peaks(samples, renderer, len(truth.token_index))
    semitones = 12.0 * np.log2(np.maximum(freqs, 1e-6))
    slopes = {}
    for i, sid in enumerate(seq.style_ids):
        if renderer.tokenizer.styles.entries[sid].kind != "tone":
            continue
        frames = np.flatnonzero(truth.token_index == i)
        if frames.size >= 2:
            slopes[i] = float(np.polyfit(np.arange(frames.size), semitones[frames], 1)[0])
    return slopes


def tone_slope_signs(samples_a: np.ndarray, seq_a: TokenSequence, samples_b: np.ndarray, seq_b: TokenSequence,
                     durations: list[int], renderer: ToneRenderer) -> list[tuple[float, float]]:
    """Slopes of the tokens whose tones differ between two phoneme-identical sequences."""
    slopes_a = pitch_slopes(samples_a, seq_a, durations, renderer)
    slopes_b = pitch_slopes(samples_b, seq_b, durations, renderer)
    differing = [i for i in slopes_a if seq_a.style_ids[i] != seq_b.style_ids[i] and i in slopes_b]
    return [(slopes_a[i], slopes_b[i]) for i in differing]
