"""
Signal processing: log-mel extraction, NNLS mel inversion + Griffin-Lim,
PCM16 WAV I/O and the binary feature-cache format.
"""
import logging
import struct
from pathlib import Path
from typing import Literal, Optional

import librosa
import numpy as np
from scipy.io import wavfile

from core.errors import InputTooShort, KindMismatch, StorageError
from models.audio import AcousticFeature, MelConfig, Waveform

logger = logging.getLogger(__name__)

FEATURE_MAGIC = b"LSTF"
FEATURE_VERSION = 1
_KIND_CODES = {"mel": 0, "latent": 1}
_HEADER = struct.Struct("<4sBBII")


# ── Mel analysis ──────────────────────────────────────────────────────────────

def mel_filterbank(cfg: MelConfig) -> np.ndarray:
    """HTK-spaced, unnormalized triangular filters, shape (n_mels, 1 + n_fft/2)."""
    return librosa.filters.mel(
        sr=cfg.sample_rate, n_fft=cfg.n_fft, n_mels=cfg.n_mels,
        fmin=cfg.fmin, fmax=cfg.fmax, htk=True, norm=None,
    )


def mel_center_frequencies(cfg: MelConfig) -> np.ndarray:
    edges = librosa.mel_frequencies(n_mels=cfg.n_mels + 2, fmin=cfg.fmin, fmax=cfg.fmax, htk=True)
    return edges[1:-1]


def num_frames(length: int, cfg: MelConfig) -> int:
    return 1 + (length - cfg.n_fft) // cfg.hop_length


def stft(samples: np.ndarray, cfg: MelConfig) -> np.ndarray:
    return librosa.stft(
        np.asarray(samples, dtype=np.float64), n_fft=cfg.n_fft, hop_length=cfg.hop_length,
        win_length=cfg.win_length, window="hann", center=False,
    )


def istft(spectrum: np.ndarray, cfg: MelConfig, length: int) -> np.ndarray:
    return librosa.istft(
        spectrum, hop_length=cfg.hop_length, win_length=cfg.win_length, n_fft=cfg.n_fft,
        window="hann", center=False, length=length,
    )


def extract_mel(w: Waveform, cfg: MelConfig) -> AcousticFeature:
    if w.samples.size < cfg.n_fft:
        raise InputTooShort(int(w.samples.size), cfg.n_fft)
    magnitude = np.abs(stft(w.samples, cfg))
    mel = mel_filterbank(cfg) @ magnitude
    log_mel = np.log(np.maximum(mel, cfg.log_floor)).astype(np.float32)
    return AcousticFeature(
        data=log_mel, kind="mel", frame_rate=cfg.frame_rate,
        sample_rate=cfg.sample_rate, config_hash=cfg.config_hash(),
    )


def frame_aligned_span(samples: np.ndarray, cfg: MelConfig) -> np.ndarray:
    """The T·hop samples whose hop-sized cells are centred in the T mel frames."""
    t = num_frames(samples.size, cfg)
    start = cfg.frame_offset
    return samples[start:start + t * cfg.hop_length]


# ── Griffin-Lim ───────────────────────────────────────────────────────────────

def mel_to_linear(feature: AcousticFeature, cfg: MelConfig) -> np.ndarray:
    """Non-negative least-squares inversion of the filterbank, frame by frame."""
    mel = np.exp(feature.data.astype(np.float64))
    return librosa.feature.inverse.mel_to_stft(
        mel, sr=cfg.sample_rate, n_fft=cfg.n_fft, power=1.0,
        fmin=cfg.fmin, fmax=cfg.fmax, htk=True, norm=None,
    )


def griffin_lim(
    feature: AcousticFeature,
    cfg: MelConfig,
    iters: int,
    *,
    init: Literal["zero", "random"] = "zero",
    seed: int = 0,
    errors: Optional[list[float]] = None,
) -> Waveform:
    """Phase recovery from a log-mel feature.

    ``iters=0`` returns the zero-phase (or seeded random-phase) reconstruction.
    When ``errors`` is given it receives ‖S − |STFT(y)|‖ for every iterate, including the first.
    """
    if feature.kind != "mel":
        raise KindMismatch("mel", feature.kind)
    target = mel_to_linear(feature, cfg)
    length = (feature.n_frames - 1) * cfg.hop_length + cfg.n_fft
    if init == "zero":
        phase = np.ones(target.shape, dtype=np.complex128)
    else:
        rng = np.random.default_rng(seed)
        phase = np.exp(2j * np.pi * rng.random(target.shape))

    y = istft(target * phase, cfg, length)
    for _ in range(iters):
        rebuilt = stft(y, cfg)
        if errors is not None:
            errors.append(float(np.linalg.norm(target - np.abs(rebuilt))))
        phase = np.exp(1j * np.angle(rebuilt))
        y = istft(target * phase, cfg, length)
    if errors is not None:
        errors.append(float(np.linalg.norm(target - np.abs(stft(y, cfg)))))

    y = _taper_edges(y, cfg, feature.n_frames)
    peak = float(np.max(np.abs(y))) if y.size else 0.0
    if peak > 1.0:
        y = y / peak
    logger.debug("Griffin-Lim: %d iterations, %d samples", iters, y.size)
    return Waveform(samples=y.astype(np.float32), sample_rate=cfg.sample_rate)


def _taper_edges(y: np.ndarray, cfg: MelConfig, n_frames: int) -> np.ndarray:
    """Undo the overlap-add normalization where the window sum-square is close to zero."""
    wss = librosa.filters.window_sumsquare(
        window="hann", n_frames=n_frames, hop_length=cfg.hop_length,
        win_length=cfg.win_length, n_fft=cfg.n_fft, dtype=np.float64,
    )[:y.size]
    floor = 0.1 * float(wss.max())
    return y * wss / np.maximum(wss, floor)


# ── WAV I/O ───────────────────────────────────────────────────────────────────

def read_wav(path: Path) -> Waveform:
    try:
        rate, data = wavfile.read(str(path))
    except (OSError, ValueError) as exc:
        raise StorageError(str(path), str(exc)) from exc
    if np.issubdtype(data.dtype, np.integer):
        data = data.astype(np.float32) / float(np.iinfo(data.dtype).max + 1)
    if data.ndim == 2:
        data = data.mean(axis=1)
    return Waveform(samples=data.astype(np.float32), sample_rate=int(rate))


def write_wav(path: Path, w: Waveform) -> Path:
    pcm = np.round(w.clipped().samples * 32767.0).astype(np.int16)
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        wavfile.write(str(path), w.sample_rate, pcm)
    except OSError as exc:
        raise StorageError(str(path), exc.strerror or str(exc)) from exc
    return path


# ── Feature cache ─────────────────────────────────────────────────────────────

def write_feature(path: Path, feature: AcousticFeature) -> Path:
    n, t = feature.data.shape
    payload = _HEADER.pack(FEATURE_MAGIC, FEATURE_VERSION, _KIND_CODES[feature.kind], n, t)
    payload += np.ascontiguousarray(feature.data, dtype="<f4").tobytes()
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(payload)
    except OSError as exc:
        raise StorageError(str(path), exc.strerror or str(exc)) from exc
    return path


def read_feature(path: Path, *, frame_rate: float, sample_rate: int, config_hash: str = "") -> AcousticFeature:
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise StorageError(str(path), exc.strerror or str(exc)) from exc
    if len(raw) < _HEADER.size:
        raise StorageError(str(path), "truncated feature header")
    magic, version, kind_code, n, t = _HEADER.unpack_from(raw)
    if magic != FEATURE_MAGIC or version != FEATURE_VERSION:
        raise StorageError(str(path), f"not a version-{FEATURE_VERSION} feature file")
    kinds = {v: k for k, v in _KIND_CODES.items()}
    if kind_code not in kinds:
        raise StorageError(str(path), f"unknown feature kind code {kind_code}")
    body = raw[_HEADER.size:]
    if len(body) != 4 * n * t:
        raise StorageError(str(path), f"expected {n}x{t} floats, found {len(body) // 4}")
    data = np.frombuffer(body, dtype="<f4").reshape(n, t).astype(np.float32)
    return AcousticFeature(
        data=data, kind=kinds[kind_code], frame_rate=frame_rate,
        sample_rate=sample_rate, config_hash=config_hash,
    )
