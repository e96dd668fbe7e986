"""
Strided 1-D convolutional autoencoder for latent acoustic features.

A waveform-domain model maps (1, S) samples to (latent_dim, S / R); a
mel-domain model maps (n_mels, T) mel frames to (latent_dim, T / R).
"""
import hashlib
import logging
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
import torch
import torch.nn.functional as F
from torch import Tensor, nn

from core.errors import CheckpointError, EmptyCorpus, KindMismatch, StorageError
from models.audio import AcousticFeature, AutoencoderConfig, Waveform

logger = logging.getLogger(__name__)

AE_CHECKPOINT_FORMAT = "tonemark-autoencoder"
AE_CHECKPOINT_VERSION = 1


class ConvAutoencoder(nn.Module):
    def __init__(self, config: AutoencoderConfig):
        super().__init__()
        self.config = config
        encoder: list[nn.Module] = []
        for i, ((c_in, c_out), s) in enumerate(zip(config.layer_widths, config.strides)):
            encoder.append(nn.Conv1d(c_in, c_out, config.kernel_size(s), stride=s, padding=config.padding(s)))
            if i < len(config.strides) - 1:
                encoder.append(nn.ReLU())
        decoder: list[nn.Module] = []
        mirrored = list(zip(reversed(config.layer_widths), reversed(config.strides)))
        for i, ((c_out, c_in), s) in enumerate(mirrored):
            decoder.append(nn.ConvTranspose1d(c_in, c_out, config.kernel_size(s), stride=s,
                                              padding=config.padding(s)))
            if i < len(mirrored) - 1:
                decoder.append(nn.ReLU())
        self.encoder = nn.Sequential(*encoder)
        self.decoder = nn.Sequential(*decoder)

    @property
    def ratio(self) -> int:
        return self.config.ratio

    def encode(self, x: Tensor) -> Tensor:
        return self.encoder(x)

    def decode(self, z: Tensor) -> Tensor:
        return self.decoder(z)

    def forward(self, x: Tensor) -> Tensor:
        return self.decode(self.encode(x))


def parameter_count(config: AutoencoderConfig) -> dict[str, int]:
    """Closed form: kernel·in·out + out per layer, identical for encoder and its transposed mirror."""
    per_layer = [
        config.kernel_size(s) * c_in * c_out + c_out
        for (c_in, c_out), s in zip(config.layer_widths, config.strides)
    ]
    mirrored = [
        config.kernel_size(s) * c_in * c_out + c_in
        for (c_in, c_out), s in zip(config.layer_widths, config.strides)
    ]
    return {"encoder": sum(per_layer), "decoder": sum(mirrored)}


# ── Feature-level encode / decode ─────────────────────────────────────────────

def _as_channels(x: Union[Waveform, AcousticFeature], config: AutoencoderConfig) -> tuple[np.ndarray, int, float]:
    if config.domain == "waveform":
        if not isinstance(x, Waveform):
            raise KindMismatch("waveform", getattr(x, "kind", type(x).__name__))
        return x.samples[None, :], x.sample_rate, float(x.sample_rate)
    if not isinstance(x, AcousticFeature) or x.kind != "mel":
        raise KindMismatch("mel", getattr(x, "kind", type(x).__name__))
    return x.data, x.sample_rate, x.frame_rate


def config_digest(config: AutoencoderConfig) -> str:
    return hashlib.sha1(config.model_dump_json().encode("utf-8")).hexdigest()[:12]


def ae_encode(x: Union[Waveform, AcousticFeature], model: ConvAutoencoder) -> AcousticFeature:
    """Pad to a multiple of R, encode, and record the unpadded length."""
    channels, sample_rate, input_rate = _as_channels(x, model.config)
    length = channels.shape[-1]
    padded = -(-length // model.ratio) * model.ratio
    signal = torch.from_numpy(np.pad(channels, ((0, 0), (0, padded - length)))).float().unsqueeze(0)
    model.eval()
    with torch.no_grad():
        z = model.encode(signal)[0].numpy()
    return AcousticFeature(
        data=z, kind="latent", frame_rate=input_rate / model.ratio, sample_rate=sample_rate,
        config_hash=config_digest(model.config), source_length=length,
    )


def ae_decode(z: AcousticFeature, model: ConvAutoencoder) -> Union[Waveform, AcousticFeature]:
    """Transposed-convolution decode; trims to the recorded source length when present."""
    if z.kind != "latent":
        raise KindMismatch("latent", z.kind)
    model.eval()
    with torch.no_grad():
        out = model.decode(torch.from_numpy(z.data).float().unsqueeze(0))[0].numpy()
    if model.config.crossfade:
        out = smooth_boundaries(out, model.ratio, model.config.crossfade)
    if z.source_length is not None:
        out = out[:, :z.source_length]
    if model.config.domain == "waveform":
        return Waveform(samples=out[0], sample_rate=z.sample_rate).clipped()
    return AcousticFeature(
        data=out, kind="mel", frame_rate=z.frame_rate * model.ratio, sample_rate=z.sample_rate,
    )


def smooth_boundaries(x: np.ndarray, ratio: int, width: int) -> np.ndarray:
    """Cross-fade ``width`` samples either side of every latent-frame boundary."""
    out = x.copy()
    kernel = np.hanning(2 * width + 3)[1:-1]
    kernel /= kernel.sum()
    for boundary in range(ratio, x.shape[-1], ratio):
        lo, hi = max(0, boundary - 2 * width), min(x.shape[-1], boundary + 2 * width)
        for c in range(x.shape[0]):
            smoothed = np.convolve(x[c, lo:hi], kernel, mode="same")
            a, b = boundary - width - lo, boundary + width - lo
            out[c, lo + max(a, 0):lo + b] = smoothed[max(a, 0):b]
    return out


# ── Training ──────────────────────────────────────────────────────────────────

def _segments(items: Sequence[np.ndarray], length: int, batch: int, rng: np.random.Generator) -> np.ndarray:
    picks = []
    for _ in range(batch):
        x = items[int(rng.integers(len(items)))]
        if x.shape[-1] <= length:
            picks.append(np.pad(x, ((0, 0), (0, length - x.shape[-1]))))
        else:
            start = int(rng.integers(x.shape[-1] - length + 1))
            picks.append(x[:, start:start + length])
    return np.stack(picks).astype(np.float32)


def train_autoencoder(
    corpus: Sequence[Union[Waveform, AcousticFeature]],
    config: AutoencoderConfig,
    *,
    steps: int = 2000,
    seed: int = 7,
    learning_rate: float = 1e-3,
    batch_size: int = 8,
    segment_frames: int = 16,
) -> tuple[ConvAutoencoder, list[float]]:
    """Seeded Adam on mean squared reconstruction error over random crops of ``segment_frames``·R inputs."""
    if not corpus:
        raise EmptyCorpus("autoencoder training set")
    torch.manual_seed(seed)
    rng = np.random.default_rng(seed)
    model = ConvAutoencoder(config)
    items = [_as_channels(x, config)[0] for x in corpus]
    optimizer = torch.optim.Adam(model.parameters(), lr=learning_rate)
    length = segment_frames * config.ratio
    history: list[float] = []
    model.train()
    for step in range(1, steps + 1):
        batch = torch.from_numpy(_segments(items, length, batch_size, rng))
        loss = F.mse_loss(model(batch), batch)
        optimizer.zero_grad()
        loss.backward()
        optimizer.step()
        history.append(float(loss))
        if step % 200 == 0 or step == steps:
            logger.info("AE step %d/%d: mse=%.6f", step, steps, history[-1])
    model.eval()
    return model, history


def reconstruction_snr(x: np.ndarray, x_hat: np.ndarray) -> float:
    """10·log10(‖x‖² / ‖x − x̂‖²) in dB."""
    noise = float(np.sum((x - x_hat) ** 2))
    signal = float(np.sum(x ** 2))
    if noise == 0.0:
        return float("inf")
    return 10.0 * np.log10(signal / noise)


# ── Persistence ───────────────────────────────────────────────────────────────

def autoencoder_state(model: ConvAutoencoder, history: Optional[list[float]] = None) -> dict:
    return {
        "format": AE_CHECKPOINT_FORMAT,
        "version": AE_CHECKPOINT_VERSION,
        "config": model.config.model_dump_json(),
        "state_dict": {k: v.detach().clone() for k, v in model.state_dict().items()},
        "history": list(history or []),
    }


def autoencoder_from_state(state: dict, source: str = "<embedded>") -> ConvAutoencoder:
    if state.get("format") != AE_CHECKPOINT_FORMAT or state.get("version") != AE_CHECKPOINT_VERSION:
        raise CheckpointError(source, "not a version-1 autoencoder checkpoint")
    model = ConvAutoencoder(AutoencoderConfig.model_validate_json(state["config"]))
    model.load_state_dict(state["state_dict"])
    model.eval()
    return model


def save_autoencoder(path: Path, model: ConvAutoencoder, history: Optional[list[float]] = None) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        torch.save(autoencoder_state(model, history), path)
    except OSError as exc:
        raise StorageError(str(path), exc.strerror or str(exc)) from exc
    return path


def load_autoencoder(path: Path) -> ConvAutoencoder:
    try:
        state = torch.load(path, map_location="cpu", weights_only=True)
    except FileNotFoundError as exc:
        raise StorageError(str(path), "no such file") from exc
    except Exception as exc:
        raise CheckpointError(str(path), str(exc)) from exc
    return autoencoder_from_state(state, str(path))
