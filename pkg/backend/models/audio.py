"""Pydantic schemas for waveforms, acoustic features and feature-extraction configs."""
import hashlib
import math
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

FeatureKind = Literal["mel", "latent"]


class MelConfig(BaseModel):
    sample_rate: int = Field(16_000, gt=0)
    n_fft: int = Field(1024, gt=0)
    hop_length: int = Field(256, gt=0)
    win_length: int = Field(1024, gt=0)
    n_mels: int = Field(80, gt=0)
    fmin: float = Field(0.0, ge=0.0)
    fmax: float = 8000.0
    log_floor: float = Field(1e-5, gt=0.0)

    @model_validator(mode="after")
    def _check_ordering(self) -> "MelConfig":
        if not self.hop_length <= self.win_length <= self.n_fft:
            raise ValueError("expected hop_length <= win_length <= n_fft")
        if self.fmax > self.sample_rate / 2:
            raise ValueError(f"fmax {self.fmax} exceeds Nyquist ({self.sample_rate / 2})")
        if self.fmin >= self.fmax:
            raise ValueError("fmin must be below fmax")
        return self

    @property
    def frame_rate(self) -> float:
        return self.sample_rate / self.hop_length

    @property
    def frame_offset(self) -> int:
        """Samples before the first hop-sized cell covered by frame 0."""
        return (self.n_fft - self.hop_length) // 2

    def config_hash(self) -> str:
        return hashlib.sha1(self.model_dump_json().encode("utf-8")).hexdigest()[:12]


class AutoencoderConfig(BaseModel):
    strides: list[int] = Field(default_factory=lambda: [4, 4, 4, 4])
    channels: list[int] = Field(default_factory=lambda: [128, 256, 256])   # hidden widths between layers
    latent_dim: int = Field(32, gt=0)
    domain: Literal["waveform", "mel"] = "waveform"
    in_channels: int = Field(1, gt=0)      # 1 for waveforms, n_mels for the mel domain
    crossfade: int = Field(0, ge=0)        # samples blended either side of each latent-frame boundary

    @model_validator(mode="after")
    def _check_layers(self) -> "AutoencoderConfig":
        if not self.strides:
            raise ValueError("at least one layer is required")
        if len(self.channels) != len(self.strides) - 1:
            raise ValueError("channels must list one width per hidden layer (len(strides) - 1)")
        for s in self.strides:
            if s < 1 or (s > 1 and s % 2):
                raise ValueError(f"stride {s} must be 1 or even")
        if self.domain == "waveform" and self.in_channels != 1:
            raise ValueError("waveform-domain autoencoders take a single input channel")
        return self

    @property
    def ratio(self) -> int:
        return math.prod(self.strides)

    @property
    def layer_widths(self) -> list[tuple[int, int]]:
        widths = [self.in_channels, *self.channels, self.latent_dim]
        return list(zip(widths[:-1], widths[1:]))

    @staticmethod
    def kernel_size(stride: int) -> int:
        return 3 if stride == 1 else 2 * stride

    @staticmethod
    def padding(stride: int) -> int:
        return 1 if stride == 1 else stride // 2


class Waveform(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    samples: np.ndarray
    sample_rate: int = Field(..., gt=0)

    @field_validator("samples")
    @classmethod
    def _check_samples(cls, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=np.float32)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("waveform samples must be a non-empty 1-D array")
        if not np.all(np.isfinite(v)):
            raise ValueError("waveform contains non-finite samples")
        return v

    @property
    def duration_seconds(self) -> float:
        return self.samples.size / self.sample_rate

    def clipped(self) -> "Waveform":
        return Waveform(samples=np.clip(self.samples, -1.0, 1.0), sample_rate=self.sample_rate)


class AcousticFeature(BaseModel):
    """N×T feature matrix (rows = bins) tagged mel or latent."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    data: np.ndarray
    kind: FeatureKind
    frame_rate: float = Field(..., gt=0)
    sample_rate: int = Field(..., gt=0)
    config_hash: str = ""
    source_length: Optional[int] = None    # unpadded input length, when the encoder padded

    @field_validator("data")
    @classmethod
    def _check_data(cls, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=np.float32)
        if v.ndim != 2 or v.shape[1] < 1:
            raise ValueError("feature data must be N×T with T >= 1")
        if not np.all(np.isfinite(v)):
            raise ValueError("feature data contains non-finite values")
        return v

    @property
    def n_bins(self) -> int:
        return int(self.data.shape[0])

    @property
    def n_frames(self) -> int:
        return int(self.data.shape[1])
