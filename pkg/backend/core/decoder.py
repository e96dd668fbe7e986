"""Acoustic decoder (FFT stack + per-frame projection) and the training losses."""
from typing import Sequence

import numpy as np
import torch
from torch import Tensor, nn

from core.encoder import EmbeddingSequence, FftStack
from core.errors import KindMismatch, ShapeMismatch
from core.style_adapter import FrameEmbedding
from models.audio import AcousticFeature


class AcousticDecoder(nn.Module):
    def __init__(self, stack: FftStack, dim: int, n_out: int):
        super().__init__()
        self.stack = stack
        self.projection = nn.Linear(dim, n_out)

    def forward(self, h_l: FrameEmbedding) -> Tensor:
        """(B, T, M) frame embeddings → (B, T, N) features, zero on padded frames."""
        x, mask = self.stack(EmbeddingSequence(h_l.data, h_l.mask))
        return self.projection(x) * mask.unsqueeze(-1).to(x.dtype)


def tts_loss(target: Tensor, predicted: Tensor, mask: Tensor) -> Tensor:
    """Mean squared error over unmasked frames and every feature bin."""
    if target.shape != predicted.shape or target.shape[:2] != mask.shape:
        raise ShapeMismatch(target.shape, predicted.shape)
    weights = mask.unsqueeze(-1).to(predicted.dtype)
    count = weights.sum().clamp(min=1.0) * target.shape[-1]
    return (((target - predicted) ** 2) * weights).sum() / count


def feature_loss(target: AcousticFeature, predicted: AcousticFeature) -> float:
    """Unbatched tts loss between two N×T features of the same kind."""
    if target.kind != predicted.kind:
        raise KindMismatch(target.kind, predicted.kind)
    if target.data.shape != predicted.data.shape:
        raise ShapeMismatch(target.data.shape, predicted.data.shape)
    return float(np.mean((target.data.astype(np.float64) - predicted.data.astype(np.float64)) ** 2))


def total_loss(loss_d: Tensor | float, loss_tts: Tensor | float, weights: Sequence[float] = (1.0, 1.0)):
    return weights[0] * loss_d + weights[1] * loss_tts
