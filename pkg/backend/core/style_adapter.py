"""
Style adapter: gated fusion of phoneme and style embeddings, the duration
predictor, and length regulation from token to frame resolution.
"""
from typing import Literal, NamedTuple

import torch
import torch.nn.functional as F
from torch import Tensor, nn

from core.encoder import EmbeddingSequence
from core.errors import EmptyOutput, LengthMismatch, NonPositiveGroundTruthDuration, ShapeMismatch

MAX_LOG_DURATION = 10.0


class Durations(NamedTuple):
    frames: Tensor    # (B, L) int64, 0 at pad tokens

    @property
    def total(self) -> Tensor:
        return self.frames.sum(dim=1)


class FrameEmbedding(NamedTuple):
    data: Tensor              # (B, T, M)
    mask: Tensor              # (B, T) bool
    frame_to_token: Tensor    # (B, T) int64, -1 on padded frames


# ── Fusion ────────────────────────────────────────────────────────────────────

def gate(h_prime: Tensor) -> Tensor:
    return torch.tanh(h_prime) * torch.sigmoid(h_prime)


def fuse(h_x: EmbeddingSequence, h_s: EmbeddingSequence, mode: Literal["gated", "additive"] = "gated") -> EmbeddingSequence:
    """H' = H_X + H_S, then H = tanh(H') ⊙ σ(H'); ``additive`` stops at H'."""
    if h_x.data.shape != h_s.data.shape:
        raise ShapeMismatch(h_x.data.shape, h_s.data.shape)
    if not torch.equal(h_x.mask, h_s.mask):
        raise ShapeMismatch(h_x.mask.shape, h_s.mask.shape)
    h_prime = h_x.data + h_s.data
    return EmbeddingSequence(gate(h_prime) if mode == "gated" else h_prime, h_x.mask)


# ── Duration predictor ────────────────────────────────────────────────────────

class DurationPredictor(nn.Module):
    """Two (conv3 → relu → layer norm → dropout) blocks, then a linear map to one log-duration."""

    def __init__(self, dim: int, kernel: int = 3, dropout: float = 0.1):
        super().__init__()
        self.dim = dim
        self.conv1 = nn.Conv1d(dim, dim, kernel, padding=kernel // 2)
        self.norm1 = nn.LayerNorm(dim)
        self.conv2 = nn.Conv1d(dim, dim, kernel, padding=kernel // 2)
        self.norm2 = nn.LayerNorm(dim)
        self.dropout = nn.Dropout(dropout)
        self.proj = nn.Linear(dim, 1)

    def forward(self, h: EmbeddingSequence) -> Tensor:
        x, mask = h
        if x.dim() != 3 or x.shape[-1] != self.dim:
            raise ShapeMismatch((*mask.shape, self.dim), x.shape)
        keep = mask.unsqueeze(-1).to(x.dtype)
        x = F.relu(self.conv1((x * keep).transpose(1, 2)).transpose(1, 2))
        x = self.dropout(self.norm1(x))
        x = F.relu(self.conv2((x * keep).transpose(1, 2)).transpose(1, 2))
        x = self.dropout(self.norm2(x))
        return self.proj(x).squeeze(-1) * mask.to(x.dtype)


def parameter_count(dim: int, kernel: int = 3) -> int:
    return 2 * (kernel * dim * dim + dim) + 2 * 2 * dim + dim + 1


def duration_loss(gt: Tensor, predicted_log: Tensor, mask: Tensor) -> Tensor:
    """Mean over unmasked tokens of |log gt − predicted_log|."""
    if gt.shape != predicted_log.shape or gt.shape != mask.shape:
        raise ShapeMismatch(gt.shape, predicted_log.shape)
    bad = int(((gt <= 0) & mask).sum())
    if bad:
        raise NonPositiveGroundTruthDuration(bad)
    log_gt = torch.log(gt.clamp(min=1).to(predicted_log.dtype))
    weights = mask.to(predicted_log.dtype)
    return ((log_gt - predicted_log).abs() * weights).sum() / weights.sum().clamp(min=1.0)


def durations_from_log(predicted_log: Tensor, mask: Tensor) -> Durations:
    """max(1, round-half-even(exp(x))) on real tokens, 0 on pads."""
    frames = torch.round(torch.exp(predicted_log.detach().clamp(max=MAX_LOG_DURATION)))
    frames = frames.clamp(min=1).to(torch.long) * mask.to(torch.long)
    return Durations(frames)


# ── Length regulation ─────────────────────────────────────────────────────────

def length_regulate(h: EmbeddingSequence, d: Durations) -> FrameEmbedding:
    """Repeat token i ``d[i]`` times, in order; zero-duration tokens vanish."""
    x, mask = h
    frames = d.frames
    if frames.shape != mask.shape:
        raise LengthMismatch(f"{frames.shape[-1]} durations for {mask.shape[-1]} tokens")
    if bool((frames < 0).any()):
        raise LengthMismatch("durations must be non-negative")
    frames = frames.to(torch.long) * mask.to(torch.long)
    totals = frames.sum(dim=1)
    if bool((totals == 0).any()):
        raise EmptyOutput()

    length = int(totals.max())
    rows, masks, indices = [], [], []
    token_index = torch.arange(x.shape[1], device=x.device)
    for b in range(x.shape[0]):
        idx = torch.repeat_interleave(token_index, frames[b])
        n = idx.numel()
        rows.append(F.pad(x[b].index_select(0, idx), (0, 0, 0, length - n)))
        masks.append(torch.arange(length, device=x.device) < n)
        indices.append(F.pad(idx, (0, length - n), value=-1))
    return FrameEmbedding(torch.stack(rows), torch.stack(masks), torch.stack(indices))
