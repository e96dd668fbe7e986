"""
Token embedding, sinusoidal positional encoding and FFT
(self-attention + two 1-D convolutions) blocks.

Tensors are batch-first: embeddings are (B, L, M) with a boolean (B, L)
mask that is True at real tokens.
"""
import math
from typing import NamedTuple

import torch
import torch.nn.functional as F
from torch import Tensor, nn

from core.errors import IdOutOfRange, OddEmbeddingDim, ShapeMismatch


class EmbeddingSequence(NamedTuple):
    data: Tensor    # (B, L, M)
    mask: Tensor    # (B, L) bool


def token_mask(ids: Tensor, pad_id: int) -> Tensor:
    return ids != pad_id


def embed(ids: Tensor, mask: Tensor, table: Tensor) -> EmbeddingSequence:
    """Row lookup; pad columns come out zero and masked."""
    if ids.numel() and (int(ids.min()) < 0 or int(ids.max()) >= table.shape[0]):
        bad = int(ids.max()) if int(ids.max()) >= table.shape[0] else int(ids.min())
        raise IdOutOfRange(bad, table.shape[0])
    data = F.embedding(ids, table) * mask.unsqueeze(-1).to(table.dtype)
    return EmbeddingSequence(data, mask)


def positional_table(length: int, dim: int, dtype: torch.dtype = torch.float32) -> Tensor:
    if dim % 2:
        raise OddEmbeddingDim(dim)
    position = torch.arange(length, dtype=torch.float64).unsqueeze(1)
    scale = torch.pow(10000.0, torch.arange(0, dim, 2, dtype=torch.float64) / dim)
    table = torch.zeros(length, dim, dtype=torch.float64)
    table[:, 0::2] = torch.sin(position / scale)
    table[:, 1::2] = torch.cos(position / scale)
    return table.to(dtype)


def positional_encode(e: EmbeddingSequence) -> EmbeddingSequence:
    """Add PE to unmasked columns; masked columns pass through unchanged."""
    _, length, dim = e.data.shape
    pe = positional_table(length, dim, e.data.dtype).to(e.data.device)
    return EmbeddingSequence(e.data + pe.unsqueeze(0) * e.mask.unsqueeze(-1).to(e.data.dtype), e.mask)


class MultiHeadSelfAttention(nn.Module):
    def __init__(self, dim: int, n_heads: int, dropout: float = 0.0):
        super().__init__()
        if dim % n_heads:
            raise ShapeMismatch((dim - dim % n_heads,), (dim,))
        self.n_heads = n_heads
        self.head_dim = dim // n_heads
        self.query = nn.Linear(dim, dim)
        self.key = nn.Linear(dim, dim)
        self.value = nn.Linear(dim, dim)
        self.out = nn.Linear(dim, dim)
        self.dropout = nn.Dropout(dropout)

    def _heads(self, x: Tensor) -> Tensor:
        b, length, _ = x.shape
        return x.view(b, length, self.n_heads, self.head_dim).transpose(1, 2)

    def forward(self, x: Tensor, mask: Tensor) -> Tensor:
        b, length, dim = x.shape
        q, k, v = self._heads(self.query(x)), self._heads(self.key(x)), self._heads(self.value(x))
        scores = q @ k.transpose(-2, -1) / math.sqrt(self.head_dim)
        # Fully padded sequences attend uniformly instead of producing NaN.
        hidden_keys = ~mask & mask.any(dim=1, keepdim=True)
        scores = scores.masked_fill(hidden_keys[:, None, None, :], float("-inf"))
        weights = self.dropout(torch.softmax(scores, dim=-1))
        context = (weights @ v).transpose(1, 2).reshape(b, length, dim)
        return self.out(context)


class FftBlock(nn.Module):
    """out = LN2(h + Conv2(relu(Conv1(h)))), h = LN1(e + MHSA(e, mask))."""

    def __init__(self, dim: int, n_heads: int, ffn_dim: int, kernel: int, kernel_out: int, dropout: float):
        super().__init__()
        self.dim = dim
        self.attention = MultiHeadSelfAttention(dim, n_heads, dropout)
        self.norm1 = nn.LayerNorm(dim)
        self.conv1 = nn.Conv1d(dim, ffn_dim, kernel, padding=kernel // 2)
        self.conv2 = nn.Conv1d(ffn_dim, dim, kernel_out, padding=kernel_out // 2)
        self.norm2 = nn.LayerNorm(dim)
        self.dropout = nn.Dropout(dropout)

    def forward(self, x: Tensor, mask: Tensor) -> Tensor:
        if x.dim() != 3 or x.shape[-1] != self.dim or x.shape[:2] != mask.shape:
            raise ShapeMismatch((*mask.shape, self.dim), x.shape)
        keep = mask.unsqueeze(-1).to(x.dtype)
        h = self.norm1(x + self.dropout(self.attention(x, mask)))
        # Pad columns are zeroed before each convolution so their content cannot leak.
        c = F.relu(self.conv1((h * keep).transpose(1, 2)))
        c = self.conv2(c * keep.transpose(1, 2)).transpose(1, 2)
        return self.norm2(h + self.dropout(c)) * keep


class FftStack(nn.Module):
    """Positional encoding followed by ``n_layers`` FFT blocks."""

    def __init__(self, n_layers: int, dim: int, n_heads: int, ffn_dim: int, kernel: int, kernel_out: int,
                 dropout: float):
        super().__init__()
        self.layers = nn.ModuleList(
            FftBlock(dim, n_heads, ffn_dim, kernel, kernel_out, dropout) for _ in range(n_layers)
        )

    def forward(self, e: EmbeddingSequence) -> EmbeddingSequence:
        x, mask = positional_encode(e)
        for layer in self.layers:
            x = layer(x, mask)
        return EmbeddingSequence(x, mask)


def fft_block_parameter_count(dim: int, ffn_dim: int, kernel: int, kernel_out: int) -> int:
    attention = 4 * (dim * dim + dim)
    convs = kernel * dim * ffn_dim + ffn_dim + kernel_out * ffn_dim * dim + dim
    norms = 2 * 2 * dim
    return attention + convs + norms


class SequenceEncoder(nn.Module):
    """Embedding table plus an FFT stack for one token stream."""

    def __init__(self, vocab_size: int, dim: int, stack: FftStack, pad_id: int):
        super().__init__()
        self.table = nn.Embedding(vocab_size, dim)
        self.stack = stack
        self.pad_id = pad_id

    def forward(self, ids: Tensor) -> EmbeddingSequence:
        e = embed(ids, token_mask(ids, self.pad_id), self.table.weight)
        return self.stack(e)
