import math

import pytest
import torch

from core.encoder import (
    EmbeddingSequence,
    FftBlock,
    FftStack,
    SequenceEncoder,
    embed,
    fft_block_parameter_count,
    positional_encode,
    positional_table,
    token_mask,
)
from core.errors import IdOutOfRange, OddEmbeddingDim


def test_embed_zeroes_pad_columns():
    table = torch.arange(12, dtype=torch.float32).view(4, 3) + 1
    ids = torch.tensor([[2, 3, 0]])
    e = embed(ids, token_mask(ids, 0), table)
    assert torch.equal(e.data[0, 0], table[2])
    assert torch.equal(e.data[0, 2], torch.zeros(3))
    assert e.mask.tolist() == [[True, True, False]]


def test_embed_rejects_out_of_range_ids():
    with pytest.raises(IdOutOfRange):
        embed(torch.tensor([[5]]), torch.tensor([[True]]), torch.zeros(4, 2))


def test_positional_table_values():
    pe = positional_table(3, 4, torch.float64)
    assert pe[0].tolist() == [0.0, 1.0, 0.0, 1.0]
    assert pe[1, 0].item() == pytest.approx(math.sin(1.0))
    assert pe[1, 3].item() == pytest.approx(math.cos(1.0 / 100.0))


def test_positional_table_needs_even_dim():
    with pytest.raises(OddEmbeddingDim):
        positional_table(2, 3)


def test_positional_encode_skips_masked_columns():
    data = torch.zeros(1, 3, 4)
    mask = torch.tensor([[True, True, False]])
    out = positional_encode(EmbeddingSequence(data, mask))
    assert torch.equal(out.data[0, 2], torch.zeros(4))
    assert torch.allclose(out.data[0, 1], positional_table(3, 4)[1])


def test_fft_block_preserves_shape_and_zeroes_pads():
    torch.manual_seed(0)
    block = FftBlock(8, 2, 16, 3, 1, 0.0)
    x = torch.randn(2, 5, 8)
    mask = torch.tensor([[True] * 5, [True, True, True, False, False]])
    out = block(x, mask)
    assert out.shape == (2, 5, 8)
    assert torch.equal(out[1, 3:], torch.zeros(2, 8))


def test_padding_does_not_change_real_tokens():
    torch.manual_seed(0)
    stack = FftStack(2, 8, 2, 16, 3, 1, 0.0).eval()
    x = torch.randn(1, 3, 8)
    short = stack(EmbeddingSequence(x, torch.ones(1, 3, dtype=torch.bool)))
    padded_x = torch.cat([x, torch.randn(1, 2, 8)], dim=1)
    padded = stack(EmbeddingSequence(padded_x, torch.tensor([[True, True, True, False, False]])))
    assert torch.allclose(short.data[0], padded.data[0, :3], atol=1e-6)


def test_fully_padded_sequence_stays_finite():
    stack = FftStack(1, 8, 2, 16, 3, 1, 0.0)
    out = stack(EmbeddingSequence(torch.zeros(1, 4, 8), torch.zeros(1, 4, dtype=torch.bool)))
    assert torch.isfinite(out.data).all()


def test_block_parameter_count_matches_module():
    block = FftBlock(32, 2, 64, 9, 1, 0.1)
    assert sum(p.numel() for p in block.parameters()) == fft_block_parameter_count(32, 64, 9, 1)


def test_sequence_encoder_output_shape():
    encoder = SequenceEncoder(10, 8, FftStack(1, 8, 2, 16, 3, 1, 0.0), pad_id=0)
    out = encoder(torch.tensor([[1, 4, 2, 0]]))
    assert out.data.shape == (1, 4, 8)
    assert out.mask.tolist() == [[True, True, True, False]]


def test_block_with_silent_sublayers_reduces_to_two_layer_norms():
    torch.manual_seed(3)
    block = FftBlock(8, 2, 16, 3, 1, 0.0).eval()
    with torch.no_grad():
        for module in (block.attention, block.conv1, block.conv2):
            for p in module.parameters():
                p.zero_()
    x = torch.randn(2, 5, 8)
    out = block(x, torch.ones(2, 5, dtype=torch.bool))
    expected = torch.nn.functional.layer_norm(torch.nn.functional.layer_norm(x, (8,)), (8,))
    assert torch.allclose(out, expected, atol=1e-6)
