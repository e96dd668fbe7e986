"""
The non-autoregressive acoustic model: phoneme and style encoders, gated
fusion, duration predictor, length regulator and acoustic decoder.
"""
import logging
import math
from typing import NamedTuple, Optional

import torch
from torch import Tensor, nn

from core import style_adapter
from core.decoder import AcousticDecoder, total_loss, tts_loss
from core.encoder import EmbeddingSequence, FftStack, SequenceEncoder, fft_block_parameter_count
from core.style_adapter import DurationPredictor, Durations, duration_loss, durations_from_log, fuse, length_regulate
from models.training import ModelConfig

logger = logging.getLogger(__name__)


class ModelOutput(NamedTuple):
    features: Tensor         # (B, T, N)
    frame_mask: Tensor       # (B, T)
    log_durations: Tensor    # (B, L)
    durations: Durations


class LossBreakdown(NamedTuple):
    total: Tensor
    tts: Tensor
    duration: Tensor


class AcousticModel(nn.Module):
    def __init__(self, config: ModelConfig):
        super().__init__()
        self.config = config
        c = config

        def stack(n_layers: int) -> FftStack:
            return FftStack(n_layers, c.embedding_dim, c.n_heads, c.ffn_dim, c.conv_kernel, c.conv_kernel_out,
                            c.dropout)

        self.phoneme_encoder = SequenceEncoder(c.n_phonemes, c.embedding_dim, stack(c.n_enc_layers), c.pad_id)
        style_stack = self.phoneme_encoder.stack if c.share_encoders else stack(c.n_enc_layers)
        self.style_encoder = SequenceEncoder(c.n_styles, c.embedding_dim, style_stack, c.style_pad_id)
        self.duration_predictor = DurationPredictor(c.embedding_dim, c.dp_kernel, c.dropout)
        self.decoder = AcousticDecoder(stack(c.n_dec_layers), c.embedding_dim, c.n_out)

    def style_ids_for(self, phoneme_ids: Tensor, style_ids: Tensor) -> Tensor:
        """With styles disabled every real token carries the none marker."""
        if self.config.use_style:
            return style_ids
        none = torch.full_like(style_ids, self.config.none_style_id)
        pad = torch.full_like(style_ids, self.config.style_pad_id)
        return torch.where(phoneme_ids != self.config.pad_id, none, pad)

    def encode(self, phoneme_ids: Tensor, style_ids: Tensor) -> tuple[EmbeddingSequence, EmbeddingSequence]:
        h_x = self.phoneme_encoder(phoneme_ids)
        h_s = self.style_encoder(self.style_ids_for(phoneme_ids, style_ids))
        # Style pads follow phoneme pads; keep a single mask.
        return h_x, EmbeddingSequence(h_s.data * h_x.mask.unsqueeze(-1).to(h_s.data.dtype), h_x.mask)

    def forward(self, phoneme_ids: Tensor, style_ids: Tensor, durations: Optional[Tensor] = None) -> ModelOutput:
        h_x, h_s = self.encode(phoneme_ids, style_ids)
        h = fuse(h_x, h_s, self.config.fusion)
        log_d = self.duration_predictor(h)
        d = Durations(durations) if durations is not None else durations_from_log(log_d, h.mask)
        h_l = length_regulate(h, d)
        return ModelOutput(self.decoder(h_l), h_l.mask, log_d, d)

    def losses(self, output: ModelOutput, target: Tensor, gt_durations: Tensor, token_mask: Tensor,
               weights: tuple[float, float] = (1.0, 1.0)) -> LossBreakdown:
        loss_d = duration_loss(gt_durations, output.log_durations, token_mask)
        loss_tts = tts_loss(target, output.features, output.frame_mask)
        return LossBreakdown(total_loss(loss_d, loss_tts, weights), loss_tts, loss_d)


def initialize(model: AcousticModel, seed: int) -> AcousticModel:
    """uniform(±1/√M) weights for projections, convolutions and embeddings; zero biases; LN gain 1, bias 0."""
    generator = torch.Generator().manual_seed(seed)
    bound = 1.0 / math.sqrt(model.config.embedding_dim)
    with torch.no_grad():
        for module in model.modules():
            if isinstance(module, (nn.Linear, nn.Conv1d, nn.Embedding)):
                module.weight.uniform_(-bound, bound, generator=generator)
                if getattr(module, "bias", None) is not None:
                    module.bias.zero_()
            elif isinstance(module, nn.LayerNorm):
                module.weight.fill_(1.0)
                module.bias.zero_()
    return model


def build_model(config: ModelConfig, seed: int) -> AcousticModel:
    model = initialize(AcousticModel(config), seed)
    logger.info("Built acoustic model: %d parameters (M=%d, %d+%d layers)",
                count_parameters(model), config.embedding_dim, config.n_enc_layers, config.n_dec_layers)
    return model


def count_parameters(module: nn.Module) -> int:
    return sum(p.numel() for p in module.parameters())


def parameter_count(config: ModelConfig) -> dict[str, int]:
    """Closed-form parameter counts per component."""
    m, f = config.embedding_dim, config.ffn_dim
    block = fft_block_parameter_count(m, f, config.conv_kernel, config.conv_kernel_out)
    encoder_stack = config.n_enc_layers * block
    counts = {
        "phoneme_encoder": config.n_phonemes * m + encoder_stack,
        "style_encoder": config.n_styles * m + (0 if config.share_encoders else encoder_stack),
        "duration_predictor": style_adapter.parameter_count(m, config.dp_kernel),
        "decoder": config.n_dec_layers * block + m * config.n_out + config.n_out,
    }
    counts["total"] = sum(counts.values())
    return counts
