"""Pydantic schemas for model architecture, training runs and their results."""
from typing import Literal, Optional

from pydantic import BaseModel, Field, model_validator

from models.audio import FeatureKind
from models.tokens import Scheme

Fusion = Literal["gated", "additive"]
Preset = Literal["paper", "desk"]


class ModelConfig(BaseModel):
    scheme: Scheme = "ipa"
    n_phonemes: int = Field(..., gt=0)
    n_styles: int = Field(..., gt=0)
    embedding_dim: int = Field(256, gt=0)
    ffn_dim: int = Field(1024, gt=0)
    n_heads: int = Field(2, gt=0)
    n_enc_layers: int = Field(4, ge=0)
    n_dec_layers: int = Field(4, ge=0)
    conv_kernel: int = Field(9, gt=0)        # first FFN conv width (k1)
    conv_kernel_out: int = Field(1, gt=0)    # second FFN conv width (k2)
    dp_kernel: int = Field(3, gt=0)
    dropout: float = Field(0.1, ge=0.0, lt=1.0)
    n_out: int = Field(80, gt=0)             # N: mel bins or latent channels
    feature_kind: FeatureKind = "mel"
    fusion: Fusion = "gated"
    use_style: bool = True
    share_encoders: bool = False
    pad_id: int = 0
    style_pad_id: int = 0
    none_style_id: int = 1

    @model_validator(mode="after")
    def _check_dims(self) -> "ModelConfig":
        if self.embedding_dim % self.n_heads:
            raise ValueError(f"embedding_dim {self.embedding_dim} not divisible by n_heads {self.n_heads}")
        if self.conv_kernel % 2 == 0 or self.conv_kernel_out % 2 == 0 or self.dp_kernel % 2 == 0:
            raise ValueError("convolution widths must be odd to preserve sequence length")
        return self


class TrainConfig(BaseModel):
    preset: Preset = "desk"
    batch_size: int = Field(32, gt=0)
    max_steps: int = Field(2000, gt=0)
    max_epochs: Optional[int] = Field(None, gt=0)
    embedding_dim: int = Field(32, gt=0)
    ffn_dim: int = Field(64, gt=0)
    n_heads: int = Field(2, gt=0)
    n_enc_layers: int = Field(2, ge=0)
    n_dec_layers: int = Field(2, ge=0)
    dropout: float = Field(0.0, ge=0.0, lt=1.0)
    base_lr: float = Field(0.04, gt=0.0)
    warmup_steps: int = Field(400, gt=0)
    seed: int = 7
    feature_kind: FeatureKind = "mel"
    loss_weights: tuple[float, float] = (1.0, 1.0)    # (duration, tts)
    scheme: Scheme = "ipa"
    use_style: bool = True
    fusion: Fusion = "gated"
    share_encoders: bool = False
    grad_clip_norm: Optional[float] = Field(None, gt=0.0)
    weight_decay: float = Field(0.0, ge=0.0)
    checkpoint_every: int = Field(500, gt=0)
    log_every: int = Field(50, gt=0)
    ae_checkpoint: Optional[str] = None

    @classmethod
    def from_preset(cls, preset: Preset, **overrides) -> "TrainConfig":
        values = dict(PRESETS[preset])
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(preset=preset, **values)


PRESETS: dict[str, dict] = {
    # Published backbone scale: M=256 embeddings, 4k-step warm-up, batch 32.
    "paper": dict(
        embedding_dim=256, ffn_dim=1024, n_heads=2, n_enc_layers=4, n_dec_layers=4,
        dropout=0.1, base_lr=0.0625, warmup_steps=4000, max_steps=280_000,
    ),
    # Laptop scale: fits the toy corpus in minutes on CPU.
    "desk": dict(
        embedding_dim=32, ffn_dim=64, n_heads=2, n_enc_layers=2, n_dec_layers=2,
        dropout=0.0, base_lr=0.04, warmup_steps=400, max_steps=2000,
    ),
}


class LossRecord(BaseModel):
    step: int
    loss_total: float
    loss_tts: float
    loss_d: float
    lr: float


class TrainResult(BaseModel):
    checkpoint_path: str
    loss_csv_path: str
    steps: int
    final_loss: float
    history: list[LossRecord] = Field(default_factory=list)
