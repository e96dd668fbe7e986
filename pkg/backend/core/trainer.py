"""
Training loop: inverse-square-root warm-up schedule, Adam, teacher-forced
durations, periodic checkpoints and a CSV loss history.
"""
import logging
import math
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd
import torch

from config import Settings, settings
from core.acoustic_model import AcousticModel, build_model
from core.autoencoder import ConvAutoencoder, load_autoencoder
from core.batching import Batch, make_batch
from core.checkpoint import load_checkpoint, save_checkpoint
from core.corpus import read_manifest
from core.errors import ConfigMismatch, EmptyCorpus, NaNLoss, StorageError
from core.feature_store import FeatureStore
from core.tokenizer import Tokenizer, get_tokenizer
from models.training import LossRecord, ModelConfig, TrainConfig, TrainResult

logger = logging.getLogger(__name__)

LOSS_COLUMNS = ["step", "loss_total", "loss_tts", "loss_d", "lr"]
ADAM_BETAS = (0.9, 0.98)
ADAM_EPS = 1e-9


def lr_schedule(step: int, base_lr: float, warmup: int) -> float:
    """base_lr · min(step^-1/2, step · warmup^-3/2); peaks at step == warmup."""
    if step < 1:
        raise ValueError(f"step must be >= 1, got {step}")
    return base_lr * min(step ** -0.5, step * warmup ** -1.5)


def model_config_for(config: TrainConfig, tokenizer: Tokenizer, n_out: int) -> ModelConfig:
    return ModelConfig(
        scheme=config.scheme,
        n_phonemes=len(tokenizer.inventory(config.scheme)),
        n_styles=len(tokenizer.styles),
        embedding_dim=config.embedding_dim,
        ffn_dim=config.ffn_dim,
        n_heads=config.n_heads,
        n_enc_layers=config.n_enc_layers,
        n_dec_layers=config.n_dec_layers,
        dropout=config.dropout,
        n_out=n_out,
        feature_kind=config.feature_kind,
        fusion=config.fusion,
        use_style=config.use_style,
        share_encoders=config.share_encoders,
        pad_id=tokenizer.inventory(config.scheme).pad_id,
        style_pad_id=tokenizer.styles.pad_id,
        none_style_id=tokenizer.styles.none_id,
    )


def batch_order(n_records: int, batch_size: int, seed: int, epoch: int) -> list[list[int]]:
    """Seeded per-epoch permutation, cut into batches."""
    order = np.random.default_rng(seed + epoch).permutation(n_records)
    return [order[i:i + batch_size].tolist() for i in range(0, n_records, batch_size)]


def write_loss_csv(path: Path, history: list[LossRecord]) -> Path:
    frame = pd.DataFrame([r.model_dump() for r in history], columns=LOSS_COLUMNS)
    try:
        frame.to_csv(path, index=False)
    except OSError as exc:
        raise StorageError(str(path), exc.strerror or str(exc)) from exc
    return path


def train_step(model: AcousticModel, optimizer: torch.optim.Optimizer, batch: Batch, step: int,
               config: TrainConfig) -> LossRecord:
    lr = lr_schedule(step, config.base_lr, config.warmup_steps)
    for group in optimizer.param_groups:
        group["lr"] = lr
    model.train()
    output = model(batch.phoneme_ids, batch.style_ids, durations=batch.durations)
    losses = model.losses(output, batch.features, batch.durations, batch.token_mask, config.loss_weights)
    if not torch.isfinite(losses.total):
        raise NaNLoss(step)
    optimizer.zero_grad()
    losses.total.backward()
    if config.grad_clip_norm is not None:
        torch.nn.utils.clip_grad_norm_(model.parameters(), config.grad_clip_norm)
    optimizer.step()
    return LossRecord(step=step, loss_total=float(losses.total), loss_tts=float(losses.tts),
                      loss_d=float(losses.duration), lr=lr)


def train(
    config: TrainConfig,
    manifest: Path,
    out_dir: Path,
    *,
    s: Settings = settings,
    resume: Optional[Path] = None,
    tokenizer: Optional[Tokenizer] = None,
    workers: Optional[int] = None,
) -> TrainResult:
    tokenizer = tokenizer or get_tokenizer(s)
    out_dir = Path(out_dir)
    records = read_manifest(manifest)
    if not records:
        raise EmptyCorpus(str(manifest))
    mel_config = s.mel_config

    start_step, history = 0, []
    checkpoint = load_checkpoint(resume) if resume else None
    autoencoder: Optional[ConvAutoencoder] = None
    if checkpoint is not None:
        if checkpoint.mel_config != mel_config:
            raise ConfigMismatch("resume checkpoint was trained with a different audio configuration")
        config = checkpoint.train_config.model_copy(update={"max_steps": config.max_steps})
        autoencoder = checkpoint.autoencoder
    elif config.feature_kind == "latent":
        if not config.ae_checkpoint:
            raise ConfigMismatch("latent training needs --ae-ckpt")
        autoencoder = load_autoencoder(Path(config.ae_checkpoint))

    cache_dir = Path(s.FEATURE_CACHE_DIR) if s.FEATURE_CACHE_DIR else out_dir / "features"
    store = FeatureStore(cache_dir, config.feature_kind, mel_config, autoencoder)
    store.extract_all(records, workers if workers is not None else s.NUM_WORKERS)

    torch.manual_seed(config.seed)
    model_config = model_config_for(config, tokenizer, store.n_bins)
    if checkpoint is not None:
        model = checkpoint.build_model()
    else:
        model = build_model(model_config, config.seed)
    optimizer = torch.optim.Adam(model.parameters(), lr=0.0, betas=ADAM_BETAS, eps=ADAM_EPS,
                                 weight_decay=config.weight_decay)
    if checkpoint is not None:
        if checkpoint.optimizer_state:
            optimizer.load_state_dict(checkpoint.optimizer_state)
        if checkpoint.rng_state is not None:
            torch.set_rng_state(checkpoint.rng_state)
        start_step, history = checkpoint.step, list(checkpoint.history)
        logger.info("Resuming from %s at step %d", resume, start_step)

    batches_per_epoch = math.ceil(len(records) / config.batch_size)
    max_steps = config.max_steps
    if config.max_epochs is not None:
        max_steps = min(max_steps, config.max_epochs * batches_per_epoch)

    out_dir.mkdir(parents=True, exist_ok=True)
    order_epoch, order = -1, []
    for step in range(start_step + 1, max_steps + 1):
        epoch, position = divmod(step - 1, batches_per_epoch)
        if epoch != order_epoch:
            order_epoch, order = epoch, batch_order(len(records), config.batch_size, config.seed, epoch)
        # Built per step; padded batches are not kept across steps.
        batch = make_batch([records[i] for i in order[position]], tokenizer, store, config.scheme)
        record = train_step(model, optimizer, batch, step, config)
        history.append(record)
        if step % config.log_every == 0 or step == 1:
            logger.info("step %d: loss=%.5f (tts %.5f, dur %.5f) lr=%.2e",
                        step, record.loss_total, record.loss_tts, record.loss_d, record.lr)
        if step % config.checkpoint_every == 0 and step < max_steps:
            save_checkpoint(out_dir / f"step_{step:06d}.pt", model, config, mel_config, optimizer=optimizer,
                            step=step, history=history, autoencoder=autoencoder)

    final_step = max(max_steps, start_step)
    ckpt_path = save_checkpoint(out_dir / "model.pt", model, config, mel_config, optimizer=optimizer,
                                step=final_step, history=history, autoencoder=autoencoder)
    csv_path = write_loss_csv(out_dir / "losses.csv", history)
    final = history[-1].loss_total if history else float("nan")
    logger.info("Training finished at step %d, final loss %.5f", final_step, final)
    return TrainResult(checkpoint_path=str(ckpt_path), loss_csv_path=str(csv_path), steps=final_step,
                       final_loss=final, history=history)
