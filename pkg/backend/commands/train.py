"""train — fit the acoustic model on a manifest."""
from pathlib import Path
from typing import Optional

import click

from config import Settings
from core.checkpoint import load_checkpoint
from core.trainer import train as run_training
from models.training import TrainConfig


@click.command("train")
@click.option("--manifest", type=click.Path(exists=True, dir_okay=False, path_type=Path), required=True)
@click.option("--out", "out_dir", type=click.Path(file_okay=False, path_type=Path), required=True)
@click.option("--preset", type=click.Choice(["paper", "desk"]), default=None, help="Defaults to PRESET.")
@click.option("--steps", type=click.IntRange(min=1), default=None)
@click.option("--epochs", type=click.IntRange(min=1), default=None)
@click.option("--batch-size", type=click.IntRange(min=1), default=None)
@click.option("--seed", type=int, default=None, help="Defaults to SEED.")
@click.option("--kind", "feature_kind", type=click.Choice(["mel", "latent"]), default=None)
@click.option("--ae-ckpt", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--scheme", type=click.Choice(["alphabet", "ipa"]), default=None)
@click.option("--no-style", is_flag=True, help="Replace every style id by the none marker.")
@click.option("--fusion", type=click.Choice(["gated", "additive"]), default=None)
@click.option("--share-encoders", is_flag=True, help="One FFT stack for phonemes and styles.")
@click.option("--resume", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None)
@click.option("--workers", type=click.IntRange(min=1), default=None)
@click.pass_obj
def train(s: Settings, manifest: Path, out_dir: Path, preset: Optional[str], steps: Optional[int],
          epochs: Optional[int], batch_size: Optional[int], seed: Optional[int], feature_kind: Optional[str],
          ae_ckpt: Optional[str], scheme: Optional[str], no_style: bool, fusion: Optional[str],
          share_encoders: bool, resume: Optional[Path], workers: Optional[int]):
    """Train with teacher-forced durations; writes model.pt and losses.csv into OUT."""
    if resume is not None:
        config = load_checkpoint(resume).train_config
        if steps is not None:
            config = config.model_copy(update={"max_steps": steps})
    else:
        config = TrainConfig.from_preset(
            preset or s.PRESET,
            max_steps=steps, max_epochs=epochs, batch_size=batch_size,
            seed=s.SEED if seed is None else seed,
            feature_kind=feature_kind, ae_checkpoint=ae_ckpt, scheme=scheme, fusion=fusion,
            use_style=False if no_style else None,
            share_encoders=True if share_encoders else None,
        )
    result = run_training(config, manifest, out_dir, s=s, resume=resume, workers=workers)
    click.echo(f"{result.checkpoint_path}\tsteps {result.steps}\tfinal loss {result.final_loss:.6f}")
    click.echo(result.loss_csv_path)
