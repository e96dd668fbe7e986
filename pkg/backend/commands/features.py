"""extract-features and train-ae — the acoustic-feature backends."""
import logging
from pathlib import Path
from typing import Optional

import click

from config import Settings
from core import dsp
from core.autoencoder import ae_decode, ae_encode, load_autoencoder, reconstruction_snr, save_autoencoder, train_autoencoder
from core.corpus import read_manifest
from core.feature_store import FeatureStore

logger = logging.getLogger(__name__)


@click.command("extract-features")
@click.option("--manifest", type=click.Path(exists=True, dir_okay=False, path_type=Path), required=True)
@click.option("--kind", type=click.Choice(["mel", "latent"]), default="mel", show_default=True)
@click.option("--ae-ckpt", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None)
@click.option("--out", "out_dir", type=click.Path(file_okay=False, path_type=Path), required=True)
@click.option("--workers", type=click.IntRange(min=1), default=None, help="Defaults to NUM_WORKERS.")
@click.option("--overwrite", is_flag=True)
@click.pass_obj
def extract_features(s: Settings, manifest: Path, kind: str, ae_ckpt: Optional[Path], out_dir: Path,
                     workers: Optional[int], overwrite: bool):
    """Pre-compute and cache one feature file per utterance."""
    records = read_manifest(manifest)
    autoencoder = load_autoencoder(ae_ckpt) if ae_ckpt else None
    store = FeatureStore(out_dir, kind, s.mel_config, autoencoder)
    paths = store.extract_all(records, workers or s.NUM_WORKERS, overwrite=overwrite)
    click.echo(f"{len(paths)} {kind} features in {out_dir}")


@click.command("train-ae")
@click.option("--manifest", type=click.Path(exists=True, dir_okay=False, path_type=Path), required=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False, path_type=Path), required=True)
@click.option("--steps", type=click.IntRange(min=1), default=None, help="Defaults to AE_STEPS.")
@click.option("--seed", type=int, default=None, help="Defaults to SEED.")
@click.pass_obj
def train_ae(s: Settings, manifest: Path, out_path: Path, steps: Optional[int], seed: Optional[int]):
    """Train the convolutional autoencoder; the last utterance is held out for the SNR report."""
    config = s.autoencoder_config
    waveforms = [dsp.read_wav(Path(r.audio_path)) for r in read_manifest(manifest)]
    inputs = waveforms if config.domain == "waveform" else [dsp.extract_mel(w, s.mel_config) for w in waveforms]
    train_set, held_out = (inputs[:-1], inputs[-1]) if len(inputs) > 1 else (inputs, inputs[0])

    model, history = train_autoencoder(
        train_set, config,
        steps=steps or s.AE_STEPS, seed=s.SEED if seed is None else seed, learning_rate=s.AE_LEARNING_RATE,
    )
    save_autoencoder(out_path, model, history)

    rebuilt = ae_decode(ae_encode(held_out, model), model)
    if config.domain == "waveform":
        snr = reconstruction_snr(held_out.samples, rebuilt.samples)
    else:
        snr = reconstruction_snr(held_out.data, rebuilt.data)
    click.echo(f"{out_path}\tfinal mse {history[-1]:.6f}\theld-out SNR {snr:.2f} dB")
