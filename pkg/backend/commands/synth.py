"""synth — text to WAV through a trained checkpoint."""
from pathlib import Path
from typing import Optional

import click

from config import Settings
from core.synthesis import Synthesizer, synthesize_to_file


@click.command("synth")
@click.option("--ckpt", type=click.Path(dir_okay=False, path_type=Path), required=True)
@click.option("--lang", "language", type=click.Choice(["en", "zh"]), required=True)
@click.option("--text", required=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False, path_type=Path), required=True)
@click.option("--durations", type=click.Choice(["gt", "predicted"]), default="predicted", show_default=True)
@click.option("--manifest", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None,
              help="Source of ground-truth durations.")
@click.option("--phase-init", type=click.Choice(["zero", "random"]), default="zero", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True, help="Random phase seed.")
@click.pass_obj
def synth(s: Settings, ckpt: Path, language: str, text: str, out_path: Path, durations: str,
          manifest: Optional[Path], phase_init: str, seed: int):
    """Synthesize TEXT and write a PCM16 WAV; prints frames, audio seconds and wall-clock ms."""
    synthesizer = Synthesizer.from_checkpoint(ckpt, s=s, phase_init=phase_init, seed=seed)
    report = synthesize_to_file(synthesizer, text, language, out_path, durations=durations, manifest=manifest)
    click.echo(f"T={report.n_frames}\taudio_s={report.audio_seconds:.3f}\tsynthesis_ms={report.synthesis_ms:.1f}")
