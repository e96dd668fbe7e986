"""bench — inference latency and parameter sizes per stage."""
from pathlib import Path

import click

from config import Settings
from core.bench import run_bench
from core.synthesis import Synthesizer


@click.command("bench")
@click.option("--ckpt", type=click.Path(dir_okay=False, path_type=Path), required=True)
@click.option("--seconds", type=click.FloatRange(min=0.0, min_open=True), default=8.0, show_default=True)
@click.option("--repeat", type=click.IntRange(min=1), default=5, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.pass_obj
def bench(s: Settings, ckpt: Path, seconds: float, repeat: int, seed: int):
    """Median wall-clock ms of the acoustic model and vocoder over REPEAT runs."""
    report = run_bench(Synthesizer.from_checkpoint(ckpt, s=s), seconds, repeat, seed)
    click.echo(report.render())
