"""gen-toy — write the synthetic sine-tone corpus."""
from pathlib import Path

import click

from config import Settings
from core.toy_corpus import generate_toy_corpus


@click.command("gen-toy")
@click.option("--n", "n_utterances", type=click.IntRange(min=1), default=8, show_default=True)
@click.option("--seed", type=int, default=None, help="Defaults to SEED.")
@click.option("--out", "out_dir", type=click.Path(file_okay=False, path_type=Path), required=True)
@click.pass_obj
def gen_toy(s: Settings, n_utterances: int, seed: int | None, out_dir: Path):
    """Render N toy utterances with exact durations into OUT."""
    manifest, records = generate_toy_corpus(n_utterances, s.SEED if seed is None else seed, out_dir, s=s)
    click.echo(f"{manifest}\t{len(records)} utterances")
