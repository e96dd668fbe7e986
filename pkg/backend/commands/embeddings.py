"""export-embeddings — dump the phoneme embedding table."""
from pathlib import Path

import click

from config import Settings
from core.checkpoint import load_checkpoint
from core.embedding_export import export_embeddings as write_embeddings
from core.tokenizer import get_tokenizer


@click.command("export-embeddings")
@click.option("--ckpt", type=click.Path(dir_okay=False, path_type=Path), required=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False, path_type=Path), required=True)
@click.pass_obj
def export_embeddings(s: Settings, ckpt: Path, out_path: Path):
    """CSV with one row per phoneme: symbol, language_tag, e_0..e_{M-1}."""
    checkpoint = load_checkpoint(ckpt)
    inventory = get_tokenizer(s).inventory(checkpoint.model_config.scheme)
    write_embeddings(checkpoint.build_model(), inventory, out_path)
    click.echo(f"{out_path}\t{len(inventory)} rows")
