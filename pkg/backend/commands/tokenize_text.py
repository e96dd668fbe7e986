"""tokenize — print the phoneme and style rows of a text."""
import json

import click

from config import Settings
from core.tokenizer import get_tokenizer


@click.command("tokenize")
@click.option("--lang", "language", type=click.Choice(["en", "zh"]), required=True)
@click.option("--scheme", type=click.Choice(["alphabet", "ipa"]), default="ipa", show_default=True)
@click.option("--json", "as_json", is_flag=True, help="Emit {phonemes, styles, ids} as JSON.")
@click.argument("text")
@click.pass_obj
def tokenize(s: Settings, language: str, scheme: str, as_json: bool, text: str):
    """Tokenize TEXT into parallel phoneme and style rows."""
    tokenizer = get_tokenizer(s)
    seq = tokenizer.tokenize(text, language, scheme)
    if as_json:
        click.echo(json.dumps(tokenizer.rendered(seq).model_dump(), ensure_ascii=False))
        return
    phonemes, styles = tokenizer.render_tokens(seq)
    click.echo(phonemes)
    click.echo(styles)
