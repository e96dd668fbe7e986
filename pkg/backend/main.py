"""
Tonemark — multilingual style-adaptive text-to-speech
Command-line entry point.
"""
import json
import logging
from pathlib import Path
from typing import Optional

import click

from commands import bench, export_embeddings, extract_features, gen_toy, synth, tokenize, train, train_ae
from config import load_settings, settings
from core.errors import StorageError, TonemarkError

# ── Logging ──────────────────────────────────────────────────────────────────
logging.basicConfig(
    level=getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO),
    format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
    datefmt="%Y-%m-%dT%H:%M:%S",
)
logger = logging.getLogger("tonemark")


class TonemarkGroup(click.Group):
    """Reports pipeline errors as one JSON line on stderr and exits with the error's code."""

    def invoke(self, ctx: click.Context):
        try:
            return super().invoke(ctx)
        except TonemarkError as exc:
            self._fail(exc)
        except OSError as exc:
            self._fail(StorageError(getattr(exc, "filename", None) or "<io>", exc.strerror or str(exc)))

    @staticmethod
    def _fail(exc: TonemarkError):
        logger.debug("Command failed", exc_info=exc)
        click.echo(json.dumps(exc.to_dict(), ensure_ascii=False, default=str), err=True)
        raise SystemExit(exc.exit_code)


# ── App ───────────────────────────────────────────────────────────────────────
@click.group(cls=TonemarkGroup)
@click.option("--config", "config_path", type=click.Path(dir_okay=False, path_type=Path),
              help="KEY=value settings file (overridden by environment variables and flags).")
@click.pass_context
def cli(ctx: click.Context, config_path: Optional[Path]):
    """Tokenize, train, synthesize and benchmark."""
    if config_path is not None and not config_path.is_file():
        raise StorageError(str(config_path), "config file not found")
    ctx.obj = load_settings(config_path)
    logging.getLogger().setLevel(getattr(logging, ctx.obj.LOG_LEVEL.upper(), logging.INFO))


# ── Commands ──────────────────────────────────────────────────────────────────
cli.add_command(tokenize)
cli.add_command(gen_toy)
cli.add_command(extract_features)
cli.add_command(train_ae)
cli.add_command(train)
cli.add_command(synth)
cli.add_command(export_embeddings)
cli.add_command(bench)


if __name__ == "__main__":
    cli()
