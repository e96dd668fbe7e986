"""JSON Lines manifest reading and writing."""
import logging
from pathlib import Path

from pydantic import ValidationError

from core.errors import EmptyCorpus, InvalidManifest, StorageError
from models.corpus import UtteranceRecord

logger = logging.getLogger(__name__)


def read_manifest(path: Path, *, resolve_audio: bool = True) -> list[UtteranceRecord]:
    """One UtteranceRecord per line; relative audio paths resolve against the manifest directory."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise StorageError(str(path), exc.strerror or str(exc)) from exc

    records: list[UtteranceRecord] = []
    for number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = UtteranceRecord.model_validate_json(line)
        except ValidationError as exc:
            raise InvalidManifest(str(path), number, exc.errors()[0]["msg"]) from exc
        if resolve_audio and not Path(record.audio_path).is_absolute():
            record = record.model_copy(update={"audio_path": str(path.parent / record.audio_path)})
        records.append(record)
    if not records:
        raise EmptyCorpus(str(path))
    logger.info("Read %d utterances from %s", len(records), path)
    return records


def write_manifest(path: Path, records: list[UtteranceRecord]) -> Path:
    path = Path(path)
    body = "".join(r.model_dump_json(exclude_none=True) + "\n" for r in records)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(body, encoding="utf-8")
    except OSError as exc:
        raise StorageError(str(path), exc.strerror or str(exc)) from exc
    return path


def find_record(records: list[UtteranceRecord], text: str, language: str) -> UtteranceRecord | None:
    wanted = " ".join(text.split())
    return next((r for r in records if r.language == language and " ".join(r.text.split()) == wanted), None)
