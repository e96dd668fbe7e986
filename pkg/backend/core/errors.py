"""
Error hierarchy shared by every pipeline stage.
Each class carries the process exit code the CLI reports for it.
"""
from typing import Any


class TonemarkError(Exception):
    exit_code = 1

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self) -> dict[str, Any]:
        return {"error": type(self).__name__, "message": self.message, **self.details}


# ── Input errors (exit 2) ─────────────────────────────────────────────────────

class InputError(TonemarkError):
    exit_code = 2


class EmptyInput(InputError):
    def __init__(self, text: str = ""):
        super().__init__("input is empty after normalization", text=text)


class UnknownCharacter(InputError):
    def __init__(self, character: str, word: str):
        super().__init__(f"unsupported character {character!r} in {word!r}", character=character, word=word)


class OutOfVocabularyWord(InputError):
    def __init__(self, word: str):
        super().__init__(f"word {word!r} is not in the lexicon", word=word)


class MalformedPinyin(InputError):
    def __init__(self, syllable: str, reason: str = "unparsable syllable"):
        super().__init__(f"malformed pinyin {syllable!r}: {reason}", word=syllable)


class InputTooShort(InputError):
    def __init__(self, length: int, required: int):
        super().__init__(f"signal has {length} samples, at least {required} required", length=length, required=required)


class MissingFeature(InputError):
    def __init__(self, record_id: str, path: str = ""):
        super().__init__(f"no cached feature for utterance {record_id!r}", record_id=record_id, path=path)


class DurationMismatch(InputError):
    def __init__(self, record_id: str, reason: str):
        super().__init__(f"durations of {record_id!r} do not fit: {reason}", record_id=record_id)


class EmptyCorpus(InputError):
    def __init__(self, source: str = ""):
        super().__init__("corpus contains no utterances", source=source)


class InvalidManifest(InputError):
    def __init__(self, path: str, line: int, reason: str):
        super().__init__(f"{path}:{line}: {reason}", path=path, line=line)


# ── Model / configuration errors (exit 3) ─────────────────────────────────────

class ModelError(TonemarkError):
    exit_code = 3


class IdOutOfRange(ModelError):
    def __init__(self, value: int, size: int):
        super().__init__(f"token id {value} outside vocabulary of size {size}", value=value, size=size)


class OddEmbeddingDim(ModelError):
    def __init__(self, dim: int):
        super().__init__(f"positional encoding needs an even embedding dimension, got {dim}", dim=dim)


class ShapeMismatch(ModelError):
    def __init__(self, expected: Any, actual: Any):
        super().__init__(f"expected shape {tuple(expected)}, got {tuple(actual)}")


class LengthMismatch(ModelError):
    def __init__(self, reason: str):
        super().__init__(reason)


class EmptyOutput(ModelError):
    def __init__(self):
        super().__init__("all durations are zero; nothing to regulate")


class KindMismatch(ModelError):
    def __init__(self, expected: str, actual: str):
        super().__init__(f"expected a {expected} feature, got {actual}", expected=expected, actual=actual)


class NonPositiveGroundTruthDuration(ModelError):
    def __init__(self, count: int):
        super().__init__(f"{count} unmasked ground-truth durations are not positive", count=count)


class NaNLoss(ModelError):
    def __init__(self, step: int):
        super().__init__(f"loss became non-finite at step {step}", step=step)


class CheckpointError(ModelError):
    def __init__(self, path: str, reason: str):
        super().__init__(f"cannot use checkpoint {path}: {reason}", path=path)


class ConfigMismatch(ModelError):
    def __init__(self, reason: str):
        super().__init__(reason)


# ── Storage errors (exit 4) ───────────────────────────────────────────────────

class StorageError(TonemarkError):
    exit_code = 4

    def __init__(self, path: str, reason: str):
        super().__init__(f"{path}: {reason}", path=str(path))
