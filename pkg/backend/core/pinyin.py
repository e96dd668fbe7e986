"""Toned-pinyin syllable parsing into initial, final and tone."""
import re
from typing import NamedTuple, Optional

from core.errors import MalformedPinyin

# Longest first so "zh" wins over "z".
INITIALS = (
    "zh", "ch", "sh",
    "b", "p", "m", "f", "d", "t", "n", "l", "g", "k", "h",
    "j", "q", "x", "r", "z", "c", "s", "y", "w",
)

FINALS = frozenset({
    "a", "ai", "an", "ang", "ao", "e", "ei", "en", "eng", "er",
    "i", "ia", "ian", "iang", "iao", "ie", "in", "ing", "iong", "iu",
    "o", "ong", "ou", "u", "ua", "uai", "uan", "uang", "ui", "un", "uo",
    "v", "ve", "ue", "van", "vn",
    "ii",     # apical vowel after z/c/s
    "iii",    # retroflex vowel after zh/ch/sh/r
})

NEUTRAL_TONE = 5

_SYLLABLE = re.compile(r"([a-z]+)([1-5])?")
_PALATALS = ("j", "q", "x", "y")


class PinyinSyllable(NamedTuple):
    initial: Optional[str]
    final: str
    tone: int


def split_tone(syllable: str) -> tuple[str, int]:
    match = _SYLLABLE.fullmatch(syllable)
    if not match:
        raise MalformedPinyin(syllable)
    return match.group(1), int(match.group(2) or NEUTRAL_TONE)


def parse_syllable(syllable: str) -> PinyinSyllable:
    body, tone = split_tone(syllable)
    initial = next((i for i in INITIALS if body.startswith(i)), None)
    rest = body[len(initial):] if initial else body
    if not rest:
        raise MalformedPinyin(syllable, "missing final")

    if initial in _PALATALS and rest.startswith("u"):
        rest = "v" + rest[1:]
    if initial == "y" and rest == "e":
        rest = "ie"
    if rest == "i" and initial in ("z", "c", "s"):
        rest = "ii"
    elif rest == "i" and initial in ("zh", "ch", "sh", "r"):
        rest = "iii"

    if rest not in FINALS:
        raise MalformedPinyin(syllable, f"unknown final {rest!r}")
    if initial in ("j", "q", "x") and rest[0] not in ("i", "v"):
        raise MalformedPinyin(syllable, f"{initial!r} cannot precede {rest!r}")
    return PinyinSyllable(initial, rest, tone)
