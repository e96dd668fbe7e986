"""Text normalization and English number expansion."""
import re
import unicodedata

from core.errors import UnknownCharacter

_APOSTROPHES = ("'", "’", "‘", "`")
_DIGITS = re.compile(r"[0-9]+")
_GROUPING = re.compile(r"(?<=\d),(?=\d{3}(?!\d))")

_ONES = [
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine",
    "ten", "eleven", "twelve", "thirteen", "fourteen", "fifteen", "sixteen",
    "seventeen", "eighteen", "nineteen",
]
_TENS = ["", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety"]

MAX_NUMBER = 999_999
_MAX_DIGITS = len(str(MAX_NUMBER))


def normalize_text(text: str) -> str:
    """Case-fold, drop apostrophes and digit-grouping commas, turn other punctuation into spaces.

    ``ü`` and the ``u:`` spelling are folded to ``v`` so pinyin survives punctuation stripping.
    """
    text = unicodedata.normalize("NFC", text).casefold()
    text = text.replace("ü", "v").replace("u:", "v")
    for mark in _APOSTROPHES:
        text = text.replace(mark, "")
    text = _GROUPING.sub("", text)    # 1,000 -> 1000
    text = "".join(ch if ch.isalnum() or ch.isspace() else " " for ch in text)
    return " ".join(text.split())


def _below_thousand(n: int) -> list[str]:
    words: list[str] = []
    hundreds, rest = divmod(n, 100)
    if hundreds:
        words += [_ONES[hundreds], "hundred"]
    if rest == 0:
        return words
    if rest < 20:
        words.append(_ONES[rest])
    else:
        tens, ones = divmod(rest, 10)
        words.append(_TENS[tens])
        if ones:
            words.append(_ONES[ones])
    return words


def expand_number(n: int) -> list[str]:
    """Spell an integer in 0–999,999 as English words (no "and")."""
    if n < 0 or n > MAX_NUMBER:
        raise UnknownCharacter(str(n), str(n))
    if n == 0:
        return ["zero"]
    thousands, rest = divmod(n, 1000)
    words: list[str] = []
    if thousands:
        words += _below_thousand(thousands) + ["thousand"]
    words += _below_thousand(rest)
    return words


def expand_numbers(words: list[str]) -> list[str]:
    """Replace all-digit words by their spelled-out form; other words pass through."""
    out: list[str] = []
    for word in words:
        if _DIGITS.fullmatch(word):
            digits = word.lstrip("0") or "0"
            # Checked before int(): very long runs would also trip the int parsing limit.
            if len(digits) > _MAX_DIGITS:
                raise UnknownCharacter(digits[_MAX_DIGITS], word)
            out.extend(expand_number(int(digits)))
        else:
            out.append(word)
    return out
