"""
Pronunciation data: the CMU pronouncing dictionary, IPA mapping tables,
hanzi→pinyin conversion and the phoneme/style inventories built on them.
"""
import csv
import logging
import re
from pathlib import Path
from typing import Optional

import cmudict
import pandas as pd
from pypinyin import Style, lazy_pinyin

from core.errors import ConfigMismatch, MalformedPinyin, OutOfVocabularyWord, StorageError
from core.pinyin import FINALS, INITIALS
from models.tokens import (
    PAD_SYMBOL,
    SEPARATOR,
    PhonemeEntry,
    PhonemeInventory,
    Scheme,
    StyleEntry,
    StyleInventory,
)

logger = logging.getLogger(__name__)

IPA_PHONEME_COUNT = 81
ALPHABET_SPEAKABLE_COUNT = 27    # a–z plus the separator

_VARIANT = re.compile(r"^(.+)\(\d+\)$")
_TONED = re.compile(r"^[a-z]+[1-5]$")


# ── File readers ──────────────────────────────────────────────────────────────

def read_cmudict(path: Optional[Path] = None) -> dict[str, tuple[str, ...]]:
    """
    English pronunciations keyed by lowercase word; the first variant wins.

    Without ``path`` the dictionary bundled with the ``cmudict`` package is
    used. A path names a CMU-format override file where ``;;;`` lines are
    comments.
    """
    if path is None:
        bundled = {word: tuple(prons[0]) for word, prons in cmudict.dict().items() if prons}
        # Normalized text drops apostrophes, so "don't" is also reachable as "dont".
        words = {word.replace("'", ""): phones for word, phones in reversed(bundled.items())}
        words.update(bundled)
        logger.debug("Loaded %d lexicon entries from the cmudict package", len(words))
        return words
    words: dict[str, tuple[str, ...]] = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise StorageError(str(path), exc.strerror or str(exc)) from exc
    for line in lines:
        if not line.strip() or line.startswith(";;;"):
            continue
        head, *phones = line.split()
        variant = _VARIANT.match(head)
        word = (variant.group(1) if variant else head).lower()
        if phones and word not in words:
            words[word] = tuple(phones)
    logger.debug("Loaded %d lexicon entries from %s", len(words), path)
    return words


def read_tsv_map(path: Path) -> dict[str, str]:
    try:
        frame = pd.read_csv(
            path, sep="\t", header=None, names=["key", "value"], dtype=str,
            quoting=csv.QUOTE_NONE, keep_default_na=False, comment="#", encoding="utf-8",
        )
    except (OSError, pd.errors.ParserError) as exc:
        raise StorageError(str(path), str(exc)) from exc
    return dict(zip(frame["key"].str.strip(), frame["value"].str.strip()))


def read_inventory_symbols(path: Path) -> list[str]:
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise StorageError(str(path), exc.strerror or str(exc)) from exc
    return [line.strip() for line in lines if line.strip()]


def split_arpabet(phone: str) -> tuple[str, Optional[int]]:
    """``UH1`` → (``UH``, 1); consonants carry no stress digit."""
    if phone[-1].isdigit():
        return phone[:-1], int(phone[-1])
    return phone, None


# ── Lexicon ───────────────────────────────────────────────────────────────────

class Lexicon:
    """Immutable pronunciation tables for both languages."""

    def __init__(
        self,
        words: dict[str, tuple[str, ...]],
        arpabet_to_ipa: dict[str, str],
        initial_to_ipa: dict[str, str],
        final_to_ipa: dict[str, str],
        hanzi_to_pinyin: Optional[dict[str, str]] = None,
    ):
        self._words = dict(words)
        self.arpabet_to_ipa = dict(arpabet_to_ipa)
        self.initial_to_ipa = dict(initial_to_ipa)
        self.final_to_ipa = dict(final_to_ipa)
        # None converts hanzi with pypinyin; a table restricts input to its characters.
        self.hanzi_to_pinyin = dict(hanzi_to_pinyin) if hanzi_to_pinyin is not None else None
        self._validate()

    @classmethod
    def from_files(
        cls,
        lexicon_path: Optional[Path],
        arpabet_path: Path,
        initial_path: Path,
        final_path: Path,
        hanzi_path: Optional[Path] = None,
    ) -> "Lexicon":
        return cls(
            read_cmudict(lexicon_path),
            read_tsv_map(arpabet_path),
            read_tsv_map(initial_path),
            read_tsv_map(final_path),
            read_tsv_map(hanzi_path) if hanzi_path else None,
        )

    def _validate(self) -> None:
        for word, phones in self._words.items():
            for phone in phones:
                base, _ = split_arpabet(phone)
                if base not in self.arpabet_to_ipa:
                    raise ConfigMismatch(f"lexicon word {word!r} uses {base!r}, which has no IPA mapping")
        missing = [i for i in INITIALS if i not in self.initial_to_ipa]
        missing += [f for f in sorted(FINALS) if f not in self.final_to_ipa]
        if missing:
            raise ConfigMismatch(f"pinyin units without IPA mapping: {', '.join(missing)}")

    def __contains__(self, word: str) -> bool:
        return word.lower() in self._words

    def __len__(self) -> int:
        return len(self._words)

    def pronounce(self, word: str) -> tuple[str, ...]:
        try:
            return self._words[word.lower()]
        except KeyError:
            raise OutOfVocabularyWord(word) from None

    def hanzi_syllables(self, hanzi: str) -> list[str]:
        """Toned pinyin for a run of hanzi, one syllable per character, neutral tone as 5."""
        if self.hanzi_to_pinyin is not None:
            missing = next((ch for ch in hanzi if ch not in self.hanzi_to_pinyin), None)
            if missing is not None:
                raise MalformedPinyin(missing, "character not in the hanzi lexicon")
            return [self.hanzi_to_pinyin[ch] for ch in hanzi]
        syllables = lazy_pinyin(hanzi, style=Style.TONE3, neutral_tone_with_five=True, errors=list)
        if len(syllables) != len(hanzi) or not all(_TONED.match(s) for s in syllables):
            raise MalformedPinyin(hanzi, "character has no pinyin reading")
        return syllables

    @property
    def english_symbols(self) -> set[str]:
        return set(self.arpabet_to_ipa.values())

    @property
    def chinese_symbols(self) -> set[str]:
        return set(self.initial_to_ipa.values()) | set(self.final_to_ipa.values())

    @property
    def pinyin_letters(self) -> set[str]:
        return {ch for unit in [*self.initial_to_ipa, *self.final_to_ipa] for ch in unit}


# ── Inventories ───────────────────────────────────────────────────────────────

def language_tag(symbol: str, english: set[str], chinese: set[str]) -> str:
    if symbol == PAD_SYMBOL:
        return "pad"
    if symbol == SEPARATOR:
        return "separator"
    in_en, in_zh = symbol in english, symbol in chinese
    if in_en and in_zh:
        return "shared"
    if in_en:
        return "english-only"
    if in_zh:
        return "chinese-only"
    raise ConfigMismatch(f"inventory symbol {symbol!r} is not producible from either language")


def build_phoneme_inventory(symbols: list[str], scheme: Scheme, lexicon: Lexicon) -> PhonemeInventory:
    """Tag inventory symbols by the languages whose mapping tables can produce them."""
    if not symbols or symbols[0] != PAD_SYMBOL or SEPARATOR not in symbols:
        raise ConfigMismatch(f"{scheme} inventory must start with {PAD_SYMBOL!r} and contain {SEPARATOR!r}")
    if scheme == "ipa":
        english, chinese = lexicon.english_symbols, lexicon.chinese_symbols
        speakable = len(symbols) - 2
        if speakable != IPA_PHONEME_COUNT:
            raise ConfigMismatch(f"ipa inventory lists {speakable} phonemes, expected {IPA_PHONEME_COUNT}")
        missing = (english | chinese) - set(symbols)
        if missing:
            raise ConfigMismatch(f"ipa inventory is missing {sorted(missing)}")
    else:
        english = {chr(c) for c in range(ord("a"), ord("z") + 1)}
        chinese = lexicon.pinyin_letters & english
        if len(symbols) - 1 != ALPHABET_SPEAKABLE_COUNT:
            raise ConfigMismatch(f"alphabet inventory must list {ALPHABET_SPEAKABLE_COUNT} speakable symbols")
    entries = [
        PhonemeEntry(symbol=s, id=i, language_tag=language_tag(s, english, chinese))
        for i, s in enumerate(symbols)
    ]
    return PhonemeInventory(scheme=scheme, entries=entries)


def build_style_inventory() -> StyleInventory:
    entries = [("pad", "pad", 0), ("none", "none", 0)]
    entries += [(f"tone{t}", "tone", t) for t in range(1, 6)]
    entries += [(f"stress{s}", "stress", s) for s in range(3)]
    return StyleInventory(entries=[
        StyleEntry(marker=m, id=i, kind=k, display_digit=d) for i, (m, k, d) in enumerate(entries)
    ])
