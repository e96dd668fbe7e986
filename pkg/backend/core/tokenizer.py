"""
Language-aware tokenization of English text and Mandarin pinyin into
aligned phoneme and style rows, under the alphabet or IPA+style scheme.
"""
import logging
import re
from functools import lru_cache
from typing import Optional

from config import Settings, settings
from core.errors import EmptyInput, MalformedPinyin, UnknownCharacter
from core.lexicon import (
    Lexicon,
    build_phoneme_inventory,
    build_style_inventory,
    read_inventory_symbols,
    split_arpabet,
)
from core.pinyin import parse_syllable
from core.text_normalizer import expand_numbers, normalize_text
from models.tokens import (
    SEPARATOR,
    Language,
    PhonemeInventory,
    RenderedTokens,
    Scheme,
    StyleInventory,
    TokenSequence,
)

logger = logging.getLogger(__name__)

_LETTERS = re.compile(r"[a-z]+")
_TONE_SUFFIX = re.compile(r"[1-5]$")


def _is_hanzi(ch: str) -> bool:
    return "一" <= ch <= "鿿" or "㐀" <= ch <= "䶿"


class Tokenizer:
    """Immutable after construction; every method is a pure function of its arguments."""

    def __init__(
        self,
        lexicon: Lexicon,
        ipa_inventory: PhonemeInventory,
        alphabet_inventory: PhonemeInventory,
        style_inventory: Optional[StyleInventory] = None,
    ):
        self.lexicon = lexicon
        self.ipa_inventory = ipa_inventory
        self.alphabet_inventory = alphabet_inventory
        self.styles = style_inventory or build_style_inventory()

    @classmethod
    def from_settings(cls, s: Settings = settings) -> "Tokenizer":
        lexicon = Lexicon.from_files(
            s.data_path(s.LEXICON_FILE),
            s.data_path(s.ARPABET_MAP_FILE),
            s.data_path(s.PINYIN_INITIAL_MAP_FILE),
            s.data_path(s.PINYIN_FINAL_MAP_FILE),
            s.data_path(s.HANZI_LEXICON_FILE),
        )
        ipa = build_phoneme_inventory(read_inventory_symbols(s.data_path(s.IPA_INVENTORY_FILE)), "ipa", lexicon)
        alphabet = build_phoneme_inventory(
            read_inventory_symbols(s.data_path(s.ALPHABET_INVENTORY_FILE)), "alphabet", lexicon
        )
        logger.debug("Tokenizer ready: %d words, %d ipa symbols", len(lexicon), len(ipa))
        return cls(lexicon, ipa, alphabet)

    def inventory(self, scheme: Scheme) -> PhonemeInventory:
        return self.ipa_inventory if scheme == "ipa" else self.alphabet_inventory

    # ── Word splitting ───────────────────────────────────────────────────────

    def words(self, text: str, language: Language) -> list[str]:
        """Normalized words; numbers spelled out for English, hanzi converted for Mandarin."""
        normalized = normalize_text(text)
        if not normalized:
            raise EmptyInput(text)
        words = normalized.split()
        if language == "en":
            return expand_numbers(words)
        return [syllable for word in words for syllable in self._hanzi_to_syllables(word)]

    def _hanzi_to_syllables(self, word: str) -> list[str]:
        if not any(_is_hanzi(ch) for ch in word):
            return [word]
        if not all(_is_hanzi(ch) for ch in word):
            raise MalformedPinyin(word, "hanzi mixed with other characters")
        return self.lexicon.hanzi_syllables(word)

    # ── Schemes ──────────────────────────────────────────────────────────────

    def tokenize(self, text: str, language: Language, scheme: Scheme) -> TokenSequence:
        if scheme == "ipa":
            return self.tokenize_ipa(text, language)
        return self.tokenize_alphabet(text, language)

    def tokenize_alphabet(self, text: str, language: Language) -> TokenSequence:
        inv = self.alphabet_inventory
        phonemes = [inv.separator_id]
        for word in self.words(text, language):
            letters = _TONE_SUFFIX.sub("", word) if language == "zh" else word
            bad = next((ch for ch in letters if ch not in inv or ch == SEPARATOR), None)
            if bad is not None or not letters:
                raise UnknownCharacter(bad or word, word)
            phonemes += [inv.id_of(ch) for ch in letters]
            phonemes.append(inv.separator_id)
        styles = [self.styles.none_id] * len(phonemes)
        return TokenSequence(phoneme_ids=phonemes, style_ids=styles, scheme="alphabet", language=language)

    def tokenize_ipa(self, text: str, language: Language) -> TokenSequence:
        inv, none = self.ipa_inventory, self.styles.none_id
        phonemes, styles = [inv.separator_id], [none]
        for word in self.words(text, language):
            units = self._english_units(word) if language == "en" else self._pinyin_units(word)
            for symbol, style in units:
                phonemes.append(inv.id_of(symbol))
                styles.append(style)
            phonemes.append(inv.separator_id)
            styles.append(none)
        return TokenSequence(phoneme_ids=phonemes, style_ids=styles, scheme="ipa", language=language)

    def _english_units(self, word: str) -> list[tuple[str, int]]:
        units = []
        for phone in self.lexicon.pronounce(word):
            base, stress = split_arpabet(phone)
            style = self.styles.none_id if stress is None else self.styles.stress_id(stress)
            units.append((self.lexicon.arpabet_to_ipa[base], style))
        return units

    def _pinyin_units(self, syllable: str) -> list[tuple[str, int]]:
        parsed = parse_syllable(syllable)
        units = []
        if parsed.initial:
            units.append((self.lexicon.initial_to_ipa[parsed.initial], self.styles.none_id))
        units.append((self.lexicon.final_to_ipa[parsed.final], self.styles.tone_id(parsed.tone)))
        return units

    # ── Rendering ────────────────────────────────────────────────────────────

    def render_tokens(self, seq: TokenSequence) -> tuple[str, str]:
        """Space-separated phoneme symbols and style digits; none and stress0 both print 0."""
        inv = self.inventory(seq.scheme)
        phoneme_row = " ".join(inv.symbol_of(i) for i in seq.phoneme_ids)
        style_row = " ".join(str(self.styles.entries[i].display_digit) for i in seq.style_ids)
        return phoneme_row, style_row

    def rendered(self, seq: TokenSequence) -> RenderedTokens:
        phonemes, styles = self.render_tokens(seq)
        return RenderedTokens(
            phonemes=phonemes.split(" "),
            styles=styles.split(" "),
            ids={"phonemes": list(seq.phoneme_ids), "styles": list(seq.style_ids)},
        )

    def word_spans(self, seq: TokenSequence) -> list[tuple[int, int]]:
        """Half-open token ranges of each word, separators excluded."""
        sep = self.inventory(seq.scheme).separator_id
        spans, start = [], None
        for i, pid in enumerate(seq.phoneme_ids):
            if pid == sep:
                if start is not None:
                    spans.append((start, i))
                start = i + 1
        return spans


@lru_cache(maxsize=4)
def _cached_tokenizer(settings_json: str) -> Tokenizer:
    return Tokenizer.from_settings(Settings.model_validate_json(settings_json))


def get_tokenizer(s: Settings = settings) -> Tokenizer:
    return _cached_tokenizer(s.model_dump_json())
