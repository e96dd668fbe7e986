"""Pydantic schemas for phoneme/style inventories and token sequences."""
from typing import Literal

from pydantic import BaseModel, Field, PrivateAttr, model_validator

Language = Literal["en", "zh"]
Scheme = Literal["alphabet", "ipa"]
LanguageTag = Literal["shared", "english-only", "chinese-only", "separator", "pad"]
StyleKind = Literal["none", "tone", "stress", "pad"]

PAD_SYMBOL = "_"
SEPARATOR = "|"


class PhonemeEntry(BaseModel):
    symbol: str
    id: int = Field(..., ge=0)
    language_tag: LanguageTag


class PhonemeInventory(BaseModel):
    scheme: Scheme
    entries: list[PhonemeEntry]

    _by_symbol: dict[str, int] = PrivateAttr(default_factory=dict)

    @model_validator(mode="after")
    def _check_bijection(self) -> "PhonemeInventory":
        if [e.id for e in self.entries] != list(range(len(self.entries))):
            raise ValueError("inventory ids must be contiguous from 0 in order")
        symbols = [e.symbol for e in self.entries]
        if len(set(symbols)) != len(symbols):
            raise ValueError("inventory symbols must be unique")
        if self.entries[0].language_tag != "pad":
            raise ValueError("the first inventory entry must be the pad symbol")
        self._by_symbol = {e.symbol: e.id for e in self.entries}
        return self

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, symbol: str) -> bool:
        return symbol in self._by_symbol

    def id_of(self, symbol: str) -> int:
        return self._by_symbol[symbol]

    def symbol_of(self, idx: int) -> str:
        return self.entries[idx].symbol

    @property
    def pad_id(self) -> int:
        return 0

    @property
    def separator_id(self) -> int:
        return self._by_symbol[SEPARATOR]

    @property
    def phoneme_entries(self) -> list[PhonemeEntry]:
        """Speakable entries, excluding pad and separator."""
        return [e for e in self.entries if e.language_tag not in ("pad", "separator")]


class StyleEntry(BaseModel):
    marker: str
    id: int = Field(..., ge=0)
    kind: StyleKind
    display_digit: int = Field(..., ge=0, le=5)


class StyleInventory(BaseModel):
    entries: list[StyleEntry]

    _by_marker: dict[str, int] = PrivateAttr(default_factory=dict)

    @model_validator(mode="after")
    def _check_markers(self) -> "StyleInventory":
        if [e.id for e in self.entries] != list(range(len(self.entries))):
            raise ValueError("style ids must be contiguous from 0 in order")
        kinds = [e.kind for e in self.entries]
        if kinds.count("tone") != 5 or kinds.count("stress") != 3:
            raise ValueError("expected exactly 5 tone and 3 stress markers")
        if kinds.count("none") != 1 or kinds.count("pad") != 1:
            raise ValueError("expected exactly one none marker and one pad marker")
        markers = [e.marker for e in self.entries]
        if len(set(markers)) != len(markers):
            raise ValueError("style markers must be unique")
        self._by_marker = {e.marker: e.id for e in self.entries}
        return self

    def __len__(self) -> int:
        return len(self.entries)

    def id_of(self, marker: str) -> int:
        return self._by_marker[marker]

    @property
    def pad_id(self) -> int:
        return self._by_marker["pad"]

    @property
    def none_id(self) -> int:
        return self._by_marker["none"]

    def tone_id(self, tone: int) -> int:
        return self._by_marker[f"tone{tone}"]

    def stress_id(self, stress: int) -> int:
        return self._by_marker[f"stress{stress}"]


class TokenSequence(BaseModel):
    phoneme_ids: list[int]
    style_ids: list[int]
    scheme: Scheme
    language: Language

    @model_validator(mode="after")
    def _check_rows(self) -> "TokenSequence":
        if len(self.phoneme_ids) != len(self.style_ids):
            raise ValueError(
                f"phoneme row has {len(self.phoneme_ids)} tokens but style row has {len(self.style_ids)}"
            )
        return self

    def __len__(self) -> int:
        return len(self.phoneme_ids)


class RenderedTokens(BaseModel):
    phonemes: list[str]
    styles: list[str]
    ids: dict[str, list[int]]
