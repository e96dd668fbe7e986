"""
Deterministic toy corpus: every IPA phoneme is a sine at a fixed pitch, tones
bend the pitch of finals, stress scales vowel amplitude. Durations are known
exactly, so the corpus doubles as a verification oracle.
"""
import logging
from pathlib import Path
from typing import Optional

import numpy as np

from config import Settings, settings
from core import dsp
from core.corpus import write_manifest
from core.tokenizer import Tokenizer, get_tokenizer
from models.audio import MelConfig, Waveform
from models.corpus import UtteranceRecord
from models.tokens import TokenSequence

logger = logging.getLogger(__name__)

BASE_FREQUENCY = 220.0
STEPS_PER_OCTAVE = 24
PHONEME_FRAMES = 8
SEPARATOR_FRAMES = 4
BASE_AMPLITUDE = 0.5
FADE_SAMPLES = 16

STRESS_GAIN = {0: 0.6, 1: 1.0, 2: 1.3}
TONE_SPAN = 4.0    # semitones

EN_VOCABULARY = (
    "good", "day", "cat", "dog", "sun", "moon", "red", "blue", "green", "hello",
    "world", "speech", "voice", "ship", "yes", "book", "now", "time", "nice", "sing",
)
ZH_SYLLABLES = (
    "ni", "hao", "ma", "shu", "lai", "qu", "xue", "zhong", "guo", "ren",
    "da", "xiao", "tian", "shui", "wo", "shi", "bu", "yu", "mai", "tang",
)


def tone_semitones(tone: int, u: float | np.ndarray) -> float | np.ndarray:
    """Pitch offset at relative position ``u`` ∈ [0, 1] through a tone-bearing final."""
    u = np.asarray(u, dtype=np.float64)
    if tone == 2:
        return TONE_SPAN * u
    if tone == 3:
        return -TONE_SPAN * (1.0 - np.abs(2.0 * u - 1.0))
    if tone == 4:
        return -TONE_SPAN * u
    if tone == 5:
        return np.full_like(u, -TONE_SPAN / 2)
    return np.zeros_like(u)


class ToneRenderer:
    """Maps tokens to pitch/amplitude and renders token sequences to audio."""

    def __init__(self, tokenizer: Tokenizer, mel_config: MelConfig):
        self.tokenizer = tokenizer
        self.cfg = mel_config
        self.phoneme_ids = [e.id for e in tokenizer.ipa_inventory.phoneme_entries]
        self._rank = {pid: rank for rank, pid in enumerate(self.phoneme_ids)}

    def frequency(self, phoneme_id: int) -> float:
        return BASE_FREQUENCY * 2.0 ** (self._rank[phoneme_id] / STEPS_PER_OCTAVE)

    def is_speakable(self, phoneme_id: int) -> bool:
        return phoneme_id in self._rank

    def contour(self, style_id: int, u: np.ndarray) -> np.ndarray:
        entry = self.tokenizer.styles.entries[style_id]
        if entry.kind == "tone":
            return np.asarray(tone_semitones(entry.display_digit, u))
        return np.zeros_like(np.asarray(u, dtype=np.float64))

    def gain(self, style_id: int) -> float:
        entry = self.tokenizer.styles.entries[style_id]
        return STRESS_GAIN[entry.display_digit] if entry.kind == "stress" else 1.0

    def default_durations(self, seq: TokenSequence) -> list[int]:
        return [PHONEME_FRAMES if self.is_speakable(p) else SEPARATOR_FRAMES for p in seq.phoneme_ids]

    def render(self, seq: TokenSequence, durations: list[int]) -> Waveform:
        """Audio whose mel analysis has exactly ``sum(durations)`` frames."""
        hop = self.cfg.hop_length
        pieces = [np.zeros(self.cfg.frame_offset)]
        for pid, sid, frames in zip(seq.phoneme_ids, seq.style_ids, durations):
            n = frames * hop
            if not self.is_speakable(pid) or n == 0:
                pieces.append(np.zeros(n))
                continue
            u = (np.arange(n) + 0.5) / n
            freq = self.frequency(pid) * 2.0 ** (self.contour(sid, u) / 12.0)
            phase = 2.0 * np.pi * np.cumsum(freq) / self.cfg.sample_rate
            segment = BASE_AMPLITUDE * self.gain(sid) * np.sin(phase)
            fade = min(FADE_SAMPLES, n // 2)
            if fade:
                ramp = np.linspace(0.0, 1.0, fade)
                segment[:fade] *= ramp
                segment[-fade:] *= ramp[::-1]
            pieces.append(segment)
        pieces.append(np.zeros(self.cfg.n_fft - hop - self.cfg.frame_offset))
        return Waveform(samples=np.concatenate(pieces).astype(np.float32), sample_rate=self.cfg.sample_rate)


def swap_rising_falling(text: str) -> str:
    """Exchange tones 2 and 4 on every syllable."""
    swap = {"2": "4", "4": "2"}
    return " ".join(s[:-1] + swap.get(s[-1], s[-1]) if s[-1].isdigit() else s for s in text.split())


def _zh_text(rng: np.random.Generator) -> str:
    n = int(rng.integers(2, 4))
    syllables = [str(ZH_SYLLABLES[int(rng.integers(len(ZH_SYLLABLES)))]) for _ in range(n)]
    tones = [int(rng.integers(1, 6)) for _ in range(n)]
    if not any(t in (2, 4) for t in tones):
        tones[int(rng.integers(n))] = int(rng.choice([2, 4]))
    return " ".join(f"{s}{t}" for s, t in zip(syllables, tones))


def _en_text(rng: np.random.Generator) -> str:
    n = int(rng.integers(1, 4))
    return " ".join(str(EN_VOCABULARY[int(rng.integers(len(EN_VOCABULARY)))]) for _ in range(n))


def sample_texts(n: int, seed: int) -> list[tuple[str, str]]:
    """(language, text) pairs: Mandarin pairs are tone-2/4 minimal pairs, English pairs are independent."""
    rng = np.random.default_rng(seed)
    texts: list[tuple[str, str]] = []
    pair = 0
    while len(texts) < n:
        if pair % 2 == 0:
            text = _zh_text(rng)
            texts += [("zh", text), ("zh", swap_rising_falling(text))]
        else:
            texts += [("en", _en_text(rng)), ("en", _en_text(rng))]
        pair += 1
    return texts[:n]


def generate_toy_corpus(
    n_utterances: int,
    seed: int,
    out_dir: Path,
    *,
    s: Settings = settings,
    tokenizer: Optional[Tokenizer] = None,
) -> tuple[Path, list[UtteranceRecord]]:
    if n_utterances < 1:
        raise ValueError("n_utterances must be >= 1")
    tokenizer = tokenizer or get_tokenizer(s)
    renderer = ToneRenderer(tokenizer, s.mel_config)
    out_dir = Path(out_dir)
    records = []
    for i, (language, text) in enumerate(sample_texts(n_utterances, seed)):
        seq = tokenizer.tokenize_ipa(text, language)
        durations = renderer.default_durations(seq)
        waveform = renderer.render(seq, durations)
        utt_id = f"toy{i:04d}"
        dsp.write_wav(out_dir / "wavs" / f"{utt_id}.wav", waveform)
        assert dsp.num_frames(waveform.samples.size, s.mel_config) == sum(durations)
        records.append(UtteranceRecord(
            id=utt_id, language=language, text=text, audio_path=f"wavs/{utt_id}.wav", durations=durations,
        ))
    manifest = write_manifest(out_dir / "manifest.jsonl", records)
    logger.info("Generated %d toy utterances in %s", len(records), out_dir)
    return manifest, records
