"""
Inference: text -> tokens -> acoustic model -> vocoder.

Mel features are vocoded with Griffin-Lim; latent features with the
autoencoder decoder embedded in the checkpoint.
"""
import logging
import time
from pathlib import Path
from typing import Literal, Optional

import numpy as np
import torch

from config import Settings, settings
from core import dsp
from core.acoustic_model import AcousticModel
from core.autoencoder import ConvAutoencoder, ae_decode, config_digest
from core.batching import token_durations
from core.checkpoint import load_checkpoint
from core.corpus import find_record, read_manifest
from core.errors import ConfigMismatch, DurationMismatch, EmptyOutput
from core.feature_store import check_latent_backend
from core.tokenizer import Tokenizer, get_tokenizer
from models.audio import AcousticFeature, MelConfig, Waveform
from models.bench import SynthesisReport
from models.tokens import Language, TokenSequence

logger = logging.getLogger(__name__)

PhaseInit = Literal["zero", "random"]


class Synthesizer:
    def __init__(
        self,
        model: AcousticModel,
        tokenizer: Tokenizer,
        mel_config: MelConfig,
        autoencoder: Optional[ConvAutoencoder] = None,
        *,
        griffin_lim_iters: int = 60,
        phase_init: PhaseInit = "zero",
        seed: int = 0,
    ):
        self.model = model.eval()
        self.tokenizer = tokenizer
        self.mel_config = mel_config
        self.autoencoder = autoencoder
        self.griffin_lim_iters = griffin_lim_iters
        self.phase_init = phase_init
        self.seed = seed
        if self.feature_kind == "latent":
            check_latent_backend(autoencoder, mel_config)
        expected = mel_config.n_mels if self.feature_kind == "mel" else autoencoder.config.latent_dim
        if model.config.n_out != expected:
            raise ConfigMismatch(f"model emits {model.config.n_out} channels, {self.feature_kind} backend needs {expected}")

    @classmethod
    def from_checkpoint(cls, path: Path, *, s: Settings = settings, tokenizer: Optional[Tokenizer] = None,
                        phase_init: PhaseInit = "zero", seed: int = 0) -> "Synthesizer":
        checkpoint = load_checkpoint(path)
        tokenizer = tokenizer or get_tokenizer(s)
        if checkpoint.model_config.n_phonemes != len(tokenizer.inventory(checkpoint.model_config.scheme)):
            raise ConfigMismatch("checkpoint vocabulary does not match the configured inventory")
        return cls(
            checkpoint.build_model(), tokenizer, checkpoint.mel_config, checkpoint.autoencoder,
            griffin_lim_iters=s.GRIFFIN_LIM_ITERS, phase_init=phase_init, seed=seed,
        )

    @property
    def feature_kind(self) -> str:
        return self.model.config.feature_kind

    @property
    def scheme(self) -> str:
        return self.model.config.scheme

    def tokenize(self, text: str, language: Language) -> TokenSequence:
        return self.tokenizer.tokenize(text, language, self.scheme)

    def ground_truth(self, text: str, language: Language, manifest: Path) -> tuple[TokenSequence, list[int]]:
        """Tokens and manifest durations of the record whose text matches."""
        record = find_record(read_manifest(manifest), text, language)
        if record is None:
            raise DurationMismatch(text, f"no {language} record with this text in {manifest}")
        return token_durations(self.tokenizer, record, self.scheme)

    def acoustic(self, seq: TokenSequence, durations: Optional[list[int]] = None) -> AcousticFeature:
        """N x T feature; durations are predicted when not given."""
        phonemes = torch.tensor([seq.phoneme_ids], dtype=torch.long)
        styles = torch.tensor([seq.style_ids], dtype=torch.long)
        frames = torch.tensor([durations], dtype=torch.long) if durations is not None else None
        with torch.no_grad():
            output = self.model(phonemes, styles, durations=frames)
        n = int(output.frame_mask[0].sum())
        if n == 0:
            raise EmptyOutput()
        data = output.features[0, :n].T.contiguous().numpy().astype(np.float32)
        config_hash = self.mel_config.config_hash()
        if self.feature_kind == "latent":
            config_hash = f"{config_hash}-{config_digest(self.autoencoder.config)}"
        return AcousticFeature(
            data=data, kind=self.feature_kind, frame_rate=self.mel_config.frame_rate,
            sample_rate=self.mel_config.sample_rate, config_hash=config_hash,
        )

    def vocode(self, feature: AcousticFeature) -> Waveform:
        if feature.kind == "mel":
            return dsp.griffin_lim(feature, self.mel_config, self.griffin_lim_iters,
                                   init=self.phase_init, seed=self.seed)
        w = ae_decode(feature, self.autoencoder)
        cfg = self.mel_config
        # Same layout as Griffin-Lim output: frame t covers the t-th hop cell after the offset.
        samples = np.pad(w.samples, (cfg.frame_offset, cfg.n_fft - cfg.hop_length - cfg.frame_offset))
        return Waveform(samples=samples.astype(np.float32), sample_rate=cfg.sample_rate)

    def synthesize(self, seq: TokenSequence, durations: Optional[list[int]] = None) -> tuple[Waveform, SynthesisReport]:
        start = time.perf_counter()
        feature = self.acoustic(seq, durations)
        mid = time.perf_counter()
        waveform = self.vocode(feature)
        end = time.perf_counter()
        report = SynthesisReport(
            n_frames=feature.n_frames,
            audio_seconds=feature.n_frames * self.mel_config.hop_length / self.mel_config.sample_rate,
            synthesis_ms=(end - start) * 1e3,
            acoustic_ms=(mid - start) * 1e3,
            vocoder_ms=(end - mid) * 1e3,
        )
        logger.debug("Synthesized %d frames in %.1f ms", report.n_frames, report.synthesis_ms)
        return waveform, report


def synthesize_to_file(
    synthesizer: Synthesizer,
    text: str,
    language: Language,
    out_path: Path,
    *,
    durations: Literal["gt", "predicted"] = "predicted",
    manifest: Optional[Path] = None,
) -> SynthesisReport:
    if durations == "gt":
        if manifest is None:
            raise DurationMismatch(text, "ground-truth durations need --manifest")
        seq, frames = synthesizer.ground_truth(text, language, manifest)
    else:
        seq, frames = synthesizer.tokenize(text, language), None
    waveform, report = synthesizer.synthesize(seq, frames)
    path = dsp.write_wav(out_path, waveform)
    logger.info("Wrote %.2f s of audio to %s", waveform.duration_seconds, path)
    return report.model_copy(update={"wav_path": str(path)})
