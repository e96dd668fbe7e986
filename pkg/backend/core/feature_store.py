"""
Per-utterance acoustic feature cache.

Files are named ``<id>.<kind>.<config hash>.lstf`` so mel and latent
features (and different extraction configs) never collide.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional

from core import dsp
from core.autoencoder import ConvAutoencoder, ae_encode, config_digest
from core.errors import ConfigMismatch, MissingFeature
from models.audio import AcousticFeature, FeatureKind, MelConfig
from models.corpus import UtteranceRecord

logger = logging.getLogger(__name__)


def compute_feature(
    record: UtteranceRecord,
    kind: FeatureKind,
    mel_config: MelConfig,
    autoencoder: Optional[ConvAutoencoder] = None,
) -> AcousticFeature:
    """Mel features from the whole file; latent features from its frame-aligned span."""
    waveform = dsp.read_wav(Path(record.audio_path))
    if waveform.sample_rate != mel_config.sample_rate:
        raise ConfigMismatch(
            f"{record.audio_path} is sampled at {waveform.sample_rate} Hz, config expects {mel_config.sample_rate}"
        )
    if kind == "mel":
        return dsp.extract_mel(waveform, mel_config)
    check_latent_backend(autoencoder, mel_config)
    span = dsp.frame_aligned_span(waveform.samples, mel_config)
    latent = ae_encode(waveform.model_copy(update={"samples": span}), autoencoder)
    return latent.model_copy(update={"source_length": None})


def check_latent_backend(autoencoder: Optional[ConvAutoencoder], mel_config: MelConfig) -> None:
    """Latent frames must coincide with duration frames: waveform domain, R == hop."""
    if autoencoder is None:
        raise ConfigMismatch("latent features need an autoencoder checkpoint")
    if autoencoder.config.domain != "waveform" or autoencoder.ratio != mel_config.hop_length:
        raise ConfigMismatch(
            f"latent backend needs a waveform autoencoder with R == hop ({mel_config.hop_length}), "
            f"got {autoencoder.config.domain} with R={autoencoder.ratio}"
        )


class FeatureStore:
    def __init__(
        self,
        root: Path,
        kind: FeatureKind,
        mel_config: MelConfig,
        autoencoder: Optional[ConvAutoencoder] = None,
    ):
        self.root = Path(root)
        self.kind = kind
        self.mel_config = mel_config
        self.autoencoder = autoencoder
        if kind == "latent":
            check_latent_backend(autoencoder, mel_config)
        self.config_hash = (
            mel_config.config_hash() if kind == "mel"
            else f"{mel_config.config_hash()}-{config_digest(autoencoder.config)}"
        )

    @property
    def n_bins(self) -> int:
        return self.mel_config.n_mels if self.kind == "mel" else self.autoencoder.config.latent_dim

    def path_for(self, record_id: str) -> Path:
        return self.root / f"{record_id}.{self.kind}.{self.config_hash}.lstf"

    def has(self, record: UtteranceRecord) -> bool:
        return self.path_for(record.id).exists()

    def get(self, record: UtteranceRecord) -> AcousticFeature:
        path = self.path_for(record.id)
        if not path.exists():
            raise MissingFeature(record.id, str(path))
        return dsp.read_feature(
            path, frame_rate=self.mel_config.frame_rate,
            sample_rate=self.mel_config.sample_rate, config_hash=self.config_hash,
        )

    def extract(self, record: UtteranceRecord) -> Path:
        feature = compute_feature(record, self.kind, self.mel_config, self.autoencoder)
        path = dsp.write_feature(self.path_for(record.id), feature)
        logger.debug("Cached %s feature %dx%d for %s", self.kind, feature.n_bins, feature.n_frames, record.id)
        return path

    def extract_all(self, records: list[UtteranceRecord], workers: int = 1, *, overwrite: bool = False) -> list[Path]:
        """Utterance-parallel extraction; existing cache entries are kept unless ``overwrite``."""
        todo = [r for r in records if overwrite or not self.has(r)]
        if workers > 1 and len(todo) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                list(pool.map(self.extract, todo))
        else:
            for record in todo:
                self.extract(record)
        logger.info("Extracted %d %s features (%d already cached) into %s",
                    len(todo), self.kind, len(records) - len(todo), self.root)
        return [self.path_for(r.id) for r in records]
