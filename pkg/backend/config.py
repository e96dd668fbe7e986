"""Application settings loaded from .env (or a --config key=value file)."""
from pathlib import Path
from typing import Optional

from pydantic_settings import BaseSettings, SettingsConfigDict

from models.audio import AutoencoderConfig, MelConfig

_BACKEND_DIR = Path(__file__).resolve().parent


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_file=".env", env_file_encoding="utf-8", extra="ignore")

    # Data files (relative names resolve against DATA_DIR)
    DATA_DIR: str = str(_BACKEND_DIR / "data")
    LEXICON_FILE: str = ""                   # empty uses the cmudict package
    ARPABET_MAP_FILE: str = "arpabet_to_ipa.tsv"
    PINYIN_INITIAL_MAP_FILE: str = "pinyin_initial_to_ipa.tsv"
    PINYIN_FINAL_MAP_FILE: str = "pinyin_final_to_ipa.tsv"
    HANZI_LEXICON_FILE: str = ""             # empty converts hanzi with pypinyin
    IPA_INVENTORY_FILE: str = "ipa_inventory.txt"
    ALPHABET_INVENTORY_FILE: str = "alphabet_inventory.txt"

    # Audio
    SAMPLE_RATE: int = 16_000
    N_FFT: int = 1024
    HOP_LENGTH: int = 256
    WIN_LENGTH: int = 1024
    N_MELS: int = 80
    FMIN: float = 0.0
    FMAX: float = 8000.0
    LOG_FLOOR: float = 1e-5
    GRIFFIN_LIM_ITERS: int = 60

    # Autoencoder
    AE_LATENT_DIM: int = 32
    AE_STRIDES: str = "4,4,4,4"
    AE_CHANNELS: str = "128,256,256"
    AE_DOMAIN: str = "waveform"
    AE_CROSSFADE: int = 0
    AE_STEPS: int = 2000
    AE_LEARNING_RATE: float = 1e-3

    # Training
    PRESET: str = "desk"
    SEED: int = 7
    FEATURE_CACHE_DIR: str = ""
    NUM_WORKERS: int = 2

    # Logging
    LOG_LEVEL: str = "INFO"

    def data_path(self, name: str) -> Optional[Path]:
        if not name:
            return None
        path = Path(name)
        return path if path.is_absolute() else Path(self.DATA_DIR) / path

    @property
    def mel_config(self) -> MelConfig:
        return MelConfig(
            sample_rate=self.SAMPLE_RATE,
            n_fft=self.N_FFT,
            hop_length=self.HOP_LENGTH,
            win_length=self.WIN_LENGTH,
            n_mels=self.N_MELS,
            fmin=self.FMIN,
            fmax=self.FMAX,
            log_floor=self.LOG_FLOOR,
        )

    @property
    def autoencoder_config(self) -> AutoencoderConfig:
        return AutoencoderConfig(
            strides=_int_list(self.AE_STRIDES),
            channels=_int_list(self.AE_CHANNELS),
            latent_dim=self.AE_LATENT_DIM,
            domain=self.AE_DOMAIN,
            in_channels=1 if self.AE_DOMAIN == "waveform" else self.N_MELS,
            crossfade=self.AE_CROSSFADE,
        )


def _int_list(raw: str) -> list[int]:
    return [int(v) for v in raw.split(",") if v.strip()]


def load_settings(config_path: Optional[str] = None) -> Settings:
    """Settings from the environment, with an optional key=value file layered under it."""
    if config_path is None:
        return settings
    return Settings(_env_file=config_path)


settings = Settings()
