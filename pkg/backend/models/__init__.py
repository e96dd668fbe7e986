from models.tokens import PhonemeInventory, StyleInventory, TokenSequence  # noqa: F401
from models.audio import AcousticFeature, AutoencoderConfig, MelConfig, Waveform  # noqa: F401
from models.corpus import UtteranceRecord  # noqa: F401
from models.training import LossRecord, ModelConfig, TrainConfig, TrainResult  # noqa: F401
from models.bench import BenchReport, BenchRow, SynthesisReport  # noqa: F401
