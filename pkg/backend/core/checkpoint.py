"""Versioned single-file checkpoints for the acoustic model."""
import logging
from pathlib import Path
from typing import Any, NamedTuple, Optional

import torch

from core.acoustic_model import AcousticModel
from core.autoencoder import ConvAutoencoder, autoencoder_from_state, autoencoder_state
from core.errors import CheckpointError, StorageError
from models.audio import MelConfig
from models.training import LossRecord, ModelConfig, TrainConfig

logger = logging.getLogger(__name__)

CHECKPOINT_FORMAT = "tonemark-acoustic"
CHECKPOINT_VERSION = 1


class Checkpoint(NamedTuple):
    model_config: ModelConfig
    train_config: TrainConfig
    mel_config: MelConfig
    state_dict: dict[str, torch.Tensor]
    optimizer_state: Optional[dict[str, Any]]
    step: int
    rng_state: Optional[torch.Tensor]
    history: list[LossRecord]
    autoencoder: Optional[ConvAutoencoder]
    path: str = ""

    def build_model(self) -> AcousticModel:
        model = AcousticModel(self.model_config)
        model.load_state_dict(self.state_dict)
        model.eval()
        return model


def save_checkpoint(
    path: Path,
    model: AcousticModel,
    train_config: TrainConfig,
    mel_config: MelConfig,
    *,
    optimizer: Optional[torch.optim.Optimizer] = None,
    step: int = 0,
    history: Optional[list[LossRecord]] = None,
    autoencoder: Optional[ConvAutoencoder] = None,
) -> Path:
    payload = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "model_config": model.config.model_dump_json(),
        "train_config": train_config.model_dump_json(),
        "mel_config": mel_config.model_dump_json(),
        "state_dict": {k: v.detach().to(torch.float32).clone() for k, v in model.state_dict().items()},
        "optimizer": optimizer.state_dict() if optimizer is not None else None,
        "step": step,
        "rng_state": torch.get_rng_state(),
        "history": [r.model_dump() for r in history or []],
        "autoencoder": autoencoder_state(autoencoder) if autoencoder is not None else None,
    }
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        torch.save(payload, path)
    except OSError as exc:
        raise StorageError(str(path), exc.strerror or str(exc)) from exc
    logger.info("Saved checkpoint at step %d to %s", step, path)
    return path


def load_checkpoint(path: Path) -> Checkpoint:
    path = Path(path)
    try:
        payload = torch.load(path, map_location="cpu", weights_only=True)
    except FileNotFoundError as exc:
        raise StorageError(str(path), "no such file") from exc
    except Exception as exc:
        raise CheckpointError(str(path), f"unreadable ({exc})") from exc
    if not isinstance(payload, dict) or payload.get("format") != CHECKPOINT_FORMAT:
        raise CheckpointError(str(path), "not an acoustic-model checkpoint")
    if payload.get("version") != CHECKPOINT_VERSION:
        raise CheckpointError(str(path), f"unsupported version {payload.get('version')}")
    ae_state = payload.get("autoencoder")
    return Checkpoint(
        model_config=ModelConfig.model_validate_json(payload["model_config"]),
        train_config=TrainConfig.model_validate_json(payload["train_config"]),
        mel_config=MelConfig.model_validate_json(payload["mel_config"]),
        state_dict=payload["state_dict"],
        optimizer_state=payload.get("optimizer"),
        step=int(payload["step"]),
        rng_state=payload.get("rng_state"),
        history=[LossRecord(**r) for r in payload.get("history", [])],
        autoencoder=autoencoder_from_state(ae_state, str(path)) if ae_state else None,
        path=str(path),
    )
