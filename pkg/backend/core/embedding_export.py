"""Phoneme-embedding table export for external dimensionality reduction."""
import logging
from pathlib import Path

import numpy as np
import pandas as pd

from core.acoustic_model import AcousticModel
from core.errors import ConfigMismatch, StorageError
from models.tokens import PhonemeInventory

logger = logging.getLogger(__name__)

ID_COLUMNS = ["symbol", "language_tag"]


def embedding_frame(model: AcousticModel, inventory: PhonemeInventory) -> pd.DataFrame:
    values = model.phoneme_encoder.table.weight.detach().cpu().numpy().astype(np.float32)
    if values.shape[0] != len(inventory):
        raise ConfigMismatch(f"embedding table has {values.shape[0]} rows, inventory has {len(inventory)}")
    frame = pd.DataFrame(values, columns=[f"e_{i}" for i in range(values.shape[1])])
    frame.insert(0, "language_tag", [e.language_tag for e in inventory.entries])
    frame.insert(0, "symbol", [e.symbol for e in inventory.entries])
    return frame


def export_embeddings(model: AcousticModel, inventory: PhonemeInventory, out_path: Path) -> Path:
    """One row per inventory symbol: symbol, language_tag, e_0..e_{M-1}."""
    out_path = Path(out_path)
    frame = embedding_frame(model, inventory)
    try:
        out_path.parent.mkdir(parents=True, exist_ok=True)
        # repr-precision floats so the table parses back exactly
        frame.to_csv(out_path, index=False, float_format="%.9g")
    except OSError as exc:
        raise StorageError(str(out_path), exc.strerror or str(exc)) from exc
    logger.info("Exported %d x %d embedding table to %s", len(frame), frame.shape[1] - 2, out_path)
    return out_path


def load_embeddings(path: Path) -> tuple[pd.DataFrame, np.ndarray]:
    """Symbol/tag columns and the float32 embedding matrix of an exported CSV."""
    try:
        frame = pd.read_csv(path, dtype={"symbol": str, "language_tag": str}, keep_default_na=False)
    except (OSError, pd.errors.ParserError) as exc:
        raise StorageError(str(path), str(exc)) from exc
    if list(frame.columns[:2]) != ID_COLUMNS:
        raise StorageError(str(path), "missing symbol/language_tag columns")
    values = frame.drop(columns=ID_COLUMNS).to_numpy(dtype=np.float32)
    return frame[ID_COLUMNS], values
