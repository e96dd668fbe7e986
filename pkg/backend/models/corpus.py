"""Pydantic schemas for corpus manifests."""
from typing import Optional

from pydantic import BaseModel, Field

from models.tokens import Language


class UtteranceRecord(BaseModel):
    id: str = Field(..., min_length=1)
    language: Language
    text: str
    audio_path: str
    durations: Optional[list[int]] = None   # frames per IPA token, separators included
