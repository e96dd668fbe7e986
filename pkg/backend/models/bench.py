"""Pydantic schemas for synthesis and benchmark reports."""
from typing import Optional

from pydantic import BaseModel


class SynthesisReport(BaseModel):
    n_frames: int
    audio_seconds: float
    synthesis_ms: float
    acoustic_ms: float
    vocoder_ms: float
    wav_path: Optional[str] = None


class BenchRow(BaseModel):
    component: str
    parameters: int
    median_ms: Optional[float] = None     # None for sub-components that are not timed alone


class BenchReport(BaseModel):
    feature_kind: str
    n_frames: int
    audio_seconds: float
    repeat: int
    rows: list[BenchRow]

    def render(self) -> str:
        lines = [
            f"{'Component':<28}{'Parameters':>14}{'Median ms':>12}",
            "-" * 54,
        ]
        for row in self.rows:
            ms = f"{row.median_ms:.2f}" if row.median_ms is not None else "-"
            lines.append(f"{row.component:<28}{row.parameters:>14,d}{ms:>12}")
        lines.append("-" * 54)
        lines.append(
            f"{self.feature_kind} backend, T={self.n_frames} frames, "
            f"{self.audio_seconds:.2f} s audio, median of {self.repeat} runs"
        )
        return "\n".join(lines)
