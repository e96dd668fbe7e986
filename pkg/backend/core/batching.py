"""Padding utterances into training batches."""
from typing import NamedTuple

import torch
from torch import Tensor

from core.errors import DurationMismatch
from core.feature_store import FeatureStore
from core.tokenizer import Tokenizer
from models.corpus import UtteranceRecord
from models.tokens import Scheme, TokenSequence


class Batch(NamedTuple):
    ids: list[str]
    phoneme_ids: Tensor    # (B, L) long, pad 0
    style_ids: Tensor      # (B, L) long, pad 0
    token_mask: Tensor     # (B, L) bool
    durations: Tensor      # (B, L) long, pad 0
    features: Tensor       # (B, T, N) float
    frame_mask: Tensor     # (B, T) bool


def redistribute_durations(tokenizer: Tokenizer, ipa: TokenSequence, target: TokenSequence,
                           durations: list[int], record_id: str = "") -> list[int]:
    """Spread IPA-aligned durations over another tokenization word by word; separators keep theirs."""
    if target.scheme == "ipa":
        return list(durations)
    src_spans, dst_spans = tokenizer.word_spans(ipa), tokenizer.word_spans(target)
    if len(src_spans) != len(dst_spans):
        raise DurationMismatch(record_id, "word counts differ between tokenizations")
    out = [0] * len(target)
    sep_src = [i for i, p in enumerate(ipa.phoneme_ids) if p == tokenizer.ipa_inventory.separator_id]
    sep_dst = [i for i, p in enumerate(target.phoneme_ids) if p == tokenizer.inventory(target.scheme).separator_id]
    for s, d in zip(sep_src, sep_dst):
        out[d] = durations[s]
    for (a, b), (c, e) in zip(src_spans, dst_spans):
        total, n = sum(durations[a:b]), e - c
        if total < n:
            raise DurationMismatch(record_id, f"{total} frames cannot cover {n} letters")
        base, extra = divmod(total, n)
        for k in range(n):
            out[c + k] = base + (1 if k < extra else 0)
    return out


def token_durations(tokenizer: Tokenizer, record: UtteranceRecord, scheme: Scheme) -> tuple[TokenSequence, list[int]]:
    """Tokenize a record and align its manifest durations to the requested scheme."""
    if record.durations is None:
        raise DurationMismatch(record.id, "record has no durations")
    ipa = tokenizer.tokenize_ipa(record.text, record.language)
    if len(record.durations) != len(ipa):
        raise DurationMismatch(record.id, f"{len(record.durations)} durations for {len(ipa)} tokens")
    seq = ipa if scheme == "ipa" else tokenizer.tokenize(record.text, record.language, scheme)
    return seq, redistribute_durations(tokenizer, ipa, seq, record.durations, record.id)


def make_batch(records: list[UtteranceRecord], tokenizer: Tokenizer, feature_store: FeatureStore,
               scheme: Scheme = "ipa") -> Batch:
    seqs, durations, features = [], [], []
    for record in records:
        seq, frames = token_durations(tokenizer, record, scheme)
        feature = feature_store.get(record)
        if sum(frames) != feature.n_frames:
            raise DurationMismatch(record.id, f"durations sum to {sum(frames)}, feature has {feature.n_frames} frames")
        seqs.append(seq)
        durations.append(frames)
        features.append(feature)

    b = len(records)
    max_l = max(len(s) for s in seqs)
    max_t = max(f.n_frames for f in features)
    n_bins = features[0].n_bins
    phoneme_ids = torch.zeros(b, max_l, dtype=torch.long)
    style_ids = torch.zeros(b, max_l, dtype=torch.long)
    frames = torch.zeros(b, max_l, dtype=torch.long)
    feats = torch.zeros(b, max_t, n_bins, dtype=torch.float32)
    frame_mask = torch.zeros(b, max_t, dtype=torch.bool)
    for i, (seq, d, f) in enumerate(zip(seqs, durations, features)):
        n = len(seq)
        phoneme_ids[i, :n] = torch.tensor(seq.phoneme_ids)
        style_ids[i, :n] = torch.tensor(seq.style_ids)
        frames[i, :n] = torch.tensor(d)
        feats[i, :f.n_frames] = torch.from_numpy(f.data.T.copy())
        frame_mask[i, :f.n_frames] = True
    return Batch([r.id for r in records], phoneme_ids, style_ids, phoneme_ids != 0, frames, feats, frame_mask)
