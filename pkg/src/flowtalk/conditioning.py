"""Condition bundles, toy text/audio encoders, dropout, and audio routing.

All bundle arrays carry a leading batch axis. Dropped conditions are
substituted by the owning model's learned null embeddings (never ambiguous
zeros); ``condition_dropout`` records what was dropped in the flag arrays
and the model re-applies the same substitution from its parameters so
gradients reach the null embeddings.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ValidationError


@dataclass
class ConditionBundle:
    """Per-sample conditioning for the low-resolution audio-to-video model.

    text_emb:     (B, L, d_text)
    audio_emb:    (B, F, d_audio)   one feature row per latent frame
    ref_latent:   (B, 1, h, w, c)   encoded reference image
    first_latent: (B, 1, h, w, c)   encoded first frame (equals ref at
                                    generation time, the clip's own first
                                    latent during training)
    """

    text_emb: np.ndarray
    audio_emb: np.ndarray
    ref_latent: np.ndarray
    first_latent: np.ndarray
    drop_text: np.ndarray = None
    drop_audio: np.ndarray = None
    drop_ref: np.ndarray = None
    drop_first: np.ndarray = None
    audio_routing: "AudioRouting | None" = None

    def __post_init__(self):
        b = self.text_emb.shape[0]
        for name in ("audio_emb", "ref_latent", "first_latent"):
            arr = getattr(self, name)
            if arr.shape[0] != b:
                raise ValidationError(f"{name} batch size {arr.shape[0]} != {b}")
        if self.audio_emb.ndim != 3:
            raise ValidationError("audio_emb must be (B, F, d_audio)")
        for name in ("drop_text", "drop_audio", "drop_ref", "drop_first"):
            if getattr(self, name) is None:
                setattr(self, name, np.zeros(b, dtype=bool))

    @property
    def batch_size(self):
        return self.text_emb.shape[0]

    @property
    def latent_frames(self):
        return self.audio_emb.shape[1]

    def dropped(self, text=False, audio=False, ref=False, first=False):
        """A copy with the selected conditions flagged as dropped (used for
        the unconditional branch of classifier-free guidance)."""
        b = self.batch_size
        out = replace(self)
        if text:
            out.drop_text = np.ones(b, dtype=bool)
        if audio:
            out.drop_audio = np.ones(b, dtype=bool)
        if ref:
            out.drop_ref = np.ones(b, dtype=bool)
        if first:
            out.drop_first = np.ones(b, dtype=bool)
        return out


@dataclass
class DropoutProbs:
    text: float = 0.10
    audio: float = 0.10
    ref: float = 0.20
    first_frame: float = 0.20

    def __post_init__(self):
        for name in ("text", "audio", "ref", "first_frame"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValidationError(f"dropout probability {name}={v} outside [0, 1]")


@dataclass
class NullEmbeddings:
    """Views of the model's learned null-condition parameters."""

    text: np.ndarray  # (d_text,)
    audio: np.ndarray  # (d_audio,)
    ref: np.ndarray  # (c,)
    first: np.ndarray  # (c,)


def condition_dropout(bundle, rng, probs: DropoutProbs, nulls: NullEmbeddings):
    """Independently replace each condition by its learned null embedding.

    Draw order is sample-major, one uniform per (sample, condition) in the
    order text, audio, ref, first_frame; this keeps runs reproducible for
    a given generator state.
    """
    b = bundle.batch_size
    u = rng.random((b, 4))
    drop_text = u[:, 0] < probs.text
    drop_audio = u[:, 1] < probs.audio
    drop_ref = u[:, 2] < probs.ref
    drop_first = u[:, 3] < probs.first_frame

    text = bundle.text_emb.copy()
    text[drop_text] = nulls.text
    audio = bundle.audio_emb.copy()
    audio[drop_audio] = nulls.audio
    ref = bundle.ref_latent.copy()
    ref[drop_ref] = nulls.ref
    first = bundle.first_latent.copy()
    first[drop_first] = nulls.first
    return ConditionBundle(
        text_emb=text,
        audio_emb=audio,
        ref_latent=ref,
        first_latent=first,
        drop_text=bundle.drop_text | drop_text,
        drop_audio=bundle.drop_audio | drop_audio,
        drop_ref=bundle.drop_ref | drop_ref,
        drop_first=bundle.drop_first | drop_first,
        audio_routing=bundle.audio_routing,
    )


class HashTextEncoder:
    """Deterministic bag-of-hashed-words embedder standing in for a
    pretrained text encoder. Tokens hash (crc32) into a fixed random
    table; short prompts are padded with zero rows to ``max_len``."""

    def __init__(self, dim=16, vocab=512, max_len=8, seed=1234):
        self.dim = dim
        self.max_len = max_len
        self.vocab = vocab
        rng = np.random.default_rng(seed)
        self.table = rng.standard_normal((vocab, dim)) / np.sqrt(dim)

    def encode(self, prompt: str) -> np.ndarray:
        rows = np.zeros((self.max_len, self.dim))
        for i, tok in enumerate(prompt.lower().split()[: self.max_len]):
            rows[i] = self.table[zlib.crc32(tok.encode("utf-8")) % self.vocab]
        return rows

    def encode_batch(self, prompts):
        return np.stack([self.encode(p) for p in prompts])


AUDIO_FEATURE_DIM = 4


def audio_frame_features(amplitudes, latent_indices):
    """Per-latent-frame audio features: the 4 pixel-frame amplitudes that
    latent packs. Latent 0 packs only pixel frame 0, so its amplitude is
    replicated across the 4 slots to preserve scale.

    amplitudes: (4f+1,) global amplitude track
    latent_indices: iterable of global latent indices
    returns (len(latent_indices), 4)
    """
    amplitudes = np.asarray(amplitudes, dtype=np.float64)
    out = np.zeros((len(latent_indices), AUDIO_FEATURE_DIM))
    for row, i in enumerate(latent_indices):
        if i == 0:
            out[row] = amplitudes[0]
        else:
            seg = amplitudes[4 * i - 3 : 4 * i + 1]
            if seg.shape[0] != 4:
                raise ValidationError(
                    f"latent index {i} needs pixel frames {4 * i - 3}..{4 * i}, "
                    f"track has {amplitudes.shape[0]}"
                )
            out[row] = seg
    return out


@dataclass
class SpeakerRegion:
    """Axis-aligned box in latent-token coordinates, half-open bounds."""

    bbox: tuple  # (x0, y0, x1, y1)
    active: bool

    def __post_init__(self):
        x0, y0, x1, y1 = self.bbox
        if not (x0 < x1 and y0 < y1):
            raise ValidationError(f"degenerate speaker box {self.bbox}")


@dataclass
class AudioRouting:
    """Per-token audio stream selection for multi-speaker scenes.

    ``speech_mask`` is a (h, w) boolean grid: True tokens cross-attend to
    the speech audio stream, False tokens to the silent stream.
    """

    speech_mask: np.ndarray
    silent_emb: np.ndarray  # (B, F, d_audio) or (F, d_audio)


def route_multispeaker_audio(regions, grid_hw, audio_emb, silent_emb):
    """Build the per-token routing for a set of speaker regions.

    Tokens inside an active speaker's box hear ``audio_emb``; tokens in
    inactive boxes and tokens outside every box hear ``silent_emb``.
    Overlapping boxes are rejected.
    """
    h, w = grid_hw
    claimed = np.zeros((h, w), dtype=bool)
    speech = np.zeros((h, w), dtype=bool)
    for region in regions:
        x0, y0, x1, y1 = region.bbox
        if x0 < 0 or y0 < 0 or x1 > w or y1 > h:
            raise ValidationError(f"speaker box {region.bbox} outside the {h}x{w} token grid")
        cells = np.zeros((h, w), dtype=bool)
        cells[y0:y1, x0:x1] = True
        if (claimed & cells).any():
            raise ValidationError(f"speaker box {region.bbox} overlaps another region")
        claimed |= cells
        if region.active:
            speech |= cells
    return AudioRouting(speech_mask=speech, silent_emb=np.asarray(silent_emb))
