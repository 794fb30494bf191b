"""Invertible pixel<->latent codecs.

Videos carry ``4f + 1`` pixel frames. The first frame is packed alone
(spatial space-to-depth only, zero-padded in channels); every following
group of 4 consecutive frames packs into one motion latent via temporal +
spatial space-to-depth. LR uses a 4x spatial factor and lands on exactly
192 channels (3 * 4 * 4 * 4), so the codec is lossless. HR uses a 16x
spatial factor whose raw packing (3 * 4 * 16 * 16 = 3072 channels) is
reduced to the same 192 channels by a fixed orthonormal linear projection;
decode goes back through the transpose (pseudo-inverse), which is exact on
the projection's row space and idempotent everywhere.

Channel layout of a motion latent (S = spatial factor)::

    channel = ((t_local * S + y_local) * S + x_local) * 3 + rgb

Frame 0 uses the same layout with ``t_local = 0`` and zeros elsewhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

LATENT_CHANNELS = 192


def _check_video_array(frames):
    frames = np.asarray(frames)
    if frames.ndim != 4 or frames.shape[-1] != 3:
        raise ValidationError(f"video must be (T, H, W, 3), got {frames.shape}")
    if frames.shape[0] % 4 != 1:
        raise ValidationError(
            f"frame count {frames.shape[0]} violates the 4f+1 convention (must be 1 mod 4)"
        )
    if not np.isfinite(frames).all():
        raise ValidationError("video contains non-finite values")
    if frames.min() < 0.0 or frames.max() > 1.0:
        raise ValidationError("video values must lie in [0, 1]")
    return frames


@dataclass
class PixelVideo:
    """A (4f+1, H, W, 3) float video with values in [0, 1]."""

    frames: np.ndarray
    fps: float = 24.0

    def __post_init__(self):
        self.frames = _check_video_array(self.frames)

    @property
    def frame_count(self):
        return self.frames.shape[0]


@dataclass
class LatentVideo:
    """A (f+1, h, w, c) latent grid tagged with its producing codec."""

    latents: np.ndarray
    kind: str
    codec_id: str

    def __post_init__(self):
        self.latents = np.asarray(self.latents)
        if self.latents.ndim != 4:
            raise ValidationError(f"latents must be (f+1, h, w, c), got {self.latents.shape}")
        if self.kind not in ("LR", "HR"):
            raise ValidationError(f"kind must be LR or HR, got {self.kind!r}")
        if not np.isfinite(self.latents).all():
            raise ValidationError("latents contain non-finite values")

    @property
    def latent_frames(self):
        return self.latents.shape[0]


def _space_to_depth_frame(frame, s):
    h = frame.shape[0] // s
    w = frame.shape[1] // s
    return (
        frame.reshape(h, s, w, s, 3)
        .transpose(0, 2, 1, 3, 4)
        .reshape(h, w, s * s * 3)
    )


def _depth_to_space_frame(flat, s, h, w):
    return (
        flat.reshape(h, w, s, s, 3)
        .transpose(0, 2, 1, 3, 4)
        .reshape(h * s, w * s, 3)
    )


def _pack_raw(frames, s):
    """(4f+1, S*h, S*w, 3) -> (f+1, h, w, 4*S*S*3), frame 0 zero-padded."""
    t = frames.shape[0]
    f = (t - 1) // 4
    h = frames.shape[1] // s
    w = frames.shape[2] // s
    c_raw = 4 * s * s * 3
    out = np.zeros((f + 1, h, w, c_raw), dtype=frames.dtype)
    out[0, :, :, : s * s * 3] = _space_to_depth_frame(frames[0], s)
    if f:
        motion = (
            frames[1:]
            .reshape(f, 4, h, s, w, s, 3)
            .transpose(0, 2, 4, 1, 3, 5, 6)
            .reshape(f, h, w, c_raw)
        )
        out[1:] = motion
    return out


def _unpack_raw(raw, s):
    f = raw.shape[0] - 1
    h, w = raw.shape[1], raw.shape[2]
    frames = np.empty((4 * f + 1, h * s, w * s, 3), dtype=raw.dtype)
    frames[0] = _depth_to_space_frame(raw[0, :, :, : s * s * 3], s, h, w)
    if f:
        motion = (
            raw[1:]
            .reshape(f, h, w, 4, s, s, 3)
            .transpose(0, 3, 1, 4, 2, 5, 6)
            .reshape(f * 4, h * s, w * s, 3)
        )
        frames[1:] = motion
    return frames


def _dct_matrix(n):
    k = np.arange(n)[:, None]
    x = np.arange(n)[None, :]
    mat = np.cos(np.pi * (x + 0.5) * k / n)
    mat[0] *= np.sqrt(1.0 / n)
    mat[1:] *= np.sqrt(2.0 / n)
    return mat


def _hr_projection_dct(s=16, keep=4):
    """(192, 4*s*s*3) orthonormal rows: per (t_local, rgb) group, the
    lowest keep x keep spatial DCT-II coefficients of the s x s block."""
    d = _dct_matrix(s)
    c_raw = 4 * s * s * 3
    proj = np.zeros((4 * keep * keep * 3, c_raw))
    for t_local in range(4):
        for rgb in range(3):
            for u in range(keep):
                for v in range(keep):
                    row = (t_local * keep * keep + u * keep + v) * 3 + rgb
                    basis = np.outer(d[u], d[v]).reshape(-1)
                    for yx in range(s * s):
                        proj[row, (t_local * s * s + yx) * 3 + rgb] = basis[yx]
    return proj


def _hr_projection_random(seed, s=16, out_dim=LATENT_CHANNELS):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((4 * s * s * 3, out_dim))
    q, r = np.linalg.qr(a)
    q = q * np.sign(np.diag(r))[None, :]
    return q.T


class LrCodec:
    """Lossless 4x spatial / 4x temporal space-to-depth codec."""

    kind = "LR"
    spatial_factor = 4
    channels = LATENT_CHANNELS
    codec_id = "lr-s2d4"

    def _check_spatial(self, frames):
        for axis, name in ((1, "height"), (2, "width")):
            if frames.shape[axis] % self.spatial_factor:
                raise ValidationError(
                    f"{name} {frames.shape[axis]} is not divisible by the "
                    f"{self.kind} spatial factor {self.spatial_factor}"
                )

    def encode_array(self, frames):
        frames = _check_video_array(frames)
        self._check_spatial(frames)
        raw = _pack_raw(frames, self.spatial_factor)
        pad = self.channels - raw.shape[-1]
        if pad < 0:
            raise ValidationError("LR raw packing exceeds the latent channel budget")
        if pad:
            raw = np.concatenate([raw, np.zeros(raw.shape[:-1] + (pad,), raw.dtype)], axis=-1)
        return raw

    def decode_array(self, latents, first_frame_packed=True):
        latents = np.asarray(latents)
        if latents.shape[-1] != self.channels:
            raise ValidationError(
                f"channel count {latents.shape[-1]} incompatible with codec "
                f"{self.codec_id} (expects {self.channels})"
            )
        if first_frame_packed:
            return _unpack_raw(latents, self.spatial_factor)
        f = latents.shape[0]
        h, w = latents.shape[1], latents.shape[2]
        s = self.spatial_factor
        return (
            latents.reshape(f, h, w, 4, s, s, 3)
            .transpose(0, 3, 1, 4, 2, 5, 6)
            .reshape(f * 4, h * s, w * s, 3)
        )

    def encode(self, video: PixelVideo) -> LatentVideo:
        return LatentVideo(self.encode_array(video.frames), self.kind, self.codec_id)

    def decode(self, latent: LatentVideo, fps=24.0) -> PixelVideo:
        frames = self.decode_array(latent.latents)
        return PixelVideo(np.clip(frames, 0.0, 1.0), fps=fps)


class HrCodec(LrCodec):
    """16x spatial codec with an orthonormal 3072 -> 192 channel projection.

    ``mode='dct'`` keeps the lowest 4x4 spatial DCT coefficients per
    temporal slot and color channel (fixed basis); ``mode='random'`` uses a
    seeded random orthonormal projection. Decode applies the transpose, so
    it is exact on band-limited content and idempotent in general.
    """

    kind = "HR"
    spatial_factor = 16

    def __init__(self, mode="dct", seed=0):
        if mode == "dct":
            self._proj = _hr_projection_dct(self.spatial_factor)
            self.codec_id = "hr-s2d16-dct4"
        elif mode == "random":
            self._proj = _hr_projection_random(seed, self.spatial_factor)
            self.codec_id = f"hr-s2d16-rand{seed}"
        else:
            raise ValidationError(f"unknown HR projection mode {mode!r}")
        self._proj_cache = {np.dtype(np.float64): self._proj}

    def _proj_as(self, dtype):
        dtype = np.dtype(dtype)
        if dtype not in self._proj_cache:
            self._proj_cache[dtype] = self._proj.astype(dtype)
        return self._proj_cache[dtype]

    def encode_array(self, frames):
        frames = _check_video_array(frames)
        self._check_spatial(frames)
        raw = _pack_raw(frames, self.spatial_factor)
        return raw @ self._proj_as(raw.dtype).T

    def decode_array(self, latents, first_frame_packed=True):
        latents = np.asarray(latents)
        if latents.shape[-1] != self.channels:
            raise ValidationError(
                f"channel count {latents.shape[-1]} incompatible with codec "
                f"{self.codec_id} (expects {self.channels})"
            )
        raw = latents @ self._proj_as(latents.dtype)
        if first_frame_packed:
            return _unpack_raw(raw, self.spatial_factor)
        f, h, w = raw.shape[0], raw.shape[1], raw.shape[2]
        s = self.spatial_factor
        return (
            raw.reshape(f, h, w, 4, s, s, 3)
            .transpose(0, 3, 1, 4, 2, 5, 6)
            .reshape(f * 4, h * s, w * s, 3)
        )

    def decode(self, latent: LatentVideo, fps=24.0) -> PixelVideo:
        frames = self.decode_array(latent.latents)
        return PixelVideo(np.clip(frames, 0.0, 1.0), fps=fps)


_REGISTRY: dict[str, LrCodec] = {}


def register_codec(codec):
    _REGISTRY[codec.codec_id] = codec
    return codec


def get_codec(codec_id):
    try:
        return _REGISTRY[codec_id]
    except KeyError:
        raise ValidationError(f"latent was not produced by a registered codec: {codec_id!r}")


LR_CODEC = register_codec(LrCodec())
HR_CODEC = register_codec(HrCodec())
register_codec(HrCodec(mode="random", seed=0))


def encode(video: PixelVideo, kind: str) -> LatentVideo:
    codec = LR_CODEC if kind == "LR" else HR_CODEC if kind == "HR" else None
    if codec is None:
        raise ValidationError(f"kind must be LR or HR, got {kind!r}")
    return codec.encode(video)


def decode(latent: LatentVideo, fps=24.0) -> PixelVideo:
    return get_codec(latent.codec_id).decode(latent, fps=fps)
