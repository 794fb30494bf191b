"""On-disk tensor format and PNG frame-directory export.

Tensor files hold a one-line JSON header followed by the raw payload::

    {"shape": [13, 32, 32, 3], "dtype": "f32", "kind": "LR"}\\n
    <little-endian float32 values, C order>

``kind`` tags which resolution family a latent or video belongs to
(``LR`` or ``HR``); ``raw`` marks tensors with no resolution semantics
(audio tracks, sampler traces).
"""

from __future__ import annotations

import json
import os
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import ValidationError

KINDS = ("LR", "HR", "raw")


def save_tensor(path, array, kind="raw"):
    if kind not in KINDS:
        raise ValidationError(f"kind must be one of {KINDS}, got {kind!r}")
    array = np.asarray(array)
    header = {"shape": list(array.shape), "dtype": "f32", "kind": kind}
    payload = np.ascontiguousarray(array, dtype="<f4")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(json.dumps(header).encode("ascii") + b"\n")
        fh.write(payload.tobytes())


def load_tensor(path):
    """Returns (array float32, kind)."""
    with open(path, "rb") as fh:
        header_line = fh.readline()
        try:
            header = json.loads(header_line.decode("ascii"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ValidationError(f"malformed tensor header in {path}: {exc}") from exc
        if header.get("dtype") != "f32":
            raise ValidationError(f"unsupported dtype {header.get('dtype')!r} in {path}")
        shape = tuple(int(s) for s in header["shape"])
        count = int(np.prod(shape)) if shape else 1
        data = np.frombuffer(fh.read(), dtype="<f4", count=count)
        if data.size != count:
            raise ValidationError(
                f"tensor payload in {path} has {data.size} values, header promises {count}"
            )
    return data.reshape(shape).astype(np.float32), header.get("kind", "raw")


def write_frames_png(dirpath, frames, prefix="frame_"):
    """Write a (T, H, W, 3) float video in [0,1] as 8-bit PNGs.

    Frame files are named ``<prefix><index>.png`` with zero-padded indices
    so lexical order equals temporal order.
    """
    frames = np.asarray(frames)
    if frames.ndim != 4 or frames.shape[-1] != 3:
        raise ValidationError(f"expected (T, H, W, 3) frames, got {frames.shape}")
    dirpath = Path(dirpath)
    dirpath.mkdir(parents=True, exist_ok=True)
    digits = max(5, len(str(frames.shape[0] - 1)))
    paths = []
    for i, frame in enumerate(frames):
        arr = np.clip(np.rint(frame * 255.0), 0, 255).astype(np.uint8)
        p = dirpath / f"{prefix}{i:0{digits}d}.png"
        Image.fromarray(arr, mode="RGB").save(p)
        paths.append(p)
    return paths


def read_frames_png(dirpath, prefix="frame_"):
    dirpath = Path(dirpath)
    names = sorted(n for n in os.listdir(dirpath) if n.startswith(prefix) and n.endswith(".png"))
    if not names:
        raise ValidationError(f"no '{prefix}*.png' frames found in {dirpath}")
    frames = []
    for name in names:
        with Image.open(dirpath / name) as im:
            frames.append(np.asarray(im.convert("RGB"), dtype=np.float64) / 255.0)
    return np.stack(frames)
