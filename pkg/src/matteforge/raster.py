"""Raster I/O and resampling.

Foreground color images are 24-bit RGB PNG; alpha mattes are 8-bit
grayscale PNG decoded to [0, 1] as value/255. A single 32-bit RGBA PNG may
carry both. Resampling is an in-house bilinear (pixel-center convention)
so results are bit-reproducible and independent of codec versions.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

from .errors import SizeMismatch


def load_rgb(path: str | Path) -> np.ndarray:
    """Decode a color image to uint8 H x W x 3."""
    with Image.open(path) as img:
        return np.asarray(img.convert("RGB"), dtype=np.uint8)


def load_alpha(path: str | Path) -> np.ndarray:
    """Decode a grayscale matte to float64 H x W in [0, 1]."""
    with Image.open(path) as img:
        if img.mode == "RGBA":
            raw = np.asarray(img, dtype=np.uint8)[:, :, 3]
        else:
            raw = np.asarray(img.convert("L"), dtype=np.uint8)
    return raw.astype(np.float64) / 255.0


def load_rgba(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    """Decode a 32-bit RGBA PNG into (rgb uint8, alpha float in [0, 1])."""
    with Image.open(path) as img:
        raw = np.asarray(img.convert("RGBA"), dtype=np.uint8)
    return raw[:, :, :3].copy(), raw[:, :, 3].astype(np.float64) / 255.0


def save_rgb(path: str | Path, rgb: np.ndarray) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(np.ascontiguousarray(rgb, dtype=np.uint8), "RGB").save(path)


def save_alpha(path: str | Path, alpha: np.ndarray) -> None:
    """Encode a [0, 1] matte as 8-bit grayscale PNG (round to nearest)."""
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    quantized = quantize_alpha(alpha)
    Image.fromarray(quantized, "L").save(path)


def quantize_alpha(alpha: np.ndarray) -> np.ndarray:
    return np.rint(np.clip(alpha, 0.0, 1.0) * 255.0).astype(np.uint8)


def quantize_rgb(image: np.ndarray) -> np.ndarray:
    """Round a float image on the 0..255 scale to uint8."""
    return np.rint(np.clip(image, 0.0, 255.0)).astype(np.uint8)


def resize_bilinear(raster: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Bilinear resample to (out_h, out_w); works on 2-D and 3-D rasters.

    Uses the pixel-center mapping src = (dst + 0.5) * scale - 0.5 with edge
    clamping. Output is float64 and clipped to the input range so alpha
    stays inside [0, 1] even after rounding.
    """
    if out_h < 1 or out_w < 1:
        raise SizeMismatch(f"target size {out_h}x{out_w} invalid")
    src = raster.astype(np.float64, copy=False)
    in_h, in_w = src.shape[:2]
    if (in_h, in_w) == (out_h, out_w):
        return src.copy()

    ys = (np.arange(out_h, dtype=np.float64) + 0.5) * (in_h / out_h) - 0.5
    xs = (np.arange(out_w, dtype=np.float64) + 0.5) * (in_w / out_w) - 0.5
    y0 = np.clip(np.floor(ys), 0, in_h - 1).astype(np.int64)
    x0 = np.clip(np.floor(xs), 0, in_w - 1).astype(np.int64)
    y1 = np.minimum(y0 + 1, in_h - 1)
    x1 = np.minimum(x0 + 1, in_w - 1)
    wy = np.clip(ys - y0, 0.0, 1.0)
    wx = np.clip(xs - x0, 0.0, 1.0)

    if src.ndim == 2:
        top = src[y0][:, x0] * (1 - wx) + src[y0][:, x1] * wx
        bot = src[y1][:, x0] * (1 - wx) + src[y1][:, x1] * wx
        out = top * (1 - wy)[:, None] + bot * wy[:, None]
    else:
        wxc = wx[None, :, None]
        wyc = wy[:, None, None]
        top = src[y0][:, x0] * (1 - wxc) + src[y0][:, x1] * wxc
        bot = src[y1][:, x0] * (1 - wxc) + src[y1][:, x1] * wxc
        out = top * (1 - wyc) + bot * wyc
    lo = float(src.min())
    hi = float(src.max())
    return np.clip(out, lo, hi)
