"""Lossless PNG image IO (uint8 grayscale or RGB)."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image
from PIL.PngImagePlugin import PngInfo

from .errors import FormatError
from .types import validate_image


def load_png(path) -> np.ndarray:
    img = Image.open(path)
    if img.mode == "L":
        pass
    elif img.mode in ("RGB",):
        pass
    elif img.mode in ("LA", "RGBA", "P", "I;16", "I"):
        img = img.convert("RGB")
    else:
        raise FormatError(f"unsupported image mode {img.mode} in {path}")
    return validate_image(np.asarray(img, dtype=np.uint8))


def save_png(img: np.ndarray, path, text: dict | None = None) -> None:
    """Write ``img`` as PNG; optional ``text`` entries become tEXt chunks."""
    validate_image(img)
    pil = Image.fromarray(img)
    info = None
    if text:
        info = PngInfo()
        for key, value in sorted(text.items()):
            info.add_text(str(key), str(value))
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    pil.save(path, format="PNG", pnginfo=info)


def to_grayscale(img: np.ndarray) -> np.ndarray:
    """ITU-R BT.601 luma conversion, rounded half to even."""
    validate_image(img)
    if img.ndim == 2:
        return img
    weights = np.array([0.299, 0.587, 0.114])
    gray = img.astype(np.float64) @ weights
    return np.clip(np.rint(gray), 0, 255).astype(np.uint8)
