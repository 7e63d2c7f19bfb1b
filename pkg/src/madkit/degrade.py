"""Reference-image post-processing chains: NPP, Resized, JP2, PS-JP2.

The print-scan chain is a parametric simulation (paper texture, sensor
noise, a dust-and-scratch median filter), not a reproduction of any
physical printer/scanner pair; with all artefact parameters at zero it
degenerates byte-exactly to the Resized+JP2 chain.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, replace

import numpy as np
from PIL import Image
from scipy import ndimage

from .core.errors import MadkitError
from .core.types import PostProcessing, validate_image


@dataclass(frozen=True)
class DegradeConfig:
    mode: PostProcessing = PostProcessing.JP2
    target_bytes: int = 15360
    noise_sigma: float = 2.0        # gaussian sensor noise (intensity levels)
    texture_amplitude: float = 3.0  # paper surface pattern amplitude
    texture_scale: float = 2.5      # correlation length of the pattern (px)
    median_radius: int = 1          # dust & scratch analogue; 0 disables
    seed: int = 0

    def __post_init__(self):
        if self.target_bytes <= 0:
            raise MadkitError("target_bytes must be positive")
        if self.noise_sigma < 0 or self.texture_amplitude < 0:
            raise MadkitError("noise amplitudes must be non-negative")
        if self.texture_scale <= 0:
            raise MadkitError("texture_scale must be positive")
        if self.median_radius < 0:
            raise MadkitError("median_radius must be non-negative")


def resize_half(img: np.ndarray) -> np.ndarray:
    """Downsample by two with a 2x2 box filter (round half to even)."""
    validate_image(img)
    h, w = img.shape[:2]
    if h % 2 or w % 2:
        raise MadkitError(f"resize_half requires even dimensions, got {w}x{h}")
    s = img.astype(np.uint16)
    total = (s[0::2, 0::2].astype(np.float64) + s[0::2, 1::2]
             + s[1::2, 0::2] + s[1::2, 1::2])
    return np.rint(total / 4.0).astype(np.uint8)


class JpegCodec:
    """Baseline JPEG via Pillow; quality 1..95."""

    name = "jpeg"
    min_quality = 1
    max_quality = 95

    def encode(self, img: np.ndarray, quality: int) -> bytes:
        buf = io.BytesIO()
        Image.fromarray(img).save(buf, format="JPEG", quality=int(quality))
        return buf.getvalue()

    def decode(self, data: bytes) -> np.ndarray:
        img = Image.open(io.BytesIO(data))
        img.load()
        return np.asarray(img, dtype=np.uint8)


class Jp2Codec:
    """JPEG2000 via Pillow/OpenJPEG; quality 1..100 maps to a rate target.

    quality q encodes at compression ratio exp((100 - q) / 12), so q=100
    is near-lossless and each 12-point drop roughly triples the ratio.
    """

    name = "jp2"
    min_quality = 1
    max_quality = 100

    def encode(self, img: np.ndarray, quality: int) -> bytes:
        ratio = float(np.exp((100 - int(quality)) / 12.0))
        buf = io.BytesIO()
        Image.fromarray(img).save(buf, format="JPEG2000", quality_mode="rates",
                                  quality_layers=[ratio], irreversible=True)
        return buf.getvalue()

    def decode(self, data: bytes) -> np.ndarray:
        img = Image.open(io.BytesIO(data))
        img.load()
        return np.asarray(img, dtype=np.uint8)


def default_codec():
    """JPEG2000 when the encoder is present, baseline JPEG otherwise."""
    from PIL import features
    return Jp2Codec() if features.check("jpg_2000") else JpegCodec()


def compress_to_size(img: np.ndarray, target_bytes: int,
                     codec=None) -> tuple[bytes, int]:
    """Binary-search codec quality for the largest encoding <= target.

    Returns (encoded bytes, quality used). Assumes encoded size is
    monotone non-decreasing in the codec's quality parameter.
    """
    validate_image(img)
    if codec is None:
        codec = default_codec()
    if target_bytes <= 0:
        raise MadkitError("target_bytes must be positive")

    lo, hi = codec.min_quality, codec.max_quality
    best = codec.encode(img, lo)
    if len(best) > target_bytes:
        raise MadkitError(
            f"unreachable target: {target_bytes} bytes below minimum "
            f"achievable size {len(best)} at lowest quality")
    top = codec.encode(img, hi)
    if len(top) <= target_bytes:
        return top, hi

    best_q = lo
    lo += 1  # size(lo) known <= target, size(hi) known > target
    hi -= 1
    while lo <= hi:
        mid = (lo + hi) // 2
        data = codec.encode(img, mid)
        if len(data) <= target_bytes:
            best, best_q = data, mid
            lo = mid + 1
        else:
            hi = mid - 1
    return best, best_q


def scan_artifacts(img: np.ndarray, cfg: DegradeConfig) -> np.ndarray:
    """Paper texture + sensor noise + median filter, at full resolution."""
    validate_image(img)
    rng = np.random.default_rng(cfg.seed)
    out = img.astype(np.float64)
    if cfg.texture_amplitude > 0:
        field = rng.standard_normal(img.shape[:2])
        field = ndimage.gaussian_filter(field, sigma=cfg.texture_scale)
        std = field.std()
        if std > 0:
            field = field / std * cfg.texture_amplitude
        if img.ndim == 3:
            field = field[:, :, None]
        out = out + field
    if cfg.noise_sigma > 0:
        out = out + cfg.noise_sigma * rng.standard_normal(img.shape)
    out = np.clip(np.rint(out), 0, 255).astype(np.uint8)
    if cfg.median_radius > 0:
        k = 2 * cfg.median_radius + 1
        size = (k, k) if out.ndim == 2 else (k, k, 1)
        out = ndimage.median_filter(out, size=size)
    return out


@dataclass(frozen=True)
class DegradeResult:
    image: np.ndarray
    mode: PostProcessing
    encoded: bytes | None = None
    codec: str | None = None
    quality: int | None = None
    seed: int | None = None

    @property
    def byte_size(self) -> int | None:
        return None if self.encoded is None else len(self.encoded)


def apply_chain(img: np.ndarray, cfg: DegradeConfig, codec=None) -> DegradeResult:
    """Run one post-processing chain over a reference image."""
    validate_image(img)
    if cfg.mode == PostProcessing.NPP:
        return DegradeResult(image=img.copy(), mode=cfg.mode)
    if cfg.mode == PostProcessing.RESIZED:
        return DegradeResult(image=resize_half(img), mode=cfg.mode)
    if codec is None:
        codec = default_codec()
    if cfg.mode == PostProcessing.JP2:
        small = resize_half(img)
    elif cfg.mode == PostProcessing.PS_JP2:
        small = resize_half(scan_artifacts(img, cfg))
    else:
        raise MadkitError(f"unknown post-processing mode {cfg.mode}")
    data, quality = compress_to_size(small, cfg.target_bytes, codec)
    return DegradeResult(image=codec.decode(data), mode=cfg.mode, encoded=data,
                         codec=codec.name, quality=quality,
                         seed=cfg.seed if cfg.mode == PostProcessing.PS_JP2 else None)


def simulate_print_scan(img: np.ndarray, cfg: DegradeConfig,
                        codec=None) -> DegradeResult:
    """Full simulated print-scan chain: artefacts, half-size, compression.

    Deterministic given cfg.seed; with all artefact parameters at zero it
    equals the Resized+JP2 chain byte for byte.
    """
    return apply_chain(img, replace(cfg, mode=PostProcessing.PS_JP2), codec)


FILENAME_SUFFIX = {
    PostProcessing.NPP: "_npp",
    PostProcessing.RESIZED: "_rs",
    PostProcessing.JP2: "_jp2",
    PostProcessing.PS_JP2: "_psjp2",
}
