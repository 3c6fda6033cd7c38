"""Builders for synthetic covers and audio used across the test modules"""
import io

import numpy as np
from PIL import Image

from src.audio_codec import AudioPayload
from src.image_store import RasterImage


def noise_cover(width: int, height: int, seed: int = 0) -> RasterImage:
    """Uniform RGB noise: every block is high variance"""
    rng = np.random.default_rng(seed)
    return RasterImage(rng.integers(0, 256, size=(height, width, 3), dtype=np.uint8))


def textured_cover(width: int, height: int, seed: int = 0) -> RasterImage:
    """Smooth gradients with a noisy checkered texture, closer to a natural photo"""
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:height, 0:width]
    base = np.stack([
        (xx * 255) // max(1, width - 1),
        (yy * 255) // max(1, height - 1),
        ((xx + yy) * 127) // max(1, width + height - 2) + 64,
    ], axis=-1)
    texture = ((xx // 8 + yy // 8) % 2)[..., None] * rng.integers(-40, 41, size=(height, width, 3))
    return RasterImage(np.clip(base + texture, 0, 255).astype(np.uint8))


def make_audio(
    frames: int,
    sample_rate: int = 8000,
    channels: int = 1,
    bits_per_sample: int = 8,
    seed: int = 0,
) -> AudioPayload:
    rng = np.random.default_rng(seed)
    size = frames * channels * (bits_per_sample // 8)
    return AudioPayload(
        sample_rate=sample_rate,
        channels=channels,
        bits_per_sample=bits_per_sample,
        data=rng.integers(0, 256, size=size, dtype=np.uint8).tobytes(),
    )


def encode(img: RasterImage, fmt: str, **params) -> bytes:
    """Encode through Pillow directly (independent of save_image)"""
    buffer = io.BytesIO()
    Image.fromarray(np.ascontiguousarray(img.pixels)).save(buffer, format=fmt, **params)
    return buffer.getvalue()
