"""
Lossless RGB image I/O, block-variance maps and candidate slot selection.

A slot is one (pixel_index, channel) pair; pixel_index is the row-major
position y * width + x. Candidates are restricted to the highest-variance
(edge or textured) blocks of the luminance plane.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np
from PIL import Image, UnidentifiedImageError

from src.errors import EmptyCandidateSet, InputError, InvalidParameter, MalformedImage, UnsupportedImage
from src.logger_config import get_logger

logger = get_logger("image_store")

LOSSLESS_FORMATS = {"PNG", "BMP"}
# Pillow modes decoded as 8-bit color; palette images are expanded
ACCEPTED_MODES = {"RGB", "RGBA", "RGBX", "P", "PA"}

# Integer luma weights (x1000) so luminance is exact
LUMA_WEIGHTS = np.array([299, 587, 114], dtype=np.int64)


@dataclass(frozen=True, eq=False)
class RasterImage:
    """Immutable RGB raster; pixels has shape (height, width, 3), dtype uint8."""

    pixels: np.ndarray

    def __post_init__(self):
        pixels = np.array(self.pixels, dtype=np.uint8, copy=True)
        if pixels.ndim != 3 or pixels.shape[2] != 3:
            raise InvalidParameter(f"pixels must have shape (height, width, 3), got {pixels.shape}")
        if pixels.shape[0] == 0 or pixels.shape[1] == 0:
            raise InvalidParameter("image must have positive width and height")
        pixels.setflags(write=False)
        object.__setattr__(self, "pixels", pixels)

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    @property
    def dims(self) -> Tuple[int, int]:
        return self.width, self.height

    @property
    def value_count(self) -> int:
        return int(self.pixels.size)

    def flat_values(self) -> np.ndarray:
        """Read-only view of all values in (pixel, channel) row-major order"""
        return self.pixels.reshape(-1)

    def with_values(self, flat_indices: np.ndarray, values: np.ndarray) -> "RasterImage":
        """Copy with the given flat positions replaced"""
        flat = self.pixels.reshape(-1).copy()
        flat[flat_indices] = values
        return RasterImage(flat.reshape(self.pixels.shape))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RasterImage):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)

    def __repr__(self) -> str:
        return f"RasterImage({self.width}x{self.height})"


@dataclass(frozen=True, eq=False)
class VarianceMap:
    """Per-block luminance population variance, row-major block order."""

    block_size: int
    width: int
    height: int
    variances: np.ndarray

    @property
    def grid(self) -> Tuple[int, int]:
        """(block rows, block columns)"""
        return math.ceil(self.height / self.block_size), math.ceil(self.width / self.block_size)

    @property
    def block_count(self) -> int:
        return int(self.variances.size)

    def block_bounds(self, block_index: int) -> Tuple[int, int, int, int]:
        """(row0, row1, col0, col1) pixel bounds, end-exclusive"""
        _, cols = self.grid
        brow, bcol = divmod(int(block_index), cols)
        row0, col0 = brow * self.block_size, bcol * self.block_size
        return row0, min(row0 + self.block_size, self.height), col0, min(col0 + self.block_size, self.width)


@dataclass(frozen=True, eq=False)
class CandidateSet:
    """Deterministic ordered list of embeddable (pixel_index, channel) slots."""

    pixel_indices: np.ndarray
    channels: np.ndarray
    width: int
    height: int

    def __post_init__(self):
        pixel_indices = np.asarray(self.pixel_indices, dtype=np.int64).reshape(-1)
        channels = np.asarray(self.channels, dtype=np.uint8).reshape(-1)
        if pixel_indices.shape != channels.shape:
            raise InvalidParameter("pixel_indices and channels must have the same length")
        pixel_indices.setflags(write=False)
        channels.setflags(write=False)
        object.__setattr__(self, "pixel_indices", pixel_indices)
        object.__setattr__(self, "channels", channels)

    @property
    def source_dims(self) -> Tuple[int, int]:
        return self.width, self.height

    @property
    def flat_indices(self) -> np.ndarray:
        """Positions into RasterImage.flat_values()"""
        return self.pixel_indices * 3 + self.channels

    def __len__(self) -> int:
        return int(self.pixel_indices.size)

    def slot(self, k: int) -> Tuple[int, int]:
        return int(self.pixel_indices[k]), int(self.channels[k])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CandidateSet):
            return NotImplemented
        return (
            self.source_dims == other.source_dims
            and np.array_equal(self.pixel_indices, other.pixel_indices)
            and np.array_equal(self.channels, other.channels)
        )


def _source_rawmode(image: Image.Image) -> Optional[str]:
    """Decoder raw mode of the first tile, e.g. "RGB", "P;4" or "RGB;16B"."""
    if not image.tile:
        return None
    args = image.tile[0][3]
    if isinstance(args, str):
        return args
    if isinstance(args, tuple) and args and isinstance(args[0], str):
        return args[0]
    return None


def load_image(raw: bytes) -> RasterImage:
    """
    Decode a PNG or BMP into RGB values (alpha discarded).

    Raises:
        MalformedImage: truncated or corrupt data
        UnsupportedImage: lossy/unknown container, grayscale, packed (<8-bit) palettes
            or 16-bit samples
    """
    try:
        image = Image.open(io.BytesIO(raw))
    except UnidentifiedImageError as e:
        raise MalformedImage("bytes are not a recognizable image") from e
    except (OSError, SyntaxError, ValueError) as e:
        raise MalformedImage(f"image header is corrupt: {e}") from e

    with image:
        if image.format not in LOSSLESS_FORMATS:
            raise UnsupportedImage(f"{image.format or 'unknown'} container is not supported (PNG or BMP only)")
        if image.mode not in ACCEPTED_MODES:
            raise UnsupportedImage(f"pixel mode {image.mode} is not 8-bit color")
        rawmode = _source_rawmode(image)
        if rawmode is not None and ";" in rawmode:
            # packed palettes (P;1, P;4) and 16-bit samples (RGB;16B) decode lossily
            raise UnsupportedImage(f"source layout {rawmode} is not 8 bits per sample")
        try:
            image.load()
        except (OSError, SyntaxError, ValueError, EOFError) as e:
            raise MalformedImage(f"image data is truncated or corrupt: {e}") from e
        rgb = image.convert("RGB")
        pixels = np.asarray(rgb, dtype=np.uint8)

    logger.debug(f"Loaded {image.format} {pixels.shape[1]}x{pixels.shape[0]} ({image.mode})")
    return RasterImage(pixels)


def save_image(img: RasterImage) -> bytes:
    """Encode as 8-bit RGB PNG (lossless)."""
    buffer = io.BytesIO()
    Image.fromarray(np.ascontiguousarray(img.pixels)).save(buffer, format="PNG", optimize=False)
    return buffer.getvalue()


def luminance(img: RasterImage) -> np.ndarray:
    """L = round(0.299R + 0.587G + 0.114B) with halves rounded up, as int64 (height, width)."""
    weighted = img.pixels.astype(np.int64) @ LUMA_WEIGHTS
    return (weighted + 500) // 1000


def block_variance_map(img: RasterImage, block_size: int) -> VarianceMap:
    """Population variance of the luminance in each block; edge blocks use their real pixel count."""
    if block_size < 1:
        raise InvalidParameter(f"block_size must be >= 1, got {block_size}")

    lum = luminance(img)
    row_starts = np.arange(0, img.height, block_size)
    col_starts = np.arange(0, img.width, block_size)

    s1 = np.add.reduceat(np.add.reduceat(lum, row_starts, axis=0), col_starts, axis=1)
    s2 = np.add.reduceat(np.add.reduceat(lum * lum, row_starts, axis=0), col_starts, axis=1)
    heights = np.diff(np.append(row_starts, img.height))
    widths = np.diff(np.append(col_starts, img.width))
    counts = np.outer(heights, widths).astype(np.int64)

    # exact integer numerator, n*S2 - S1^2 >= 0
    numerator = counts * s2 - s1 * s1
    variances = (numerator / (counts * counts).astype(np.float64)).reshape(-1)

    return VarianceMap(block_size=block_size, width=img.width, height=img.height, variances=variances)


def candidate_positions(vmap: VarianceMap, img: RasterImage, top_fraction: float) -> CandidateSet:
    """
    Slots of the ceil(top_fraction * block_count) highest-variance blocks.

    Blocks are ranked by variance descending, ties by lower block index; slots are
    emitted block by block in rank order, then pixel index ascending, then channel.
    """
    if not 0.0 < top_fraction <= 1.0:
        raise InvalidParameter(f"top_fraction must lie in (0, 1], got {top_fraction}")
    if (vmap.width, vmap.height) != img.dims:
        raise InvalidParameter(
            f"variance map was computed for {vmap.width}x{vmap.height}, image is {img.width}x{img.height}"
        )

    block_total = vmap.block_count
    # tolerance keeps e.g. 0.3 * 10 from rounding up to 4
    selected_count = min(block_total, max(1, math.ceil(top_fraction * block_total - 1e-9)))
    indices = np.arange(block_total)
    ranking = np.lexsort((indices, -vmap.variances))
    selected = ranking[:selected_count]

    pixel_chunks = []
    for block_index in selected.tolist():
        row0, row1, col0, col1 = vmap.block_bounds(block_index)
        rows = np.arange(row0, row1, dtype=np.int64)
        cols = np.arange(col0, col1, dtype=np.int64)
        pixel_chunks.append((rows[:, None] * img.width + cols[None, :]).reshape(-1))

    pixels = np.concatenate(pixel_chunks) if pixel_chunks else np.empty(0, dtype=np.int64)
    if pixels.size == 0:
        raise EmptyCandidateSet("variance selection produced no candidate slots")

    candidates = CandidateSet(
        pixel_indices=np.repeat(pixels, 3),
        channels=np.tile(np.arange(3, dtype=np.uint8), pixels.size),
        width=img.width,
        height=img.height,
    )
    logger.debug(
        f"Selected {selected_count}/{block_total} blocks (top_fraction={top_fraction}) -> {len(candidates)} slots"
    )
    return candidates


def read_image_file(path: Union[str, Path]) -> RasterImage:
    """Read and decode an image file, naming the path in any error"""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise InputError(f"{path}: cannot read image file: {e.strerror or e}") from e
    try:
        return load_image(raw)
    except InputError as e:
        raise type(e)(f"{path}: {e}") from e


def write_image_file(path: Union[str, Path], img: RasterImage) -> None:
    path = Path(path)
    try:
        path.write_bytes(save_image(img))
    except OSError as e:
        raise InputError(f"{path}: cannot write image file: {e.strerror or e}") from e
    logger.info(f"Wrote PNG {path} ({img.width}x{img.height})")
