"""
Image quality metrics between a cover and a stego image: MSE, PSNR, SSIM and
per-channel histogram distances.

SSIM runs on the luminance plane with uniform 8x8 windows at stride 1,
C1 = (0.01*255)^2 and C2 = (0.03*255)^2, averaged over all windows. Window
moments are accumulated exactly in integers (luminance scaled by 1000) before
the float ratio is taken, so results do not depend on summation order.
"""
from __future__ import annotations

import json
import math
from typing import Dict, NamedTuple, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.errors import DimensionMismatch, ImageTooSmall, InvalidParameter
from src.image_store import LUMA_WEIGHTS, RasterImage
from src.logger_config import get_logger

logger = get_logger("quality_metrics")

PEAK_VALUE = 255.0
INFINITE_PSNR = math.inf
SSIM_WINDOW = 8
SSIM_C1 = (0.01 * 255) ** 2
SSIM_C2 = (0.03 * 255) ** 2
LUMA_SCALE = 1000
# int64 integral images of squared scaled luminance stay below 2^63 up to here
MAX_SSIM_PIXELS = 140_000_000

CHANNEL_NAMES = ("red", "green", "blue")
CSV_COLUMNS = (
    "mse", "psnr", "ssim",
    "red_l1", "red_chi_square",
    "green_l1", "green_chi_square",
    "blue_l1", "blue_chi_square",
)


class HistogramDistance(BaseModel):
    """Distance between the 256-bin histograms of one channel."""

    model_config = ConfigDict(extra='forbid', frozen=True)

    l1: int = Field(ge=0)
    chi_square: float = Field(ge=0.0)


class QualityReport(BaseModel):
    """All cover-vs-stego metrics; psnr is INFINITE_PSNR for identical images."""

    model_config = ConfigDict(extra='forbid', frozen=True)

    mse: float = Field(ge=0.0)
    psnr: float
    ssim: float = Field(ge=-1.0, le=1.0)
    histogram: Dict[str, HistogramDistance]

    @property
    def identical(self) -> bool:
        return self.mse == 0.0

    def to_flat_dict(self) -> Dict[str, object]:
        flat: Dict[str, object] = {
            "mse": self.mse,
            "psnr": render_psnr(self.psnr),
            "ssim": self.ssim,
        }
        for name in CHANNEL_NAMES:
            distance = self.histogram[name]
            flat[f"{name}_l1"] = distance.l1
            flat[f"{name}_chi_square"] = distance.chi_square
        return flat

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_flat_dict(), indent=indent)

    @staticmethod
    def csv_header() -> str:
        return ",".join(CSV_COLUMNS)

    def to_csv_row(self) -> str:
        flat = self.to_flat_dict()
        return ",".join(_format_csv_value(flat[column]) for column in CSV_COLUMNS)

    def summary_line(self) -> str:
        return f"PSNR={render_psnr(self.psnr, precision=4)} dB SSIM={self.ssim:.6f} MSE={self.mse:.6g}"


class MetricTriple(NamedTuple):
    mse: float
    psnr: float
    ssim: float


def render_psnr(value: float, precision: Optional[int] = None):
    """'inf' for the infinite sentinel, else the number (optionally rounded for display)"""
    if math.isinf(value):
        return "inf"
    if precision is not None:
        return f"{value:.{precision}f}"
    return value


def _format_csv_value(value: object) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _check_dims(cover: RasterImage, stego: RasterImage) -> None:
    if cover.dims != stego.dims:
        raise DimensionMismatch(
            f"image dimensions differ: {cover.width}x{cover.height} vs {stego.width}x{stego.height}"
        )


def psnr_from_mse(mse_value: float) -> float:
    if mse_value == 0.0:
        return INFINITE_PSNR
    return 10.0 * math.log10(PEAK_VALUE ** 2 / mse_value)


def mse(cover: RasterImage, stego: RasterImage) -> float:
    """Mean squared difference over all width * height * 3 values."""
    _check_dims(cover, stego)
    diff = cover.pixels.astype(np.int64) - stego.pixels.astype(np.int64)
    return float(np.sum(diff * diff)) / cover.value_count


def psnr(cover: RasterImage, stego: RasterImage) -> float:
    """10 * log10(255^2 / MSE) in dB; INFINITE_PSNR when the images are identical."""
    return psnr_from_mse(mse(cover, stego))


def _scaled_luminance(img: RasterImage) -> np.ndarray:
    """1000 * (0.299R + 0.587G + 0.114B) as exact int64"""
    return img.pixels.astype(np.int64) @ LUMA_WEIGHTS


def _window_sums(plane: np.ndarray) -> np.ndarray:
    """Sums over every 8x8 window (stride 1) via an integral image"""
    height, width = plane.shape
    integral = np.zeros((height + 1, width + 1), dtype=np.int64)
    integral[1:, 1:] = plane.cumsum(axis=0).cumsum(axis=1)
    w = SSIM_WINDOW
    return integral[w:, w:] - integral[:-w, w:] - integral[w:, :-w] + integral[:-w, :-w]


def _ssim_from_planes(
    lum_x: np.ndarray,
    lum_y: np.ndarray,
    sum_x: Optional[np.ndarray] = None,
    sum_xx: Optional[np.ndarray] = None,
) -> float:
    if sum_x is None:
        sum_x = _window_sums(lum_x)
        sum_xx = _window_sums(lum_x * lum_x)
    sum_y = _window_sums(lum_y)
    sum_yy = _window_sums(lum_y * lum_y)
    sum_xy = _window_sums(lum_x * lum_y)

    n = SSIM_WINDOW * SSIM_WINDOW
    mean_scale = float(n * LUMA_SCALE)
    moment_scale = float(n * n) * LUMA_SCALE * LUMA_SCALE

    mu_x = sum_x / mean_scale
    mu_y = sum_y / mean_scale
    var_x = (n * sum_xx - sum_x * sum_x) / moment_scale
    var_y = (n * sum_yy - sum_y * sum_y) / moment_scale
    cov_xy = (n * sum_xy - sum_x * sum_y) / moment_scale

    numerator = (2.0 * mu_x * mu_y + SSIM_C1) * (2.0 * cov_xy + SSIM_C2)
    denominator = (mu_x * mu_x + mu_y * mu_y + SSIM_C1) * (var_x + var_y + SSIM_C2)
    value = float(np.mean(numerator / denominator))
    return min(1.0, max(-1.0, value))


def _check_ssim_size(img: RasterImage) -> None:
    if img.width < SSIM_WINDOW or img.height < SSIM_WINDOW:
        raise ImageTooSmall(
            f"SSIM needs at least {SSIM_WINDOW}x{SSIM_WINDOW} pixels, got {img.width}x{img.height}"
        )
    if img.width * img.height > MAX_SSIM_PIXELS:
        raise InvalidParameter(f"image of {img.width}x{img.height} pixels is too large for exact SSIM")


def ssim(cover: RasterImage, stego: RasterImage) -> float:
    """Mean SSIM over all 8x8 luminance windows."""
    _check_dims(cover, stego)
    _check_ssim_size(cover)
    return _ssim_from_planes(_scaled_luminance(cover), _scaled_luminance(stego))


def compare_histograms(cover: RasterImage, stego: RasterImage) -> Dict[str, HistogramDistance]:
    """
    Per-channel 256-bin histogram distances.

    l1 = sum |h1 - h2|; chi_square sums (h1 - h2)^2 / (h1 + h2) over bins where
    h1 + h2 > 0.
    """
    _check_dims(cover, stego)
    cover_counts = channel_histograms(cover)
    stego_counts = channel_histograms(stego)
    distances = {}
    for channel, name in enumerate(CHANNEL_NAMES):
        h1, h2 = cover_counts[channel], stego_counts[channel]
        diff = h1 - h2
        total = h1 + h2
        occupied = total > 0
        chi_square = float(np.sum((diff[occupied] ** 2) / total[occupied]))
        distances[name] = HistogramDistance(l1=int(np.abs(diff).sum()), chi_square=chi_square)
    return distances


def channel_histograms(img: RasterImage) -> np.ndarray:
    """(3, 256) int64 bin counts"""
    return np.stack([
        np.bincount(img.pixels[:, :, channel].reshape(-1), minlength=256).astype(np.int64)
        for channel in range(3)
    ])


def quality_report(cover: RasterImage, stego: RasterImage) -> QualityReport:
    """
    Compute every metric between cover and stego.

    Args:
        cover: Original image
        stego: Image of the same dimensions to compare against it

    Returns:
        QualityReport with MSE, PSNR (INFINITE_PSNR when identical), SSIM
        and per-channel histogram distances

    Raises:
        DimensionMismatch: cover and stego differ in size
        ImageTooSmall: either side is below the SSIM window
        InvalidParameter: image too large for exact SSIM
    """
    mse_value = mse(cover, stego)
    report = QualityReport(
        mse=mse_value,
        psnr=psnr_from_mse(mse_value),
        ssim=ssim(cover, stego),
        histogram=compare_histograms(cover, stego),
    )
    logger.debug(f"Quality report: {report.summary_line()}")
    return report


class CoverReference:
    """
    Cover-side precomputation for scoring many sparse modifications of one cover.

    score_changes(flat_indices, new_values) gives the same MSE/PSNR/SSIM as
    materializing the stego image and calling mse/psnr/ssim. Read-only after
    construction; safe to share between threads.
    """

    def __init__(self, cover: RasterImage):
        _check_ssim_size(cover)
        self.cover = cover
        self._values = cover.flat_values().astype(np.int64)
        self._lum = _scaled_luminance(cover)
        self._sum_x = _window_sums(self._lum)
        self._sum_xx = _window_sums(self._lum * self._lum)
        for array in (self._values, self._lum, self._sum_x, self._sum_xx):
            array.setflags(write=False)

    def score_changes(self, flat_indices: np.ndarray, new_values: np.ndarray) -> MetricTriple:
        """Metrics for the cover with values at distinct flat_indices replaced by new_values."""
        flat_indices = np.asarray(flat_indices, dtype=np.int64)
        delta = np.asarray(new_values, dtype=np.int64) - self._values[flat_indices]
        squared_error = int(np.dot(delta, delta))
        mse_value = squared_error / self.cover.value_count
        if squared_error == 0:
            return MetricTriple(0.0, INFINITE_PSNR, 1.0)

        changed = delta != 0
        positions = flat_indices[changed]
        lum_y = self._lum.reshape(-1).copy()
        np.add.at(lum_y, positions // 3, delta[changed] * LUMA_WEIGHTS[positions % 3])
        ssim_value = _ssim_from_planes(
            self._lum, lum_y.reshape(self._lum.shape), self._sum_x, self._sum_xx
        )
        return MetricTriple(mse_value, psnr_from_mse(mse_value), ssim_value)
