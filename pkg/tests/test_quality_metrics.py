"""
Tests for MSE/PSNR/SSIM, histogram distances and the QualityReport formats.

The brute-force evaluator below transcribes the formulas directly in float
arithmetic, one window at a time, and shares no code with src.quality_metrics.
"""
import json
import math

import numpy as np
import pytest

from src.errors import DimensionMismatch, ImageTooSmall
from src.image_store import RasterImage
from src.quality_metrics import (
    CSV_COLUMNS,
    SSIM_C1,
    CoverReference,
    compare_histograms,
    mse,
    psnr,
    psnr_from_mse,
    quality_report,
    ssim,
)
from tests.helpers import noise_cover, textured_cover


def brute_mse(a: np.ndarray, b: np.ndarray) -> float:
    total = 0.0
    for x, y in zip(a.reshape(-1).tolist(), b.reshape(-1).tolist()):
        total += (x - y) ** 2
    return total / a.size


def brute_psnr(a: np.ndarray, b: np.ndarray) -> float:
    m = brute_mse(a, b)
    return math.inf if m == 0 else 10 * math.log10(255 ** 2 / m)


def brute_ssim(a: np.ndarray, b: np.ndarray) -> float:
    c1, c2 = (0.01 * 255) ** 2, (0.03 * 255) ** 2
    la = 0.299 * a[..., 0] + 0.587 * a[..., 1] + 0.114 * a[..., 2]
    lb = 0.299 * b[..., 0] + 0.587 * b[..., 1] + 0.114 * b[..., 2]
    height, width = la.shape
    scores = []
    for row in range(height - 7):
        for col in range(width - 7):
            x = la[row:row + 8, col:col + 8].astype(float)
            y = lb[row:row + 8, col:col + 8].astype(float)
            mx, my = x.mean(), y.mean()
            vx, vy = ((x - mx) ** 2).mean(), ((y - my) ** 2).mean()
            cov = ((x - mx) * (y - my)).mean()
            scores.append(((2 * mx * my + c1) * (2 * cov + c2)) / ((mx ** 2 + my ** 2 + c1) * (vx + vy + c2)))
    return float(np.mean(scores))


def flat(value: int, width: int = 8, height: int = 8) -> RasterImage:
    return RasterImage(np.full((height, width, 3), value, dtype=np.uint8))


def perturbed(img: RasterImage, count: int, seed: int, max_delta: int = 1) -> RasterImage:
    rng = np.random.default_rng(seed)
    positions = rng.choice(img.value_count, size=count, replace=False)
    values = img.flat_values().astype(int)[positions] + rng.integers(-max_delta, max_delta + 1, size=count)
    return img.with_values(positions, np.clip(values, 0, 255))


# ---------------------------------------------------------------------------
# MSE / PSNR
# ---------------------------------------------------------------------------

def test_mse_identical_is_zero():
    img = noise_cover(10, 10)
    assert mse(img, img) == 0.0


def test_mse_single_change():
    """One of 12 values differs by 1"""
    a = RasterImage(np.zeros((2, 2, 3), dtype=np.uint8))
    b = a.with_values(np.array([5]), np.array([1]))
    assert mse(a, b) == pytest.approx(1 / 12)


def test_mse_uniform_offset():
    assert mse(flat(10), flat(12)) == 4.0


def test_psnr_values():
    assert psnr(flat(3), flat(3)) == math.inf
    assert psnr_from_mse(1.0) == pytest.approx(48.1308, abs=1e-4)
    assert psnr_from_mse(16256.25) == pytest.approx(6.0206, abs=1e-4)
    assert psnr(flat(10), flat(11)) == pytest.approx(20 * math.log10(255))


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        mse(flat(0, 8, 8), flat(0, 8, 9))
    with pytest.raises(DimensionMismatch):
        ssim(flat(0, 8, 8), flat(0, 9, 8))
    with pytest.raises(DimensionMismatch):
        compare_histograms(flat(0, 8, 8), flat(0, 9, 8))


# ---------------------------------------------------------------------------
# SSIM
# ---------------------------------------------------------------------------

def test_ssim_identical_is_one():
    img = textured_cover(20, 16)
    assert ssim(img, img) == pytest.approx(1.0, abs=1e-12)


def test_ssim_black_vs_white():
    expected = SSIM_C1 / (255 ** 2 + SSIM_C1)
    assert ssim(flat(0), flat(255)) == pytest.approx(expected, rel=1e-9)
    assert expected == pytest.approx(1.0001e-4, rel=1e-3)


def test_ssim_symmetric_and_bounded():
    a = noise_cover(16, 16, seed=1)
    b = noise_cover(16, 16, seed=2)
    assert ssim(a, b) == pytest.approx(ssim(b, a), abs=1e-12)
    assert -1.0 <= ssim(a, b) <= 1.0


def test_ssim_needs_a_full_window():
    with pytest.raises(ImageTooSmall):
        ssim(flat(0, 7, 20), flat(0, 7, 20))


@pytest.mark.parametrize("seed", range(10))
def test_metrics_match_brute_force(seed):
    rng = np.random.default_rng(seed)
    width, height = int(rng.integers(8, 20)), int(rng.integers(8, 20))
    a = noise_cover(width, height, seed=100 + seed)
    b = perturbed(a, count=int(rng.integers(1, a.value_count)), seed=seed, max_delta=int(rng.integers(1, 40)))

    assert mse(a, b) == pytest.approx(brute_mse(a.pixels, b.pixels), rel=1e-9)
    assert psnr(a, b) == pytest.approx(brute_psnr(a.pixels, b.pixels), rel=1e-9)
    assert ssim(a, b) == pytest.approx(brute_ssim(a.pixels.astype(float), b.pixels.astype(float)), rel=1e-9)


def test_lsb_stego_ssim_near_one():
    cover = textured_cover(64, 64, seed=4)
    stego = perturbed(cover, count=200, seed=4)
    assert ssim(cover, stego) > 0.995


# ---------------------------------------------------------------------------
# Histograms
# ---------------------------------------------------------------------------

def test_histograms_identical():
    img = noise_cover(12, 12)
    for distance in compare_histograms(img, img).values():
        assert distance.l1 == 0
        assert distance.chi_square == 0.0


def test_histogram_single_move():
    a = flat(100, 8, 8)
    b = a.with_values(np.array([0]), np.array([101]))  # red of pixel 0
    distances = compare_histograms(a, b)
    assert distances["red"].l1 == 2
    assert distances["green"].l1 == 0
    # bins 100 (64 vs 63) and 101 (0 vs 1)
    assert distances["red"].chi_square == pytest.approx(1 / 127 + 1.0)


def test_histogram_lsb_flips_bounded():
    img = noise_cover(32, 32, seed=8)
    k = 50
    green_positions = np.arange(k) * 3 + 1
    flipped = img.flat_values()[green_positions] ^ 1
    distances = compare_histograms(img, img.with_values(green_positions, flipped))
    assert distances["green"].l1 <= 2 * k
    assert distances["red"].l1 == 0
    assert distances["blue"].l1 == 0


# ---------------------------------------------------------------------------
# QualityReport
# ---------------------------------------------------------------------------

def test_report_identical_renders_inf():
    img = textured_cover(16, 16)
    report = quality_report(img, img)
    assert report.identical
    flat_report = report.to_flat_dict()
    assert flat_report["psnr"] == "inf"
    assert flat_report["mse"] == 0.0
    assert flat_report["ssim"] == pytest.approx(1.0)
    assert json.loads(report.to_json())["psnr"] == "inf"
    assert report.to_csv_row().split(",")[1] == "inf"


def test_report_csv_layout():
    cover = noise_cover(16, 16, seed=3)
    report = quality_report(cover, perturbed(cover, 30, seed=3))
    assert report.csv_header() == ",".join(CSV_COLUMNS)
    cells = report.to_csv_row().split(",")
    assert len(cells) == len(CSV_COLUMNS)
    assert float(cells[1]) == pytest.approx(report.psnr)
    assert "PSNR=" in report.summary_line()


# ---------------------------------------------------------------------------
# CoverReference
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("seed", range(5))
def test_cover_reference_matches_full_metrics(seed):
    cover = textured_cover(24, 20, seed=seed)
    rng = np.random.default_rng(seed)
    positions = rng.choice(cover.value_count, size=60, replace=False)
    values = rng.integers(0, 256, size=60)
    stego = cover.with_values(positions, values)

    scored = CoverReference(cover).score_changes(positions, values)
    assert scored.mse == pytest.approx(mse(cover, stego), rel=1e-12)
    assert scored.psnr == pytest.approx(psnr(cover, stego), rel=1e-12)
    assert scored.ssim == pytest.approx(ssim(cover, stego), abs=1e-12)


def test_cover_reference_no_change():
    cover = noise_cover(8, 8)
    positions = np.array([0, 5])
    scored = CoverReference(cover).score_changes(positions, cover.flat_values()[positions])
    assert scored == (0.0, math.inf, 1.0)
