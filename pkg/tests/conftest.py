"""
Shared fixtures for the Stego-Hawk test suite.

Long acceptance runs are marked @pytest.mark.slow and only run with
STEGO_HAWK_RUN_SLOW=1.
"""
import os
import sys
from pathlib import Path

import pytest

# Keep test runs from writing log files into the project tree
os.environ.setdefault("STEGO_HAWK_LOG_TO_FILE", "false")

project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from src.audio_codec import AudioPayload, write_wav  # noqa: E402
from src.image_store import RasterImage, save_image  # noqa: E402
from tests.helpers import make_audio, noise_cover  # noqa: E402


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long acceptance run (set STEGO_HAWK_RUN_SLOW=1)")


def pytest_collection_modifyitems(config, items):
    if os.getenv("STEGO_HAWK_RUN_SLOW") == "1":
        return
    skip_slow = pytest.mark.skip(reason="slow acceptance run; set STEGO_HAWK_RUN_SLOW=1")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def small_cover() -> RasterImage:
    return noise_cover(32, 32, seed=7)


@pytest.fixture
def small_audio() -> AudioPayload:
    return make_audio(12, seed=3)


@pytest.fixture
def cover_file(tmp_path, small_cover) -> Path:
    path = tmp_path / "cover.png"
    path.write_bytes(save_image(small_cover))
    return path


@pytest.fixture
def audio_file(tmp_path, small_audio) -> Path:
    path = tmp_path / "clip.wav"
    path.write_bytes(write_wav(small_audio))
    return path


@pytest.fixture
def fast_settings():
    from src.stego_engine import PipelineSettings

    return PipelineSettings(hawks=6, max_iterations=8, seed=11, stagnation_window=None)
