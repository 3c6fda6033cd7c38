"""
Stego engine: optimizer positions -> embedding plans, LSB embed/extract,
the SSIM/PSNR fitness, key files and the end-to-end hide/recover pipelines.

Key file layout (little-endian):

    magic "SHWK-KEY" (8) | version u16 | width u32 | height u32 | lsb_depth u8 |
    reserved u8 | payload_bit_length u64 | slot_count u64 |
    slot_count x (pixel_index u32, channel u8) | crc32 of all preceding bytes u32
"""
from __future__ import annotations

import json
import struct
import time
import zlib
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Literal, NamedTuple, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from config.settings import (
    DEFAULT_ALPHA,
    DEFAULT_BLOCK_SIZE,
    DEFAULT_HAWKS,
    DEFAULT_LEVY_BETA,
    DEFAULT_LSB_DEPTH,
    DEFAULT_MAX_ITERATIONS,
    DEFAULT_SEED,
    DEFAULT_STAGNATION_EPSILON,
    DEFAULT_STAGNATION_WINDOW,
    DEFAULT_TOP_FRACTION,
    DEFAULT_WORKERS,
)
from src.audio_codec import FRAME_HEADER, AudioPayload, BitStream, deframe_payload, frame_payload
from src.errors import (
    BadMagic,
    CapacityExceeded,
    ChecksumMismatch,
    EmptyCandidateSet,
    InputError,
    InvalidParameter,
    KeyMismatch,
    LengthMismatch,
    MalformedKey,
    PlanInfeasible,
    SlotOutOfBounds,
    VersionMismatch,
)
from src.image_store import CandidateSet, RasterImage, block_variance_map, candidate_positions
from src.logger_config import get_logger
from src.optimizer_core import OptimizationResult, OptimizerParams, SearchProblem, get_optimizer
from src.quality_metrics import CoverReference, QualityReport, quality_report

logger = get_logger("stego_engine")

SUPPORTED_LSB_DEPTHS = (1, 2)
PSNR_CAP = 100.0

KEY_MAGIC = b"SHWK-KEY"
KEY_VERSION = 1
KEY_HEADER = struct.Struct("<8sHIIBBQQ")
KEY_CRC = struct.Struct("<I")
KEY_SLOT_DTYPE = np.dtype([("pixel", "<u4"), ("channel", "u1")])
KEY_MIN_SIZE = KEY_HEADER.size + KEY_CRC.size


def _check_depth(lsb_depth: int) -> int:
    if lsb_depth not in SUPPORTED_LSB_DEPTHS:
        raise InvalidParameter(f"lsb_depth must be 1 or 2, got {lsb_depth}")
    return int(lsb_depth)


def slots_needed(n_bits: int, lsb_depth: int) -> int:
    """ceil(n_bits / lsb_depth)"""
    return -(-int(n_bits) // int(lsb_depth))


@dataclass(frozen=True, eq=False)
class EmbeddingPlan:
    """Ordered, distinct (pixel_index, channel) slots plus the bits written per slot."""

    pixel_indices: np.ndarray
    channels: np.ndarray
    lsb_depth: int

    def __post_init__(self):
        _check_depth(self.lsb_depth)
        pixel_indices = np.asarray(self.pixel_indices, dtype=np.int64).reshape(-1)
        channels = np.asarray(self.channels, dtype=np.uint8).reshape(-1)
        if pixel_indices.shape != channels.shape:
            raise InvalidParameter("pixel_indices and channels must have the same length")
        pixel_indices.setflags(write=False)
        channels.setflags(write=False)
        object.__setattr__(self, "pixel_indices", pixel_indices)
        object.__setattr__(self, "channels", channels)

    @property
    def slot_count(self) -> int:
        return int(self.pixel_indices.size)

    @property
    def capacity_bits(self) -> int:
        return self.slot_count * self.lsb_depth

    @property
    def flat_indices(self) -> np.ndarray:
        return self.pixel_indices * 3 + self.channels

    def __len__(self) -> int:
        return self.slot_count

    def slots(self) -> list:
        return list(zip(self.pixel_indices.tolist(), self.channels.tolist()))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EmbeddingPlan):
            return NotImplemented
        return (
            self.lsb_depth == other.lsb_depth
            and np.array_equal(self.pixel_indices, other.pixel_indices)
            and np.array_equal(self.channels, other.channels)
        )


class FitnessConfig(BaseModel):
    model_config = ConfigDict(extra='forbid', frozen=True)

    alpha: float = Field(default=DEFAULT_ALPHA, ge=0.0, le=1.0)


@dataclass(frozen=True, eq=False)
class StegoKey:
    """Everything the receiver needs to pull the payload back out of a stego image."""

    width: int
    height: int
    lsb_depth: int
    payload_bit_length: int
    pixel_indices: np.ndarray
    channels: np.ndarray
    version: int = KEY_VERSION

    def __post_init__(self):
        plan = EmbeddingPlan(self.pixel_indices, self.channels, self.lsb_depth)
        object.__setattr__(self, "pixel_indices", plan.pixel_indices)
        object.__setattr__(self, "channels", plan.channels)
        if plan.slot_count != slots_needed(self.payload_bit_length, self.lsb_depth):
            raise InvalidParameter(
                f"key holds {plan.slot_count} slots but {self.payload_bit_length} bits at depth "
                f"{self.lsb_depth} need {slots_needed(self.payload_bit_length, self.lsb_depth)}"
            )

    @classmethod
    def from_plan(cls, plan: EmbeddingPlan, image_dims: Tuple[int, int], payload_bit_length: int) -> "StegoKey":
        width, height = image_dims
        return cls(
            width=width,
            height=height,
            lsb_depth=plan.lsb_depth,
            payload_bit_length=payload_bit_length,
            pixel_indices=plan.pixel_indices,
            channels=plan.channels,
        )

    @property
    def image_dims(self) -> Tuple[int, int]:
        return self.width, self.height

    @property
    def plan(self) -> EmbeddingPlan:
        return EmbeddingPlan(self.pixel_indices, self.channels, self.lsb_depth)

    @property
    def slot_count(self) -> int:
        return int(self.pixel_indices.size)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StegoKey):
            return NotImplemented
        return (
            self.version == other.version
            and self.image_dims == other.image_dims
            and self.payload_bit_length == other.payload_bit_length
            and self.plan == other.plan
        )


# ---------------------------------------------------------------------------
# Plans and LSB substitution
# ---------------------------------------------------------------------------

def _next_unused_slots(indices: np.ndarray, count: int) -> np.ndarray:
    """Replace repeats by the next unused index upward (wrapping), in coordinate order."""
    if np.unique(indices).size == indices.size:
        return indices

    # next_free[i] points toward the next candidate to try once i is taken
    next_free: Dict[int, int] = {}

    def find(i: int) -> int:
        root = i
        while root in next_free:
            root = next_free[root]
        while i in next_free and next_free[i] != root:
            next_free[i], i = root, next_free[i]
        return root

    resolved = np.empty_like(indices)
    for k, index in enumerate(indices.tolist()):
        slot = find(index)
        resolved[k] = slot
        next_free[slot] = (slot + 1) % count
    return resolved


def decode_plan(position: np.ndarray, candidates: CandidateSet, lsb_depth: int) -> EmbeddingPlan:
    """
    Map an optimizer position to distinct candidate slots.

    Each coordinate is rounded half-up to a candidate index and clamped to
    [0, count - 1]; an index already taken moves to the next free one upward,
    wrapping at the end.

    Args:
        position: Real-valued optimizer vector, one coordinate per slot
        candidates: Ordered candidate (pixel, channel) slots of the cover
        lsb_depth: Bits written per slot, 1 or 2

    Returns:
        EmbeddingPlan whose slots follow coordinate order and never repeat

    Raises:
        PlanInfeasible: more coordinates than candidates
        EmptyCandidateSet: no candidates
        InvalidParameter: lsb_depth outside {1, 2} or a non-finite coordinate
    """
    _check_depth(lsb_depth)
    count = len(candidates)
    if count == 0:
        raise EmptyCandidateSet("cannot decode a plan over an empty candidate set")
    position = np.asarray(position, dtype=np.float64).reshape(-1)
    if position.size > count:
        raise PlanInfeasible(f"position has {position.size} coordinates but only {count} candidate slots exist")
    if not np.all(np.isfinite(position)):
        raise InvalidParameter("position contains non-finite coordinates")

    indices = np.clip(np.floor(position + 0.5), 0, count - 1).astype(np.int64)
    indices = _next_unused_slots(indices, count)
    return EmbeddingPlan(
        pixel_indices=candidates.pixel_indices[indices],
        channels=candidates.channels[indices],
        lsb_depth=lsb_depth,
    )


def _check_plan_bounds(plan: EmbeddingPlan, img: RasterImage) -> None:
    if plan.slot_count == 0:
        return
    pixel_count = img.width * img.height
    if plan.pixel_indices.min() < 0 or plan.pixel_indices.max() >= pixel_count or plan.channels.max() > 2:
        raise SlotOutOfBounds(f"plan references slots outside a {img.width}x{img.height} image")


def _substituted_values(values: np.ndarray, bits: np.ndarray, lsb_depth: int) -> np.ndarray:
    """New values for the leading slots after writing bits MSB-first into their low bits"""
    used = slots_needed(bits.size, lsb_depth)
    groups = np.zeros(used * lsb_depth, dtype=np.uint8)
    groups[: bits.size] = bits
    groups = groups.reshape(used, lsb_depth).astype(np.int64)
    shifts = np.arange(lsb_depth - 1, -1, -1, dtype=np.int64)
    payload = (groups << shifts).sum(axis=1)

    masks = np.full(used, (1 << lsb_depth) - 1, dtype=np.int64)
    remainder = bits.size - (used - 1) * lsb_depth
    if used and remainder < lsb_depth:
        # partial last group fills the higher bits only
        masks[-1] = ((1 << remainder) - 1) << (lsb_depth - remainder)
    original = values[:used].astype(np.int64)
    return ((original & ~masks) | (payload & masks)).astype(np.uint8)


def planned_changes(cover: RasterImage, plan: EmbeddingPlan, bits: BitStream) -> Tuple[np.ndarray, np.ndarray]:
    """(flat_indices, new_values) that embed_bits would write, without copying the image."""
    if bits.length > plan.capacity_bits:
        raise CapacityExceeded(bits.length, plan.capacity_bits, "plan too small")
    _check_plan_bounds(plan, cover)
    used = slots_needed(bits.length, plan.lsb_depth)
    flat_indices = plan.flat_indices[:used]
    values = cover.flat_values()[flat_indices]
    return flat_indices, _substituted_values(values, bits.bits, plan.lsb_depth)


def embed_bits(cover: RasterImage, plan: EmbeddingPlan, bits: BitStream) -> RasterImage:
    """
    Write bits into the low lsb_depth bits of each planned slot, in plan order.

    Raises:
        CapacityExceeded: more bits than the plan can hold
        SlotOutOfBounds: plan points outside the cover
    """
    flat_indices, new_values = planned_changes(cover, plan, bits)
    return cover.with_values(flat_indices, new_values)


def extract_bits(stego: RasterImage, plan: EmbeddingPlan, n_bits: int) -> BitStream:
    """Read n_bits back from the planned slots (inverse of embed_bits)."""
    if n_bits < 0:
        raise InvalidParameter(f"n_bits must be >= 0, got {n_bits}")
    if n_bits > plan.capacity_bits:
        raise CapacityExceeded(n_bits, plan.capacity_bits, "plan too small")
    _check_plan_bounds(plan, stego)
    used = slots_needed(n_bits, plan.lsb_depth)
    values = stego.flat_values()[plan.flat_indices[:used]].astype(np.uint8)
    shifts = np.arange(plan.lsb_depth - 1, -1, -1, dtype=np.uint8)
    bits = (values[:, None] >> shifts[None, :]) & 1
    return BitStream(bits.reshape(-1)[:n_bits])


def capacity(candidates: CandidateSet, lsb_depth: int) -> int:
    return len(candidates) * _check_depth(lsb_depth)


# ---------------------------------------------------------------------------
# Fitness
# ---------------------------------------------------------------------------

def combined_fitness(ssim_value: float, psnr_value: float, alpha: float) -> float:
    """Z = alpha * SSIM + (1 - alpha) * min(PSNR, 100) / 100"""
    return alpha * ssim_value + (1.0 - alpha) * min(psnr_value, PSNR_CAP) / PSNR_CAP


class FitnessEvaluator:
    """
    Objective for the optimizer: decode, simulate the embedding sparsely and
    score it against a precomputed cover reference. Holds only read-only state,
    so one instance can serve concurrent evaluations.
    """

    def __init__(
        self,
        reference: CoverReference,
        candidates: CandidateSet,
        bits: BitStream,
        config: FitnessConfig,
        lsb_depth: int,
    ):
        if candidates.source_dims != reference.cover.dims:
            raise InvalidParameter(
                f"candidates were selected on a {candidates.width}x{candidates.height} image, "
                f"cover is {reference.cover.width}x{reference.cover.height}"
            )
        self.reference = reference
        self.candidates = candidates
        self.bits = bits
        self.config = config
        self.lsb_depth = _check_depth(lsb_depth)

    def __call__(self, position: np.ndarray) -> float:
        plan = decode_plan(position, self.candidates, self.lsb_depth)
        flat_indices, new_values = planned_changes(self.reference.cover, plan, self.bits)
        _, psnr_value, ssim_value = self.reference.score_changes(flat_indices, new_values)
        return combined_fitness(ssim_value, psnr_value, self.config.alpha)


def fitness(
    cover: RasterImage,
    candidates: CandidateSet,
    position: np.ndarray,
    bits: BitStream,
    config: FitnessConfig,
    lsb_depth: int,
) -> float:
    """One-off fitness evaluation; the pipeline reuses a FitnessEvaluator instead."""
    return FitnessEvaluator(CoverReference(cover), candidates, bits, config, lsb_depth)(position)


# ---------------------------------------------------------------------------
# Pipelines
# ---------------------------------------------------------------------------

class PipelineSettings(BaseModel):
    """Everything that determines an embedding run besides its inputs."""

    model_config = ConfigDict(extra='forbid', frozen=True)

    optimizer: Literal["hho", "random"] = "hho"
    alpha: float = Field(default=DEFAULT_ALPHA, ge=0.0, le=1.0)
    hawks: int = Field(default=DEFAULT_HAWKS, ge=2)
    max_iterations: int = Field(default=DEFAULT_MAX_ITERATIONS, ge=1)
    seed: int = Field(default=DEFAULT_SEED, ge=0)
    lsb_depth: int = DEFAULT_LSB_DEPTH
    block_size: int = Field(default=DEFAULT_BLOCK_SIZE, ge=1)
    variance_top_fraction: float = Field(default=DEFAULT_TOP_FRACTION, gt=0.0, le=1.0)
    stagnation_window: Optional[int] = Field(default=DEFAULT_STAGNATION_WINDOW, ge=1)
    stagnation_epsilon: float = Field(default=DEFAULT_STAGNATION_EPSILON, ge=0.0)
    levy_beta: float = Field(default=DEFAULT_LEVY_BETA, gt=1.0, le=2.0)
    workers: int = Field(default=DEFAULT_WORKERS, ge=1)
    max_evaluations: Optional[int] = Field(default=None, ge=1)

    @field_validator("lsb_depth")
    @classmethod
    def validate_lsb_depth(cls, v: int) -> int:
        if v not in SUPPORTED_LSB_DEPTHS:
            raise ValueError(f"lsb_depth must be 1 or 2, got {v}")
        return v

    def optimizer_params(self) -> OptimizerParams:
        return OptimizerParams(
            population_size=self.hawks,
            max_iterations=self.max_iterations,
            stagnation_window=self.stagnation_window,
            stagnation_epsilon=self.stagnation_epsilon,
            levy_beta=self.levy_beta,
            seed=self.seed,
            max_evaluations=self.max_evaluations,
            workers=self.workers,
        )

    def fitness_config(self) -> FitnessConfig:
        return FitnessConfig(alpha=self.alpha)


@dataclass(frozen=True)
class EmbeddingReport:
    """Quality metrics, optimizer outcome and payload summary of one embedding run."""

    quality: QualityReport
    optimization: OptimizationResult
    settings: PipelineSettings
    payload_bits: int
    capacity_bits: int
    dimension: int
    candidate_count: int
    elapsed_ms: float

    @property
    def utilization(self) -> float:
        return self.payload_bits / self.capacity_bits if self.capacity_bits else 0.0

    @property
    def psnr(self) -> float:
        return self.quality.psnr

    @property
    def ssim(self) -> float:
        return self.quality.ssim

    def to_dict(self) -> Dict[str, object]:
        return {
            "quality": self.quality.to_flat_dict(),
            "optimizer": {
                **self.optimization.summary(),
                "history": list(self.optimization.history),
            },
            "payload": {
                "payload_bits": self.payload_bits,
                "capacity_bits": self.capacity_bits,
                "utilization": self.utilization,
                "dimension": self.dimension,
                "candidate_count": self.candidate_count,
            },
            "settings": self.settings.model_dump(),
            "elapsed_ms": self.elapsed_ms,
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @staticmethod
    def csv_header() -> str:
        return ",".join((
            QualityReport.csv_header(),
            "optimizer,best_fitness,iterations_run,evaluations,stop_reason",
            "payload_bits,capacity_bits,seed,elapsed_ms",
        ))

    def to_csv_row(self) -> str:
        result = self.optimization
        return ",".join((
            self.quality.to_csv_row(),
            f"{result.optimizer},{result.best_fitness!r},{result.iterations_run},{result.evaluations},{result.stop_reason}",
            f"{self.payload_bits},{self.capacity_bits},{self.settings.seed},{self.elapsed_ms:.1f}",
        ))


class EmbeddingOutcome(NamedTuple):
    stego: RasterImage
    key: StegoKey
    report: EmbeddingReport


def run_embedding(
    cover: RasterImage,
    audio: AudioPayload,
    settings: Optional[PipelineSettings] = None,
) -> EmbeddingOutcome:
    """
    Hide audio in cover: select candidates, frame, optimize slot placement,
    embed and measure.

    Args:
        cover: Lossless RGB cover image
        audio: Parsed WAV payload to hide
        settings: Pipeline parameters; defaults come from config.settings

    Returns:
        EmbeddingOutcome with the stego image, the key needed for extraction
        and an EmbeddingReport (quality, optimizer trace, capacity use)

    Raises:
        CapacityExceeded: framed payload larger than the candidate capacity
        EmptyCandidateSet: variance selection yielded nothing
        InvalidParameter: unknown optimizer name
    """
    settings = settings or PipelineSettings()
    started = time.perf_counter()

    vmap = block_variance_map(cover, settings.block_size)
    candidates = candidate_positions(vmap, cover, settings.variance_top_fraction)
    available = capacity(candidates, settings.lsb_depth)
    required = (FRAME_HEADER.size + len(audio.data)) * 8
    if required > available:
        raise CapacityExceeded(
            required, available,
            f"{len(candidates)} candidate slots at lsb_depth {settings.lsb_depth}",
        )

    bits = frame_payload(audio)

    dimension = slots_needed(bits.length, settings.lsb_depth)
    logger.info(
        f"Embedding {bits.length} bits into {cover.width}x{cover.height} cover: "
        f"{len(candidates)} candidates, dimension {dimension}, optimizer {settings.optimizer}"
    )

    evaluator = FitnessEvaluator(
        CoverReference(cover), candidates, bits, settings.fitness_config(), settings.lsb_depth
    )
    problem = SearchProblem.box(evaluator, dimension, 0.0, float(len(candidates) - 1))
    result = get_optimizer(settings.optimizer)(problem, settings.optimizer_params())

    plan = decode_plan(result.best_position, candidates, settings.lsb_depth)
    stego = embed_bits(cover, plan, bits)
    key = StegoKey.from_plan(plan, cover.dims, bits.length)
    quality = quality_report(cover, stego)
    elapsed_ms = (time.perf_counter() - started) * 1000.0

    report = EmbeddingReport(
        quality=quality,
        optimization=result,
        settings=settings,
        payload_bits=bits.length,
        capacity_bits=available,
        dimension=dimension,
        candidate_count=len(candidates),
        elapsed_ms=elapsed_ms,
    )
    logger.info(f"Embedding finished: {quality.summary_line()} fitness={result.best_fitness:.6f}")
    return EmbeddingOutcome(stego=stego, key=key, report=report)


def run_extraction(stego: RasterImage, key: StegoKey) -> AudioPayload:
    """
    Recover the audio hidden by run_embedding.

    Raises:
        KeyMismatch: key was made for an image of different dimensions
        ChecksumMismatch / BadMagic / LengthMismatch: wrong image, wrong key or corruption
    """
    if key.image_dims != stego.dims:
        raise KeyMismatch(
            f"key is for a {key.width}x{key.height} image, stego image is {stego.width}x{stego.height}"
        )
    bits = extract_bits(stego, key.plan, key.payload_bit_length)
    try:
        audio = deframe_payload(bits)
    except (BadMagic, LengthMismatch, VersionMismatch) as e:
        # garbage bits from a foreign key or image rarely even carry the magic
        raise ChecksumMismatch(f"payload does not verify ({e}): wrong key or corrupted stego image") from e
    logger.info(f"Extracted {len(audio.data)} audio bytes ({audio.duration_seconds:.3f} s)")
    return audio


# ---------------------------------------------------------------------------
# Key serialization
# ---------------------------------------------------------------------------

def write_key(key: StegoKey) -> bytes:
    if key.slot_count and key.pixel_indices.max() >= 2 ** 32:
        raise InvalidParameter("pixel index does not fit the 32-bit key field")
    header = KEY_HEADER.pack(
        KEY_MAGIC,
        key.version,
        key.width,
        key.height,
        key.lsb_depth,
        0,
        key.payload_bit_length,
        key.slot_count,
    )
    slots = np.empty(key.slot_count, dtype=KEY_SLOT_DTYPE)
    slots["pixel"] = key.pixel_indices
    slots["channel"] = key.channels
    body = header + slots.tobytes()
    return body + KEY_CRC.pack(zlib.crc32(body) & 0xFFFFFFFF)


def read_key(raw: bytes) -> StegoKey:
    """
    Parse a key file.

    Raises:
        MalformedKey: wrong size, magic or field values
        VersionMismatch: unknown key version
        ChecksumMismatch: body CRC does not match
    """
    raw = bytes(raw)
    if len(raw) < KEY_MIN_SIZE or raw[: len(KEY_MAGIC)] != KEY_MAGIC:
        raise MalformedKey("not a stego key (bad magic or too short)")

    _, version, width, height, lsb_depth, _, payload_bits, slot_count = KEY_HEADER.unpack_from(raw, 0)
    if version != KEY_VERSION:
        raise VersionMismatch(f"key version {version} is not supported (expected {KEY_VERSION})")

    expected_size = KEY_MIN_SIZE + slot_count * KEY_SLOT_DTYPE.itemsize
    if len(raw) != expected_size:
        raise MalformedKey(f"key declares {slot_count} slots ({expected_size} bytes) but is {len(raw)} bytes")

    body = raw[: -KEY_CRC.size]
    (stored_crc,) = KEY_CRC.unpack_from(raw, len(body))
    if zlib.crc32(body) & 0xFFFFFFFF != stored_crc:
        raise ChecksumMismatch("key checksum mismatch: key file is corrupted")

    slots = np.frombuffer(body, dtype=KEY_SLOT_DTYPE, offset=KEY_HEADER.size)
    if lsb_depth not in SUPPORTED_LSB_DEPTHS:
        raise MalformedKey(f"key lsb_depth {lsb_depth} is not 1 or 2")
    if slot_count and slots["channel"].max() > 2:
        raise MalformedKey("key contains a channel index above 2")
    if slot_count != slots_needed(payload_bits, lsb_depth):
        raise MalformedKey(f"key has {slot_count} slots for {payload_bits} payload bits at depth {lsb_depth}")

    return StegoKey(
        width=width,
        height=height,
        lsb_depth=lsb_depth,
        payload_bit_length=payload_bits,
        pixel_indices=slots["pixel"].astype(np.int64),
        channels=slots["channel"].astype(np.uint8),
        version=version,
    )


def read_key_file(path: Union[str, Path]) -> StegoKey:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise InputError(f"{path}: cannot read key file: {e.strerror or e}") from e
    try:
        return read_key(raw)
    except MalformedKey as e:
        raise MalformedKey(f"{path}: {e}") from e


def write_key_file(path: Union[str, Path], key: StegoKey) -> None:
    path = Path(path)
    try:
        path.write_bytes(write_key(key))
    except OSError as e:
        raise InputError(f"{path}: cannot write key file: {e.strerror or e}") from e
    logger.info(f"Wrote key {path} ({key.slot_count} slots)")
