"""
WAV audio parsing/serialization and payload framing.

The framed bitstream is what gets hidden in the cover image:

    header (24 bytes, little-endian) || PCM data bytes

    magic "SHWK" | version u8 | reserved u8 | sample_rate u32 | channels u16 |
    bits_per_sample u16 | data_len u32 | crc32(data) u32 | reserved u16

serialized most-significant-bit first per byte. The header carries the audio
format so the receiver can rebuild the WAV without side information.
"""
from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from src.errors import (
    BadMagic,
    ChecksumMismatch,
    InputError,
    LengthMismatch,
    MalformedContainer,
    PayloadTooLarge,
    UnsupportedFormat,
    VersionMismatch,
)
from src.logger_config import get_logger

logger = get_logger("audio_codec")

FRAME_MAGIC = b"SHWK"
FRAME_VERSION = 1
FRAME_HEADER = struct.Struct("<4sBBIHHIIH")
FRAME_HEADER_BITS = FRAME_HEADER.size * 8

RIFF_HEADER = struct.Struct("<4sI4s")
CHUNK_HEADER = struct.Struct("<4sI")
FMT_BODY = struct.Struct("<HHIIHH")
CANONICAL_HEADER = struct.Struct("<4sI4s4sIHHIIHH4sI")

WAVE_FORMAT_PCM = 1
SUPPORTED_CHANNELS = (1, 2)
SUPPORTED_BITS = (8, 16)


class AudioPayload(BaseModel):
    """Decoded PCM audio: format metadata plus raw sample bytes."""

    model_config = ConfigDict(extra='forbid', frozen=True)

    sample_rate: int = Field(gt=0)
    channels: int
    bits_per_sample: int
    data: bytes = b""

    @field_validator("channels")
    @classmethod
    def validate_channels(cls, v: int) -> int:
        if v not in SUPPORTED_CHANNELS:
            raise ValueError(f"channels must be 1 or 2, got {v}")
        return v

    @field_validator("bits_per_sample")
    @classmethod
    def validate_bits(cls, v: int) -> int:
        if v not in SUPPORTED_BITS:
            raise ValueError(f"bits_per_sample must be 8 or 16, got {v}")
        return v

    @model_validator(mode="after")
    def validate_alignment(self) -> "AudioPayload":
        if len(self.data) % self.block_align:
            raise ValueError(
                f"data length {len(self.data)} is not a multiple of the block alignment {self.block_align}"
            )
        return self

    @property
    def block_align(self) -> int:
        return self.channels * (self.bits_per_sample // 8)

    @property
    def frame_count(self) -> int:
        return len(self.data) // self.block_align

    @property
    def duration_seconds(self) -> float:
        return self.frame_count / self.sample_rate


@dataclass(frozen=True, eq=False)
class BitStream:
    """Ordered bit sequence; bits is a uint8 array of 0/1 values."""

    bits: np.ndarray

    def __post_init__(self):
        bits = np.ascontiguousarray(self.bits, dtype=np.uint8).reshape(-1)
        if bits.size and bits.max() > 1:
            raise ValueError("BitStream values must be 0 or 1")
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    @property
    def length(self) -> int:
        return int(self.bits.size)

    def __len__(self) -> int:
        return self.length

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitStream):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)

    def __repr__(self) -> str:
        return f"BitStream(length={self.length})"

    @classmethod
    def from_bytes(cls, data: bytes) -> "BitStream":
        return cls(np.unpackbits(np.frombuffer(data, dtype=np.uint8)))

    @classmethod
    def from_string(cls, text: str) -> "BitStream":
        """Build from a '0'/'1' string, e.g. BitStream.from_string('1101')"""
        return cls(np.array([int(ch) for ch in text], dtype=np.uint8))

    def to_bytes(self) -> bytes:
        """Pack MSB-first; a trailing partial byte is zero-padded"""
        return np.packbits(self.bits).tobytes()

    def to_string(self) -> str:
        return "".join("1" if b else "0" for b in self.bits.tolist())


def parse_wav(raw: bytes) -> AudioPayload:
    """
    Parse a RIFF/WAVE PCM file.

    Chunks other than 'fmt ' and 'data' are skipped (RIFF pad bytes honored).

    Raises:
        MalformedContainer: bad magic, truncated chunk, missing fmt/data chunk
        UnsupportedFormat: non-PCM, bit depth not 8/16, channel count not 1/2
    """
    raw = bytes(raw)
    if len(raw) < RIFF_HEADER.size:
        raise MalformedContainer(f"WAV too short: {len(raw)} bytes")

    riff, _, wave = RIFF_HEADER.unpack_from(raw, 0)
    if riff != b"RIFF" or wave != b"WAVE":
        raise MalformedContainer(f"not a RIFF/WAVE container (magic {riff!r}/{wave!r})")

    fmt = None
    data = None
    offset = RIFF_HEADER.size
    while offset + CHUNK_HEADER.size <= len(raw) and (fmt is None or data is None):
        chunk_id, size = CHUNK_HEADER.unpack_from(raw, offset)
        body_start = offset + CHUNK_HEADER.size
        body_end = body_start + size
        if body_end > len(raw):
            raise MalformedContainer(
                f"chunk {chunk_id!r} truncated: declares {size} bytes, {len(raw) - body_start} present"
            )

        if chunk_id == b"fmt ":
            if size < FMT_BODY.size:
                raise MalformedContainer(f"fmt chunk too short: {size} bytes")
            fmt = FMT_BODY.unpack_from(raw, body_start)
        elif chunk_id == b"data":
            data = raw[body_start:body_end]
        else:
            logger.debug(f"Skipping WAV chunk {chunk_id!r} ({size} bytes)")

        offset = body_end + (size & 1)

    if fmt is None:
        raise MalformedContainer("WAV has no fmt chunk")
    if data is None:
        raise MalformedContainer("WAV has no data chunk")

    format_tag, channels, sample_rate, _, _, bits_per_sample = fmt
    if format_tag != WAVE_FORMAT_PCM:
        raise UnsupportedFormat(f"only PCM (format tag 1) is supported, got format tag {format_tag}")
    if channels not in SUPPORTED_CHANNELS:
        raise UnsupportedFormat(f"only mono or stereo is supported, got {channels} channels")
    if bits_per_sample not in SUPPORTED_BITS:
        raise UnsupportedFormat(f"only 8 or 16-bit PCM is supported, got {bits_per_sample}-bit")
    if sample_rate == 0:
        raise UnsupportedFormat("sample rate is zero")

    block_align = channels * bits_per_sample // 8
    if len(data) % block_align:
        raise MalformedContainer(
            f"data chunk length {len(data)} is not a multiple of the block alignment {block_align}"
        )

    payload = AudioPayload(
        sample_rate=sample_rate,
        channels=channels,
        bits_per_sample=bits_per_sample,
        data=data,
    )
    logger.debug(
        f"Parsed WAV: {sample_rate} Hz, {channels} ch, {bits_per_sample}-bit, {len(data)} data bytes"
    )
    return payload


def write_wav(payload: AudioPayload) -> bytes:
    """Emit a canonical 44-byte-header PCM WAV (pad byte after odd-length data)."""
    data = payload.data
    pad = b"\x00" if len(data) & 1 else b""
    header = CANONICAL_HEADER.pack(
        b"RIFF",
        36 + len(data) + len(pad),
        b"WAVE",
        b"fmt ",
        FMT_BODY.size,
        WAVE_FORMAT_PCM,
        payload.channels,
        payload.sample_rate,
        payload.sample_rate * payload.block_align,
        payload.block_align,
        payload.bits_per_sample,
        b"data",
        len(data),
    )
    return header + data + pad


def frame_payload(payload: AudioPayload) -> BitStream:
    """Serialize header || data into an MSB-first bitstream of (24 + data_len) * 8 bits."""
    data_len = len(payload.data)
    if data_len >= 2 ** 32:
        raise PayloadTooLarge(f"audio data of {data_len} bytes exceeds the 32-bit frame length field")

    header = FRAME_HEADER.pack(
        FRAME_MAGIC,
        FRAME_VERSION,
        0,
        payload.sample_rate,
        payload.channels,
        payload.bits_per_sample,
        data_len,
        zlib.crc32(payload.data) & 0xFFFFFFFF,
        0,
    )
    stream = BitStream.from_bytes(header + payload.data)
    logger.debug(f"Framed {data_len} data bytes into {stream.length} bits")
    return stream


def deframe_payload(bits: BitStream) -> AudioPayload:
    """
    Recover the audio payload from a bitstream that begins with a frame.

    Trailing bits beyond the frame are ignored.

    Raises:
        BadMagic, VersionMismatch, LengthMismatch, ChecksumMismatch
    """
    n = bits.length
    magic_bits = len(FRAME_MAGIC) * 8
    if n < magic_bits:
        raise LengthMismatch(f"bitstream of {n} bits is shorter than the frame magic")
    if np.packbits(bits.bits[:magic_bits]).tobytes() != FRAME_MAGIC:
        raise BadMagic("bitstream does not start with the frame magic")
    if n < FRAME_HEADER_BITS:
        raise LengthMismatch(f"bitstream of {n} bits is shorter than the {FRAME_HEADER_BITS}-bit frame header")

    header = np.packbits(bits.bits[:FRAME_HEADER_BITS]).tobytes()
    _, version, _, sample_rate, channels, bits_per_sample, data_len, crc, _ = FRAME_HEADER.unpack(header)
    if version != FRAME_VERSION:
        raise VersionMismatch(f"frame version {version} is not supported (expected {FRAME_VERSION})")

    needed = FRAME_HEADER_BITS + data_len * 8
    if n < needed:
        raise LengthMismatch(f"frame declares {data_len} data bytes ({needed} bits) but only {n} bits are present")

    data = np.packbits(bits.bits[FRAME_HEADER_BITS:needed]).tobytes()
    actual_crc = zlib.crc32(data) & 0xFFFFFFFF
    if actual_crc != crc:
        raise ChecksumMismatch(
            f"payload CRC-32 mismatch (expected {crc:#010x}, got {actual_crc:#010x}): wrong key or corrupted stego image"
        )

    try:
        return AudioPayload(
            sample_rate=sample_rate,
            channels=channels,
            bits_per_sample=bits_per_sample,
            data=data,
        )
    except ValidationError as e:
        raise ChecksumMismatch(f"frame header carries an invalid audio format: {e.errors()[0]['msg']}") from e


def read_wav_file(path: Union[str, Path]) -> AudioPayload:
    """Read and parse a WAV file, naming the path in any error"""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise InputError(f"{path}: cannot read audio file: {e.strerror or e}") from e
    try:
        return parse_wav(raw)
    except InputError as e:
        raise type(e)(f"{path}: {e}") from e


def write_wav_file(path: Union[str, Path], payload: AudioPayload) -> None:
    path = Path(path)
    try:
        path.write_bytes(write_wav(payload))
    except OSError as e:
        raise InputError(f"{path}: cannot write audio file: {e.strerror or e}") from e
    logger.info(f"Wrote WAV {path} ({len(payload.data)} data bytes)")
