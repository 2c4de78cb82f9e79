"""Sample-accurate audio buffers and WAV (RIFF) file I/O.

Amplitudes live in [-1.0, 1.0] as float64. 16-bit PCM is mapped with a
fixed scale of 32768 in both directions so that write->read is the exact
identity for any value already on the 16-bit grid.
"""

from __future__ import annotations

import logging
import struct
from dataclasses import dataclass

import numpy as np

from .errors import (
    ChannelCountMismatch,
    IoError,
    MalformedWav,
    OutOfBounds,
    UnsupportedEncoding,
)

log = logging.getLogger(__name__)

CANONICAL_RATE = 16000

_PCM16_SCALE = 32768.0

_WAVE_FORMAT_PCM = 1
_WAVE_FORMAT_IEEE_FLOAT = 3
_WAVE_FORMAT_EXTENSIBLE = 0xFFFE


@dataclass(frozen=True, order=True)
class SampleInterval:
    """Half-open sample-index range [start, end)."""

    start: int
    end: int

    def __post_init__(self):
        if self.end <= self.start:
            raise ValueError(f"interval end must exceed start: [{self.start}, {self.end})")
        if self.start < 0:
            raise ValueError(f"interval start must be >= 0: {self.start}")

    def __len__(self) -> int:
        return self.end - self.start

    def contains(self, other: "SampleInterval") -> bool:
        return self.start <= other.start and other.end <= self.end

    def shift(self, offset: int) -> "SampleInterval":
        return SampleInterval(self.start + offset, self.end + offset)


@dataclass(frozen=True)
class AudioBuffer:
    """Immutable multi-channel PCM audio; data has shape (channels, samples)."""

    data: np.ndarray
    sample_rate: int

    def __init__(self, data: np.ndarray, sample_rate: int):
        data = np.asarray(data, dtype=np.float64)
        if data.ndim == 1:
            data = data[np.newaxis, :]
        if data.ndim != 2 or data.shape[0] < 1:
            raise ValueError("audio data must have shape (channels, samples)")
        if sample_rate <= 0:
            raise ValueError(f"sample rate must be positive: {sample_rate}")
        data = np.ascontiguousarray(data)
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "sample_rate", int(sample_rate))

    @property
    def channels(self) -> int:
        return self.data.shape[0]

    @property
    def n_samples(self) -> int:
        return self.data.shape[1]

    @property
    def duration_s(self) -> float:
        return self.n_samples / self.sample_rate

    def channel(self, i: int) -> np.ndarray:
        return self.data[i]

    def slice(self, interval: SampleInterval) -> "AudioBuffer":
        if interval.end > self.n_samples:
            raise OutOfBounds(f"{interval} exceeds buffer of {self.n_samples} samples")
        return AudioBuffer(self.data[:, interval.start:interval.end], self.sample_rate)


def _require_bytes(data: bytes, offset: int, count: int, what: str) -> bytes:
    if offset + count > len(data):
        raise MalformedWav(f"truncated WAV: expected {count} bytes for {what}")
    return data[offset:offset + count]


def read_wav(path) -> AudioBuffer:
    """Read a linear-PCM WAV file (16-bit int or 32-bit float) into a buffer."""
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc

    if len(raw) < 12 or raw[0:4] != b"RIFF" or raw[8:12] != b"WAVE":
        raise MalformedWav(f"{path}: missing RIFF/WAVE header")

    fmt = None
    data_chunk = None
    pos = 12
    while pos + 8 <= len(raw):
        chunk_id = raw[pos:pos + 4]
        (chunk_size,) = struct.unpack_from("<I", raw, pos + 4)
        body_start = pos + 8
        if chunk_id == b"fmt ":
            body = _require_bytes(raw, body_start, min(chunk_size, 16), "fmt chunk")
            if len(body) < 16:
                raise MalformedWav(f"{path}: fmt chunk too small")
            fmt = struct.unpack("<HHIIHH", body)
            if fmt[0] == _WAVE_FORMAT_EXTENSIBLE:
                # sub-format GUID starts 24 bytes into the chunk body
                sub = _require_bytes(raw, body_start + 24, 2, "extensible sub-format")
                fmt = (struct.unpack("<H", sub)[0],) + fmt[1:]
        elif chunk_id == b"data":
            data_chunk = _require_bytes(raw, body_start, chunk_size, "data chunk")
        pos = body_start + chunk_size + (chunk_size & 1)

    if fmt is None:
        raise MalformedWav(f"{path}: no fmt chunk")
    if data_chunk is None:
        raise MalformedWav(f"{path}: no data chunk")

    audio_format, channels, sample_rate, _byte_rate, _block_align, bits = fmt
    if channels < 1:
        raise MalformedWav(f"{path}: zero channels")

    if audio_format == _WAVE_FORMAT_PCM and bits == 16:
        flat = np.frombuffer(data_chunk[:len(data_chunk) // 2 * 2], dtype="<i2")
        samples = flat.astype(np.float64) / _PCM16_SCALE
    elif audio_format == _WAVE_FORMAT_IEEE_FLOAT and bits == 32:
        flat = np.frombuffer(data_chunk[:len(data_chunk) // 4 * 4], dtype="<f4")
        samples = np.clip(flat.astype(np.float64), -1.0, 1.0)
    elif audio_format in (_WAVE_FORMAT_PCM, _WAVE_FORMAT_IEEE_FLOAT):
        raise UnsupportedEncoding(f"{path}: {bits}-bit format {audio_format} not supported")
    else:
        raise UnsupportedEncoding(f"{path}: compressed format tag {audio_format}")

    n_frames = len(samples) // channels
    if n_frames == 0:
        raise MalformedWav(f"{path}: empty data chunk")
    samples = samples[:n_frames * channels].reshape(n_frames, channels).T
    return AudioBuffer(samples, sample_rate)


def write_wav(buffer: AudioBuffer, path, bit_depth: int = 16) -> None:
    """Write a buffer as WAV; bit_depth 16 (PCM) or 32 (IEEE float).

    Out-of-range samples saturate; the clipped-sample count is logged.
    """
    if buffer.n_samples == 0:
        raise IoError("refusing to write an empty buffer")
    interleaved = buffer.data.T  # (samples, channels)

    if bit_depth == 16:
        scaled = np.round(interleaved * _PCM16_SCALE)
        clipped = int(np.count_nonzero(scaled < -32768) + np.count_nonzero(scaled > 32767))
        if clipped:
            log.warning("write_wav %s: %d samples clipped to 16-bit range", path, clipped)
        payload = np.clip(scaled, -32768, 32767).astype("<i2").tobytes()
        audio_format, bits = _WAVE_FORMAT_PCM, 16
    elif bit_depth == 32:
        payload = interleaved.astype("<f4").tobytes()
        audio_format, bits = _WAVE_FORMAT_IEEE_FLOAT, 32
    else:
        raise ValueError(f"bit_depth must be 16 or 32, got {bit_depth}")

    channels = buffer.channels
    block_align = channels * bits // 8
    byte_rate = buffer.sample_rate * block_align
    header = b"".join([
        b"RIFF",
        struct.pack("<I", 36 + len(payload)),
        b"WAVE",
        b"fmt ",
        struct.pack("<IHHIIHH", 16, audio_format, channels,
                    buffer.sample_rate, byte_rate, block_align, bits),
        b"data",
        struct.pack("<I", len(payload)),
    ])
    try:
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(payload)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def mixdown(stereo: AudioBuffer) -> AudioBuffer:
    """Average a 2-channel buffer into mono."""
    if stereo.channels != 2:
        raise ChannelCountMismatch(f"mixdown expects 2 channels, got {stereo.channels}")
    return AudioBuffer((stereo.data[0] + stereo.data[1]) / 2.0, stereo.sample_rate)


def rms(buffer: AudioBuffer, interval: SampleInterval) -> float:
    """Root-mean-square amplitude of a mono buffer over [start, end)."""
    if buffer.channels != 1:
        raise ChannelCountMismatch(f"rms expects mono, got {buffer.channels} channels")
    if interval.end > buffer.n_samples:
        raise OutOfBounds(f"{interval} exceeds buffer of {buffer.n_samples} samples")
    segment = buffer.data[0, interval.start:interval.end]
    return float(np.sqrt(np.mean(np.square(segment))))
