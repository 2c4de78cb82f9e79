"""Minimal WAV I/O for adapter processes (PCM16 and float32 read, PCM16 write).

Kept self-contained: adapters talk to the pipeline only over the wire
protocol and must not import its internals.
"""

import struct

import numpy as np


class WavError(Exception):
    pass


def read_wav(path):
    """Return (samples ndarray of shape (channels, n) in [-1, 1], sample_rate)."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < 12 or raw[:4] != b"RIFF" or raw[8:12] != b"WAVE":
        raise WavError(f"{path}: not a RIFF/WAVE file")
    fmt = data = None
    pos = 12
    while pos + 8 <= len(raw):
        cid = raw[pos:pos + 4]
        (size,) = struct.unpack_from("<I", raw, pos + 4)
        body = raw[pos + 8:pos + 8 + size]
        if cid == b"fmt ":
            if len(body) < 16:
                raise WavError(f"{path}: short fmt chunk")
            fmt = struct.unpack("<HHIIHH", body[:16])
            if fmt[0] == 0xFFFE and len(body) >= 26:
                fmt = (struct.unpack_from("<H", body, 24)[0],) + fmt[1:]
        elif cid == b"data":
            if len(body) < size:
                raise WavError(f"{path}: truncated data chunk")
            data = body
        pos += 8 + size + (size & 1)
    if fmt is None or data is None:
        raise WavError(f"{path}: missing fmt or data chunk")
    audio_format, channels, rate, _, _, bits = fmt
    if audio_format == 1 and bits == 16:
        flat = np.frombuffer(data[:len(data) // 2 * 2], dtype="<i2").astype(np.float64)
        flat /= 32768.0
    elif audio_format == 3 and bits == 32:
        flat = np.frombuffer(data[:len(data) // 4 * 4], dtype="<f4").astype(np.float64)
    else:
        raise WavError(f"{path}: unsupported format {audio_format}/{bits}-bit")
    frames = len(flat) // channels
    if frames == 0:
        raise WavError(f"{path}: no audio frames")
    return flat[:frames * channels].reshape(frames, channels).T, int(rate)


def write_wav(path, samples, rate):
    """Write mono or multi-channel float samples as 16-bit PCM."""
    samples = np.atleast_2d(np.asarray(samples, dtype=np.float64))
    payload = np.clip(np.round(samples.T * 32768.0), -32768, 32767).astype("<i2").tobytes()
    channels = samples.shape[0]
    block = channels * 2
    header = b"".join([
        b"RIFF", struct.pack("<I", 36 + len(payload)), b"WAVE",
        b"fmt ", struct.pack("<IHHIIHH", 16, 1, channels, rate, rate * block, block, 16),
        b"data", struct.pack("<I", len(payload)),
    ])
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload)
