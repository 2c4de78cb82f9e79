"""Builtin reference backends.

These are test-grade: the band-energy diarizer and band-split separator
only work on spectrally disjoint material such as the synthetic corpus.
Production runs should point the pipeline at external model adapters.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.signal import fftconvolve, firwin

from .. import kernels
from ..audio import AudioBuffer, SampleInterval
from ..errors import BackendFailure, TooShort
from ..timeline import (
    DiarizationAnnotation,
    normalize_annotation,
    parse_annotation_tsv,
)

_EPS = 1e-12

VERIFY_MIN_S = 0.5


@dataclass(frozen=True)
class SeparatedPair:
    """The two mono streams produced by separating one overlap segment."""

    first: AudioBuffer
    second: AudioBuffer


def _require_mono(buffer: AudioBuffer, what: str) -> np.ndarray:
    if buffer.channels != 1:
        raise BackendFailure(f"{what} must be mono, got {buffer.channels} channels")
    return buffer.channel(0)


class OracleDiarizer:
    """Returns the ground-truth sidecar annotation next to the audio file."""

    name = "oracle"

    def diarize(self, audio: AudioBuffer, source_path=None) -> DiarizationAnnotation:
        _require_mono(audio, "diarizer input")
        if source_path is None:
            raise BackendFailure("oracle diarizer needs the source file path")
        sidecar = self._sidecar(Path(source_path))
        if sidecar is None:
            raise BackendFailure(f"no sidecar annotation found for {source_path}")
        return parse_annotation_tsv(sidecar.read_text(), audio.sample_rate, audio.n_samples)

    @staticmethod
    def _sidecar(path: Path):
        if path.name.endswith(".mix.wav"):
            cand = path.with_name(path.name[: -len(".mix.wav")] + ".truth.tsv")
            if cand.exists():
                return cand
        cand = path.with_suffix(".tsv")
        return cand if cand.exists() else None

    def close(self):
        pass


class BandEnergyDiarizer:
    """Frame energy in two frequency bands; each band becomes a pseudo-speaker."""

    name = "band-energy"

    def __init__(self, bands=((200.0, 700.0), (1300.0, 2600.0)), frame_s=0.01,
                 rel_floor_db=-35.0, abs_floor_db=-60.0,
                 min_speech_s=0.2, min_silence_s=0.15):
        self.bands = bands
        self.frame_s = frame_s
        self.rel_floor_db = rel_floor_db
        self.abs_floor_db = abs_floor_db
        self.min_speech_s = min_speech_s
        self.min_silence_s = min_silence_s

    def diarize(self, audio: AudioBuffer, source_path=None) -> DiarizationAnnotation:
        x = _require_mono(audio, "diarizer input")
        rate = audio.sample_rate
        frame = int(round(self.frame_s * rate))
        n = x.shape[0]
        n_frames = (n + frame - 1) // frame
        padded = np.zeros(n_frames * frame)
        padded[:n] = x
        frames = padded.reshape(n_frames, frame)

        n_fft = 256
        window = np.hanning(frame)  # tames sidelobe leakage across bands
        spec = np.abs(np.fft.rfft(frames * window, n=n_fft, axis=1)) ** 2
        freqs = np.fft.rfftfreq(n_fft, d=1.0 / rate)

        entries = []
        min_speech = max(1, int(round(self.min_speech_s / self.frame_s)))
        min_silence = max(1, int(round(self.min_silence_s / self.frame_s)))
        for band_idx, (lo, hi) in enumerate(self.bands):
            sel = (freqs >= lo) & (freqs < hi)
            energy = spec[:, sel].sum(axis=1) / (n_fft * frame)
            db = 10.0 * np.log10(energy + _EPS)
            thr = max(np.percentile(db, 95) + self.rel_floor_db, self.abs_floor_db)
            mask = db > thr
            mask = kernels.refine_mask(mask, min_silence, min_speech)
            starts, ends = kernels.mask_to_runs(mask)
            for s, e in zip(starts, ends):
                iv_start = int(s) * frame
                iv_end = min(int(e) * frame, n)
                if iv_end > iv_start:
                    entries.append((f"band{band_idx}", SampleInterval(iv_start, iv_end)))
        return normalize_annotation(entries, n)

    def close(self):
        pass


class BandSplitSeparator:
    """Complementary linear-phase low/high split at a configurable cutoff."""

    name = "band-split"

    def __init__(self, cutoff_hz=1000.0, numtaps=255):
        if numtaps % 2 == 0:
            raise ValueError("numtaps must be odd for a zero-delay linear-phase split")
        self.cutoff_hz = cutoff_hz
        self.numtaps = numtaps
        self._taps = {}

    def _lowpass(self, rate: int) -> np.ndarray:
        if rate not in self._taps:
            self._taps[rate] = firwin(self.numtaps, self.cutoff_hz, fs=rate)
        return self._taps[rate]

    def separate(self, segment: AudioBuffer) -> SeparatedPair:
        x = _require_mono(segment, "separator input")
        if segment.n_samples == 0:
            raise BackendFailure("separator input is empty")
        low = fftconvolve(x, self._lowpass(segment.sample_rate), mode="same")
        if low.shape[0] != x.shape[0]:  # x shorter than the filter
            low = low[: x.shape[0]]
        high = x - low
        rate = segment.sample_rate
        return SeparatedPair(AudioBuffer(low, rate), AudioBuffer(high, rate))

    def close(self):
        pass


def _mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f) / 700.0)


def _mel_inv(m):
    return 700.0 * (10.0 ** (np.asarray(m) / 2595.0) - 1.0)


class BandEnergyVerifier:
    """Cosine similarity of normalized log-energy vectors over mel-spaced bands."""

    name = "band-energy"

    def __init__(self, n_bands=16, fmin=50.0, fmax=7600.0, frame=512, hop=256,
                 min_s=VERIFY_MIN_S):
        self.n_bands = n_bands
        self.fmin = fmin
        self.fmax = fmax
        self.frame = frame
        self.hop = hop
        self.min_s = min_s

    def _embedding(self, x: np.ndarray, rate: int) -> np.ndarray:
        n_frames = 1 + (x.shape[0] - self.frame) // self.hop
        window = np.hanning(self.frame)
        idx = np.arange(self.frame)[None, :] + self.hop * np.arange(n_frames)[:, None]
        spec = np.abs(np.fft.rfft(x[idx] * window, axis=1)) ** 2
        power = spec.sum(axis=0)
        freqs = np.fft.rfftfreq(self.frame, d=1.0 / rate)
        edges = _mel_inv(np.linspace(_mel(self.fmin), _mel(min(self.fmax, rate / 2)),
                                     self.n_bands + 1))
        bands = np.array([power[(freqs >= lo) & (freqs < hi)].sum()
                          for lo, hi in zip(edges[:-1], edges[1:])])
        v = np.log10(bands + _EPS)
        return v - v.mean()

    def verify(self, reference: AudioBuffer, candidate: AudioBuffer) -> float:
        r = _require_mono(reference, "verify reference")
        c = _require_mono(candidate, "verify candidate")
        if reference.sample_rate != candidate.sample_rate:
            raise BackendFailure("verify inputs differ in sample rate")
        min_len = int(self.min_s * reference.sample_rate)
        if r.shape[0] < min_len or c.shape[0] < min_len:
            raise TooShort(f"verify inputs must be at least {self.min_s} s")
        ve = self._embedding(r, reference.sample_rate)
        ce = self._embedding(c, candidate.sample_rate)
        denom = np.linalg.norm(ve) * np.linalg.norm(ce)
        if denom == 0.0:
            return 0.0
        return float(np.clip(np.dot(ve, ce) / denom, -1.0, 1.0))

    def close(self):
        pass
