"""Offline DSP checkpoints (`local:*`).

Test-grade models that satisfy the backend contracts without any downloads;
they exist so the protocol layer and conformance tooling can be exercised
end to end. Not suitable for real speech.
"""

import numpy as np


def _hamming_sinc_lowpass(cutoff_hz, rate, numtaps=255):
    # odd-length linear-phase FIR; center tap gives zero group delay in
    # 'same'-mode convolution
    mid = numtaps // 2
    n = np.arange(numtaps) - mid
    h = 2 * cutoff_hz / rate * np.sinc(2 * cutoff_hz / rate * n)
    h *= np.hamming(numtaps)
    return h / h.sum()


class EnergyDiarizer:
    """Single-pseudo-speaker energy VAD; every speech run is labelled S1."""

    def __init__(self, frame_s=0.02, floor_dbfs=-45.0, min_run_frames=5):
        self.frame_s = frame_s
        self.floor_dbfs = floor_dbfs
        self.min_run_frames = min_run_frames

    def diarize(self, samples, rate):
        frame = max(1, int(self.frame_s * rate))
        n = len(samples)
        n_frames = n // frame
        if n_frames == 0:
            return []
        energy = np.mean(np.square(samples[:n_frames * frame].reshape(n_frames, frame)),
                         axis=1)
        active = 10 * np.log10(energy + 1e-12) > self.floor_dbfs
        segments = []
        start = None
        for i, on in enumerate(list(active) + [False]):
            if on and start is None:
                start = i
            elif not on and start is not None:
                if i - start >= self.min_run_frames:
                    segments.append(("S1", start * frame / rate, i * frame / rate))
                start = None
        return segments


class BandSplitSeparator:
    """Complementary low/high split; the two outputs sum to the input."""

    def __init__(self, cutoff_hz=1000.0, numtaps=255):
        self.cutoff_hz = cutoff_hz
        self.numtaps = numtaps
        self._taps = {}

    def separate(self, samples, rate):
        if rate not in self._taps:
            self._taps[rate] = _hamming_sinc_lowpass(self.cutoff_hz, rate, self.numtaps)
        taps = self._taps[rate]
        n = len(samples)
        size = 1
        while size < n + len(taps):
            size *= 2
        low = np.fft.irfft(np.fft.rfft(samples, size) * np.fft.rfft(taps, size), size)
        low = low[len(taps) // 2: len(taps) // 2 + n]
        return low, samples - low


class BandEnergyVerifier:
    """Unit-norm log band-energy embedding over fixed linear bands."""

    def __init__(self, n_bands=16, frame=512, hop=256):
        self.n_bands = n_bands
        self.frame = frame
        self.hop = hop

    def embed(self, samples, rate):
        n = len(samples)
        if n < self.frame:
            samples = np.pad(samples, (0, self.frame - n))
            n = self.frame
        n_frames = 1 + (n - self.frame) // self.hop
        idx = np.arange(self.frame)[None, :] + self.hop * np.arange(n_frames)[:, None]
        spec = np.abs(np.fft.rfft(samples[idx] * np.hanning(self.frame), axis=1)) ** 2
        power = spec.sum(axis=0)
        edges = np.linspace(0, len(power), self.n_bands + 1).astype(int)
        bands = np.array([power[a:b].sum() for a, b in zip(edges[:-1], edges[1:])])
        v = np.log10(bands + 1e-12)
        v -= v.mean()
        norm = np.linalg.norm(v)
        return v / norm if norm > 0 else v


class BrokenSimilarityVerifier(BandEnergyVerifier):
    """Deliberately violates the [-1, 1] similarity contract (test fixture)."""

    out_of_range = True


LOCAL_MODELS = {
    "diarizer": {"energy": EnergyDiarizer},
    "separator": {"band-split": BandSplitSeparator},
    "verifier": {"band-energy": BandEnergyVerifier, "broken-sim": BrokenSimilarityVerifier},
}


def make_local(kind, name, params):
    try:
        cls = LOCAL_MODELS[kind][name]
    except KeyError:
        raise ValueError(f"no local {kind} checkpoint named {name!r}; "
                         f"available: {sorted(LOCAL_MODELS.get(kind, {}))}")
    kwargs = {}
    if "cutoff" in params and kind == "separator":
        kwargs["cutoff_hz"] = float(params["cutoff"])
    return cls(**kwargs)
