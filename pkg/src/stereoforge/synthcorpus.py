"""Deterministic synthetic two-speaker dialogues with known ground truth.

Voices are amplitude-modulated band-passed noise on disjoint carrier bands,
so the builtin band-split separator is an exact oracle for them. Not
representative of real speech quality; for pipeline testing only.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.signal import fftconvolve, firwin

from .audio import AudioBuffer, SampleInterval, mixdown, write_wav
from .errors import InvalidScript
from .timeline import DiarizationAnnotation, format_annotation_tsv, normalize_annotation

# chance that an alternating-speaker transition overlaps at all; the overlap
# length is then calibrated so the overlap-to-speech ratio tracks overlap_prob
_OVERLAP_TRANSITION_PROB = 0.85

_TURN_MIN_S = 0.8
_TURN_MAX_S = 8.0
_PEAK = 0.35

SPEAKER_LABELS = ("spkA", "spkB")


@dataclass(frozen=True)
class VoiceSpec:
    band_hz: tuple = (200.0, 700.0)
    am_rate_hz: float = 3.0


@dataclass(frozen=True)
class DialogueScript:
    seed: int
    duration_s: float = 60.0
    turn_mu: float = float(np.log(2.5))  # lognormal parameters of turn length
    turn_sigma: float = 0.4
    overlap_prob: float = 0.15
    pause_prob: float = 0.2
    speaker_specs: tuple = (VoiceSpec((200.0, 700.0), 3.1),
                            VoiceSpec((1300.0, 2600.0), 4.3))
    sample_rate: int = 16000

    def validate(self):
        if self.duration_s < 4 * _TURN_MIN_S:
            raise InvalidScript(f"duration {self.duration_s} s is too short")
        if not (0.0 <= self.overlap_prob < 1.0) or not (0.0 <= self.pause_prob < 1.0):
            raise InvalidScript("overlap_prob and pause_prob must be in [0, 1)")
        if len(self.speaker_specs) != 2:
            raise InvalidScript("exactly two speaker specs required")
        nyquist = self.sample_rate / 2
        for spec in self.speaker_specs:
            lo, hi = spec.band_hz
            if not (0 < lo < hi < nyquist):
                raise InvalidScript(f"bad carrier band {spec.band_hz}")
        (lo1, hi1), (lo2, hi2) = (s.band_hz for s in self.speaker_specs)
        margin = max(lo2 - hi1, lo1 - hi2)
        if margin < 500.0:
            raise InvalidScript(f"carrier bands must be >= 500 Hz apart, got {margin:.0f}")


def _schedule_turns(script: DialogueScript, rng) -> list:
    """Alternating turns with calibrated overlaps; returns (speaker, start_s, end_s)."""
    mean_turn = float(np.exp(script.turn_mu + script.turn_sigma ** 2 / 2))
    alt_overlap = (1.0 - script.pause_prob) * _OVERLAP_TRANSITION_PROB
    mean_overlap = 0.0
    if script.overlap_prob > 0 and alt_overlap > 0:
        mean_overlap = script.overlap_prob * mean_turn / ((1 + script.overlap_prob) * alt_overlap)

    turns = []
    t = float(rng.uniform(0.0, 0.5))
    speaker = int(rng.integers(0, 2))
    prev = None
    pending_overlap = 0.0
    for _ in range(100000):
        turn_len = float(np.clip(rng.lognormal(script.turn_mu, script.turn_sigma),
                                 _TURN_MIN_S, _TURN_MAX_S))
        if prev is None:
            start = t
        elif pending_overlap > 0.0:
            prev_len = prev[2] - prev[1]
            overlap = min(pending_overlap, 0.45 * turn_len, 0.45 * prev_len)
            start = prev[2] - overlap
        else:
            start = t
        end = start + turn_len
        if end > script.duration_s:
            break
        prev = (speaker, start, end)
        turns.append(prev)

        if float(rng.random()) < script.pause_prob:
            t = end + float(rng.uniform(0.3, 1.2))   # same speaker resumes: a Pause
            pending_overlap = 0.0
        else:
            if script.overlap_prob > 0 and float(rng.random()) < _OVERLAP_TRANSITION_PROB:
                pending_overlap = float(rng.uniform(0.5, 1.5)) * mean_overlap
            else:
                pending_overlap = 0.0
                t = end + float(rng.uniform(0.05, 0.5))
            speaker = 1 - speaker
    return turns


def _voice(rng, n: int, spec: VoiceSpec, rate: int) -> np.ndarray:
    noise = rng.standard_normal(n)
    taps = firwin(255, list(spec.band_hz), pass_zero=False, fs=rate)
    x = fftconvolve(noise, taps, mode="same")[:n]
    peak = np.max(np.abs(x))
    if peak > 0:
        x = x / peak
    t = np.arange(n) / rate
    phase = float(rng.uniform(0, 2 * np.pi))
    envelope = 0.55 + 0.45 * np.sin(2 * np.pi * spec.am_rate_hz * t + phase)
    x = _PEAK * x * envelope
    x[x == 0.0] = 1e-9  # activity is defined as |sample| > 0, keep it exact
    return x


def generate(script: DialogueScript):
    """Return (mono mix, ground-truth stereo, ground-truth annotation)."""
    script.validate()
    rng = np.random.default_rng(script.seed)
    rate = script.sample_rate
    n = int(round(script.duration_s * rate))

    turns = _schedule_turns(script, rng)
    stereo = np.zeros((2, n))
    entries = []
    for speaker, start_s, end_s in turns:
        s = int(start_s * rate + 0.5)
        e = min(int(end_s * rate + 0.5), n)
        if e <= s:
            continue
        stereo[speaker, s:e] = _voice(rng, e - s, script.speaker_specs[speaker], rate)
        entries.append((SPEAKER_LABELS[speaker], SampleInterval(s, e)))

    truth = AudioBuffer(stereo, rate)
    mix = mixdown(truth)
    annotation = normalize_annotation(entries, n, merge_gap=0)
    return mix, truth, annotation


def write_corpus_item(out_dir, item_id: str, script: DialogueScript,
                      mix: AudioBuffer, truth: AudioBuffer,
                      annotation: DiarizationAnnotation) -> dict:
    """Write the on-disk layout: .mix.wav, .truth.wav, .truth.tsv, .meta.json."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "mix": out_dir / f"{item_id}.mix.wav",
        "truth": out_dir / f"{item_id}.truth.wav",
        "tsv": out_dir / f"{item_id}.truth.tsv",
        "meta": out_dir / f"{item_id}.meta.json",
    }
    write_wav(mix, paths["mix"])
    write_wav(truth, paths["truth"])
    paths["tsv"].write_text(format_annotation_tsv(annotation, mix.sample_rate))
    meta = dataclasses.asdict(script)
    paths["meta"].write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return paths
