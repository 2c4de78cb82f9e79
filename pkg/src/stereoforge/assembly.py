"""Pseudo-stereo construction: copy solo speech verbatim, separate each
overlap, and route the separated streams to channels by comparing speaker
similarity against per-speaker reference clips."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .audio import AudioBuffer, SampleInterval, rms
from .backends import VERIFY_MIN_S
from .errors import BackendFailure, InsufficientSoloSpeech, SkippedOverlap, Timeout
from .timeline import DialogueWindow, FrameClassification, classify_frames

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class AssemblyConfig:
    min_overlap_s: float = 0.2     # shorter overlaps are passed through, not separated
    ref_min_s: float = 2.0
    ref_target_s: float = 5.0
    gain_min: float = 0.25
    gain_max: float = 4.0
    low_margin: float = 0.05       # |sum difference| below this logs a warning
    duck_db: float = -6.0          # gain for mixture fills (short overlaps, failures)


@dataclass(frozen=True)
class ReferenceClips:
    """One clip per speaker, cut from that speaker's solo intervals."""

    r1: AudioBuffer
    r2: AudioBuffer
    source_intervals: tuple  # per speaker: tuple of SampleInterval into the mix


@dataclass(frozen=True)
class AssignmentDecision:
    overlap_interval: SampleInterval
    sim: tuple       # 2x2: sim[i][j] = verify(reference_i, separated_j)
    swapped: bool    # True when separated stream 2 went to channel 1


@dataclass
class PseudoStereoResult:
    stereo: AudioBuffer
    decisions: list = field(default_factory=list)
    skipped_overlaps: list = field(default_factory=list)  # (interval, reason)
    provenance: list = field(default_factory=list)        # (interval, tag)
    speakers: tuple = ()  # labels in channel order


def channel_order(classification: FrameClassification, speakers) -> tuple:
    """Channel 1 goes to the speaker whose first solo interval starts earliest."""
    solos = sorted(classification.solo, key=lambda e: e[1].start)
    if not solos:
        raise InsufficientSoloSpeech(speakers[0], "no solo speech in window")
    first = solos[0][0]
    others = [s for s in speakers if s != first]
    return (first, others[0])


def select_reference_clips(mix: AudioBuffer, classification: FrameClassification,
                           rng_seed, config: AssemblyConfig = AssemblyConfig(),
                           speakers=None) -> ReferenceClips:
    """Cut one reference clip per speaker from its solo intervals.

    The clip start is drawn uniformly over the concatenated solo material;
    a clip may span several solo intervals.
    """
    if speakers is None:
        seen = []
        for spk, _ in classification.solo:
            if spk not in seen:
                seen.append(spk)
        speakers = channel_order(classification, seen)
    rng = np.random.default_rng(rng_seed)
    rate = mix.sample_rate
    ref_min = int(config.ref_min_s * rate)
    ref_target = int(config.ref_target_s * rate)

    clips, sources = [], []
    for spk in speakers:
        solos = [iv for s, iv in classification.solo if s == spk]
        total = sum(len(iv) for iv in solos)
        if total < ref_min:
            raise InsufficientSoloSpeech(spk)
        target = min(ref_target, total)
        offset = int(rng.integers(0, total - target + 1))

        pieces, pieces_src = [], []
        remaining, pos = target, 0
        for iv in solos:
            if pos + len(iv) > offset and remaining > 0:
                begin = iv.start + max(0, offset - pos)
                take = min(iv.end - begin, remaining)
                pieces.append(mix.data[0, begin:begin + take])
                pieces_src.append(SampleInterval(begin, begin + take))
                remaining -= take
            pos += len(iv)
            if remaining == 0:
                break
        clips.append(AudioBuffer(np.concatenate(pieces), rate))
        sources.append(tuple(pieces_src))
    return ReferenceClips(clips[0], clips[1], tuple(sources))


def copy_non_overlap(mix: AudioBuffer, classification: FrameClassification,
                     stereo: np.ndarray, chan_of: dict) -> list:
    """Copy each solo interval verbatim into its speaker's channel.

    `stereo` is the (2, n) output array being filled; returns provenance entries.
    """
    provenance = []
    for spk, iv in classification.solo:
        stereo[chan_of[spk], iv.start:iv.end] = mix.data[0, iv.start:iv.end]
        provenance.append((iv, "copied-solo"))
    return provenance


def _tile_to(buffer: AudioBuffer, min_len: int) -> AudioBuffer:
    """Repeat a clip until it reaches min_len samples (verification floor)."""
    n = buffer.n_samples
    if n >= min_len:
        return buffer
    reps = -(-min_len // n)
    return AudioBuffer(np.tile(buffer.data[0], reps)[:min_len], buffer.sample_rate)


def resolve_overlap(mix: AudioBuffer, interval: SampleInterval, refs: ReferenceClips,
                    separator, verifier,
                    config: AssemblyConfig = AssemblyConfig()):
    """Separate one overlap segment and assign the two streams to channels.

    Returns (channel-1 samples, channel-2 samples, AssignmentDecision).
    Backend errors surface as SkippedOverlap.
    """
    rate = mix.sample_rate
    segment = mix.slice(interval)
    try:
        pair = separator.separate(segment)
        for out in (pair.first, pair.second):
            if out.n_samples != segment.n_samples:
                raise BackendFailure("separated stream length differs from input")

        min_len = int(VERIFY_MIN_S * rate)
        cands = [_tile_to(pair.first, min_len), _tile_to(pair.second, min_len)]
        sim = tuple(tuple(verifier.verify(ref, cand) for cand in cands)
                    for ref in (refs.r1, refs.r2))
    except (BackendFailure, Timeout) as exc:
        raise SkippedOverlap(f"overlap [{interval.start}, {interval.end}): {exc}") from exc

    keep = sim[0][0] + sim[1][1]
    swap = sim[0][1] + sim[1][0]
    swapped = keep < swap  # ties keep the identity assignment
    if abs(keep - swap) < config.low_margin:
        log.warning("low assignment margin %.4f on overlap [%d, %d)",
                    abs(keep - swap), interval.start, interval.end)

    first, second = (pair.second, pair.first) if swapped else (pair.first, pair.second)
    mixture_rms = rms(mix, interval)
    placed = first.channel(0) + second.channel(0)
    placed_rms = float(np.sqrt(np.mean(np.square(placed))))
    if placed_rms > 0.0 and mixture_rms > 0.0:
        gain = float(np.clip(mixture_rms / placed_rms, config.gain_min, config.gain_max))
    else:
        gain = 1.0
    decision = AssignmentDecision(interval, sim, swapped)
    return first.channel(0) * gain, second.channel(0) * gain, decision


def _solo_speaker_at(classification: FrameClassification, pos: int):
    for spk, iv in classification.solo:
        if iv.start <= pos < iv.end:
            return spk
    return None


def assemble_pseudo_stereo(mix: AudioBuffer, window: DialogueWindow, separator,
                           verifier, config: AssemblyConfig = AssemblyConfig(),
                           rng_seed=0) -> PseudoStereoResult:
    """Build the 2-channel output for one dialogue window.

    `mix` is the window's own audio slice. Raises InsufficientSoloSpeech when a
    speaker has no usable reference material (the window should be skipped);
    per-overlap backend failures keep the window and fill the overlap with the
    ducked mixture on both channels.
    """
    annotation = window.annotation
    n = annotation.total_len
    if mix.n_samples != n:
        raise ValueError(f"mix has {mix.n_samples} samples, window expects {n}")
    classification = classify_frames(annotation)
    speakers = channel_order(classification, annotation.speakers())
    chan_of = {speakers[0]: 0, speakers[1]: 1}

    stereo = np.zeros((2, n))
    provenance = copy_non_overlap(mix, classification, stereo, chan_of)
    refs = select_reference_clips(mix, classification, rng_seed, config, speakers)

    min_overlap = int(config.min_overlap_s * mix.sample_rate)
    duck = 10.0 ** (config.duck_db / 20.0)
    decisions, skipped = [], []
    for iv in classification.overlap:
        seg = mix.data[0, iv.start:iv.end]
        if len(iv) < min_overlap:
            before = _solo_speaker_at(classification, iv.start - 1) if iv.start > 0 else None
            after = _solo_speaker_at(classification, iv.end) if iv.end < n else None
            if before is not None and before == after:
                stereo[chan_of[before], iv.start:iv.end] = seg
            else:
                stereo[:, iv.start:iv.end] = seg * duck
            provenance.append((iv, "passthrough-short-overlap"))
            continue
        try:
            ch1, ch2, decision = resolve_overlap(mix, iv, refs, separator, verifier, config)
        except SkippedOverlap as exc:
            stereo[:, iv.start:iv.end] = seg * duck
            skipped.append((iv, str(exc)))
            provenance.append((iv, "skipped-overlap"))
            continue
        stereo[0, iv.start:iv.end] = ch1
        stereo[1, iv.start:iv.end] = ch2
        decisions.append(decision)
        provenance.append((iv, "separated"))

    provenance.extend((iv, "silence") for iv in classification.silence)
    provenance.sort(key=lambda entry: entry[0].start)
    return PseudoStereoResult(
        stereo=AudioBuffer(stereo, mix.sample_rate),
        decisions=decisions,
        skipped_overlaps=skipped,
        provenance=provenance,
        speakers=speakers,
    )
