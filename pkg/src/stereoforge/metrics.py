"""Turn-taking analytics: per-channel VAD, IPU/Gap/Pause/Overlap events,
and corpus aggregates with deltas against a reference row."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .audio import AudioBuffer, SampleInterval
from .errors import ChannelCountMismatch, EmptyCorpus, MalformedIntervals

_EPS = 1e-12

EVENT_CLASSES = ("ipu", "gap", "pause", "overlap")


@dataclass(frozen=True)
class VadParams:
    frame_s: float = 0.01
    energy_floor_db: float = -35.0   # relative to the 95th-percentile frame energy
    min_speech_s: float = 0.2
    min_silence_s: float = 0.15
    silence_floor_db: float = -60.0  # absolute dBFS floor, keeps digital silence out

    def __post_init__(self):
        if min(self.frame_s, self.min_speech_s, self.min_silence_s) <= 0:
            raise ValueError("VAD durations must be positive")
        if self.min_speech_s < self.frame_s:
            raise ValueError("min_speech_s must be at least one frame")


@dataclass(frozen=True)
class TurnTakingEvents:
    ipu: tuple       # (channel-1 intervals, channel-2 intervals)
    gap: tuple
    pause: tuple
    overlap: tuple
    total_len: int
    sample_rate: int


@dataclass(frozen=True)
class ClassStats:
    dur_mean_s: float
    occur_mean: float


@dataclass(frozen=True)
class TurnTakingStats:
    stats: dict            # class name -> ClassStats
    n_dialogues: int
    reference_name: str = None
    delta: dict = None     # class name -> ClassStats, or None


# Fisher ground-truth row: mean event duration (s) and occurrences per dialogue.
REFERENCES = {
    "fisher-table1": {
        "ipu": ClassStats(56.86, 19.86),
        "gap": ClassStats(2.61, 2.88),
        "pause": ClassStats(4.83, 7.42),
        "overlap": ClassStats(4.29, 3.96),
    },
}


def vad(channel: AudioBuffer, params: VadParams = VadParams()) -> list:
    """Energy VAD with hangover smoothing; returns sorted disjoint speech intervals."""
    if channel.channels != 1:
        raise ChannelCountMismatch(f"vad expects mono, got {channel.channels} channels")
    x = channel.channel(0)
    n = x.shape[0]
    if n == 0:
        return []
    frame = max(1, int(round(params.frame_s * channel.sample_rate)))
    energies = kernels.frame_energies(x, frame)
    db = 10.0 * np.log10(energies + _EPS)
    threshold = max(float(np.percentile(db, 95)) + params.energy_floor_db,
                    params.silence_floor_db)
    mask = db > threshold
    min_silence = max(1, int(round(params.min_silence_s / params.frame_s)))
    min_speech = max(1, int(round(params.min_speech_s / params.frame_s)))
    mask = kernels.refine_mask(mask, min_silence, min_speech)
    starts, ends = kernels.mask_to_runs(mask)
    return [SampleInterval(int(s) * frame, min(int(e) * frame, n))
            for s, e in zip(starts, ends)]


def _validate_intervals(intervals, total_len, what):
    prev_end = 0
    for iv in intervals:
        if iv.start < prev_end:
            raise MalformedIntervals(f"{what}: intervals unsorted or overlapping at {iv}")
        if iv.end > total_len:
            raise MalformedIntervals(f"{what}: {iv} exceeds total length {total_len}")
        prev_end = iv.end


def _merge_union(a, b):
    merged = sorted(list(a) + list(b), key=lambda iv: iv.start)
    out = []
    for iv in merged:
        if out and iv.start <= out[-1].end:
            if iv.end > out[-1].end:
                out[-1] = SampleInterval(out[-1].start, iv.end)
        else:
            out.append(iv)
    return out


def _intersection(a, b):
    out = []
    i = j = 0
    while i < len(a) and j < len(b):
        s = max(a[i].start, b[j].start)
        e = min(a[i].end, b[j].end)
        if e > s:
            out.append(SampleInterval(s, e))
        if a[i].end <= b[j].end:
            i += 1
        else:
            j += 1
    return out


def _active_channels(speech, pos):
    active = set()
    for ch, intervals in enumerate(speech):
        for iv in intervals:
            if iv.start <= pos < iv.end:
                active.add(ch)
                break
    return active


def extract_events(speech1, speech2, total_len, sample_rate=16000) -> TurnTakingEvents:
    """Classify the timeline into IPU, Gap, Pause, and Overlap events.

    A maximal silence is a Gap when the speakers flanking it differ and a
    Pause when they are the same; a flank where both channels reach the
    silence edge counts as a tie and forces a Gap, as does no flank at all.
    Edge silences use their single flank.
    """
    speech = (list(speech1), list(speech2))
    _validate_intervals(speech[0], total_len, "channel 1")
    _validate_intervals(speech[1], total_len, "channel 2")

    union = _merge_union(speech[0], speech[1])
    overlap = _intersection(speech[0], speech[1])

    silences = []
    cursor = 0
    for iv in union:
        if iv.start > cursor:
            silences.append(SampleInterval(cursor, iv.start))
        cursor = iv.end
    if cursor < total_len:
        silences.append(SampleInterval(cursor, total_len))

    def flank(active):
        if active is None or len(active) == 0:
            return None
        if len(active) == 2:
            return "tie"
        return next(iter(active))

    gaps, pauses = [], []
    for iv in silences:
        left = flank(_active_channels(speech, iv.start - 1)) if iv.start > 0 else None
        right = flank(_active_channels(speech, iv.end)) if iv.end < total_len else None
        if left == "tie" or right == "tie":
            gaps.append(iv)
        elif left is None and right is None:
            gaps.append(iv)
        elif left is None or right is None:
            pauses.append(iv)  # edge silence attaches to its single speaker
        elif left != right:
            gaps.append(iv)
        else:
            pauses.append(iv)

    return TurnTakingEvents(
        ipu=(tuple(speech[0]), tuple(speech[1])),
        gap=tuple(gaps),
        pause=tuple(pauses),
        overlap=tuple(overlap),
        total_len=total_len,
        sample_rate=sample_rate,
    )


def _dialogue_sums(events: TurnTakingEvents) -> dict:
    scale = 1.0 / events.sample_rate
    ipu_all = [iv for channel in events.ipu for iv in channel]
    return {
        "ipu": (sum(len(iv) for iv in ipu_all) * scale, len(ipu_all)),
        "gap": (sum(len(iv) for iv in events.gap) * scale, len(events.gap)),
        "pause": (sum(len(iv) for iv in events.pause) * scale, len(events.pause)),
        "overlap": (sum(len(iv) for iv in events.overlap) * scale, len(events.overlap)),
    }


def aggregate(events_list, reference: dict = None,
              reference_name: str = None) -> TurnTakingStats:
    """Average per-dialogue duration sums and event counts over the corpus."""
    events_list = list(events_list)
    if not events_list:
        raise EmptyCorpus("no dialogues to aggregate")
    n = len(events_list)
    totals = {cls: [0.0, 0.0] for cls in EVENT_CLASSES}
    for events in events_list:
        for cls, (dur, occur) in _dialogue_sums(events).items():
            totals[cls][0] += dur
            totals[cls][1] += occur
    stats = {cls: ClassStats(totals[cls][0] / n, totals[cls][1] / n)
             for cls in EVENT_CLASSES}
    delta = None
    if reference is not None:
        delta = {cls: ClassStats(stats[cls].dur_mean_s - reference[cls].dur_mean_s,
                                 stats[cls].occur_mean - reference[cls].occur_mean)
                 for cls in EVENT_CLASSES}
    return TurnTakingStats(stats=stats, n_dialogues=n,
                           reference_name=reference_name, delta=delta)


def report_json(stats: TurnTakingStats, params: VadParams,
                dialogue_lens_s=None) -> dict:
    doc = {
        "params": {
            "frame_s": params.frame_s,
            "energy_floor_db": params.energy_floor_db,
            "min_speech_s": params.min_speech_s,
            "min_silence_s": params.min_silence_s,
            "silence_floor_db": params.silence_floor_db,
        },
        "n_dialogues": stats.n_dialogues,
        "stats": {cls: {"dur_mean_s": stats.stats[cls].dur_mean_s,
                        "occur_mean": stats.stats[cls].occur_mean}
                  for cls in EVENT_CLASSES},
        "delta": None if stats.delta is None else
                 {cls: {"dur_mean_s": stats.delta[cls].dur_mean_s,
                        "occur_mean": stats.delta[cls].occur_mean}
                  for cls in EVENT_CLASSES},
        "reference_name": stats.reference_name,
    }
    if dialogue_lens_s is not None:
        lens = list(dialogue_lens_s)
        doc["dialogue_len_s"] = {"mean": float(np.mean(lens)),
                                 "min": float(np.min(lens)),
                                 "max": float(np.max(lens))}
    return doc


def report_text(stats: TurnTakingStats) -> str:
    """Plain-text table in the IPU / Gap / Overlap / Pause layout."""
    order = ("ipu", "gap", "overlap", "pause")
    header1 = f"{'':14s}" + "".join(f"{name.upper():>18s}" for name in order)
    header2 = f"{'':14s}" + "".join(f"{'Dur.':>9s}{'Occur.':>9s}" for _ in order)
    lines = [header1, header2]
    row = f"{'stats':14s}"
    for cls in order:
        row += f"{stats.stats[cls].dur_mean_s:9.2f}{stats.stats[cls].occur_mean:9.2f}"
    lines.append(row)
    if stats.delta is not None:
        row = f"{'delta':14s}"
        for cls in order:
            row += f"{stats.delta[cls].dur_mean_s:9.2f}{stats.delta[cls].occur_mean:9.2f}"
        lines.append(row + f"   (vs {stats.reference_name})")
    lines.append(f"n_dialogues: {stats.n_dialogues}")
    return "\n".join(lines)
