"""Interval algebra over diarization output.

Classifies each sample of a two-speaker window as solo, overlap, or
silence, and carves full recordings into two-speaker dialogue windows.
All positions are half-open sample-index ranges.
"""

from __future__ import annotations

from dataclasses import dataclass

from .audio import SampleInterval
from .errors import OutOfBounds, SpeakerCountError

MERGE_GAP_DEFAULT = 3200   # 0.2 s at 16 kHz
CUT_SLACK_DEFAULT = 32000  # 2 s at 16 kHz


@dataclass(frozen=True)
class DiarizationAnnotation:
    """Speaker-labelled intervals over one recording of total_len samples."""

    entries: tuple  # of (speaker: str, SampleInterval), sorted by start
    total_len: int

    def speakers(self) -> list:
        seen = []
        for spk, _ in self.entries:
            if spk not in seen:
                seen.append(spk)
        return seen

    def speaker_intervals(self, speaker) -> list:
        return [iv for spk, iv in self.entries if spk == speaker]


@dataclass(frozen=True)
class FrameClassification:
    """Partition of a window into solo (one speaker), overlap, and silence."""

    solo: tuple     # of (speaker, SampleInterval)
    overlap: tuple  # of SampleInterval
    silence: tuple  # of SampleInterval
    total_len: int


@dataclass(frozen=True)
class DialogueWindow:
    """A two-speaker slice of a recording with a window-local annotation."""

    source_interval: SampleInterval
    annotation: DiarizationAnnotation

    def __post_init__(self):
        if len(self.annotation.speakers()) != 2:
            raise SpeakerCountError(
                f"window must contain exactly 2 speakers, got {self.annotation.speakers()}")


def normalize_annotation(entries, total_len, merge_gap=MERGE_GAP_DEFAULT) -> DiarizationAnnotation:
    """Merge same-speaker intervals that overlap or sit within merge_gap samples.

    Entries are (speaker, SampleInterval); output is sorted by start, and no
    same-speaker pair overlaps or abuts within merge_gap.
    """
    by_speaker: dict = {}
    for spk, iv in entries:
        if iv.end > total_len or iv.start < 0:
            raise OutOfBounds(f"entry {iv} outside [0, {total_len})")
        by_speaker.setdefault(spk, []).append(iv)

    merged = []
    for spk, ivs in by_speaker.items():
        ivs.sort()
        cur_start, cur_end = ivs[0].start, ivs[0].end
        for iv in ivs[1:]:
            if iv.start - cur_end <= merge_gap:
                cur_end = max(cur_end, iv.end)
            else:
                merged.append((spk, SampleInterval(cur_start, cur_end)))
                cur_start, cur_end = iv.start, iv.end
        merged.append((spk, SampleInterval(cur_start, cur_end)))

    merged.sort(key=lambda e: (e[1].start, e[1].end, str(e[0])))
    return DiarizationAnnotation(tuple(merged), total_len)


def _boundaries(annotation: DiarizationAnnotation) -> list:
    pts = {0, annotation.total_len}
    for _, iv in annotation.entries:
        pts.add(iv.start)
        pts.add(iv.end)
    return sorted(p for p in pts if 0 <= p <= annotation.total_len)


def _active_at(annotation: DiarizationAnnotation, pos: int) -> frozenset:
    return frozenset(spk for spk, iv in annotation.entries if iv.start <= pos < iv.end)


def classify_frames(annotation: DiarizationAnnotation) -> FrameClassification:
    """Split a two-speaker window into the solo, overlap, and silence sets."""
    speakers = annotation.speakers()
    if len(speakers) != 2:
        raise SpeakerCountError(f"expected exactly 2 speakers, got {len(speakers)}")

    pts = _boundaries(annotation)
    labelled = []  # (start, end, active frozenset)
    for a, b in zip(pts[:-1], pts[1:]):
        labelled.append((a, b, _active_at(annotation, a)))

    # merge adjacent segments with identical active sets
    merged = []
    for seg in labelled:
        if merged and merged[-1][2] == seg[2] and merged[-1][1] == seg[0]:
            merged[-1] = (merged[-1][0], seg[1], seg[2])
        else:
            merged.append(seg)
    solo, overlap, silence = [], [], []
    for a, b, active in merged:
        iv = SampleInterval(a, b)
        if len(active) == 0:
            silence.append(iv)
        elif len(active) == 1:
            solo.append((next(iter(active)), iv))
        else:
            overlap.append(iv)
    return FrameClassification(tuple(solo), tuple(overlap), tuple(silence),
                               annotation.total_len)


def _subset(annotation: DiarizationAnnotation, speakers, lo: int, hi: int,
            rebase: bool = False) -> DiarizationAnnotation:
    """Entries of the given speakers clipped to [lo, hi); optionally shifted to 0."""
    out = []
    for spk, iv in annotation.entries:
        if spk not in speakers:
            continue
        s, e = max(iv.start, lo), min(iv.end, hi)
        if e > s:
            out.append((spk, SampleInterval(s - lo, e - lo) if rebase else SampleInterval(s, e)))
    return DiarizationAnnotation(tuple(out), hi - lo if rebase else annotation.total_len)


def _pair_overlaps(annotation: DiarizationAnnotation, pair) -> list:
    """Maximal both-speaking intervals of the pair over the whole recording."""
    a_ivs = annotation.speaker_intervals(pair[0])
    b_ivs = annotation.speaker_intervals(pair[1])
    out = []
    i = j = 0
    while i < len(a_ivs) and j < len(b_ivs):
        s = max(a_ivs[i].start, b_ivs[j].start)
        e = min(a_ivs[i].end, b_ivs[j].end)
        if e > s:
            out.append(SampleInterval(s, e))
        if a_ivs[i].end <= b_ivs[j].end:
            i += 1
        else:
            j += 1
    return out


def _overlap_containing(overlaps, pos: int):
    for iv in overlaps:
        if iv.start < pos < iv.end:
            return iv
    return None


def _clean_cut(pos, overlaps, boundaries, slack):
    """Shift a cut candidate so it never lands strictly inside an overlap.

    Prefers the nearest classification boundary at or left of pos within
    slack; falls back to pos itself, or to the overlap's start when pos
    would bisect one.
    """
    candidates = [b for b in boundaries if pos - slack <= b <= pos
                  and _overlap_containing(overlaps, b) is None]
    if candidates:
        return max(candidates)
    hit = _overlap_containing(overlaps, pos)
    return hit.start if hit is not None else pos


def build_windows(annotation: DiarizationAnnotation, min_len: int, max_len: int,
                  slack: int = CUT_SLACK_DEFAULT) -> list:
    """Carve a recording into non-overlapping two-speaker dialogue windows.

    Regions where a third speaker is active are excluded entirely; runs
    longer than max_len are split greedily left-to-right, never bisecting a
    both-speaking interval; chunks shorter than min_len are dropped.
    """
    pts = _boundaries(annotation)
    segs = [(a, b, _active_at(annotation, a)) for a, b in zip(pts[:-1], pts[1:])]

    # accumulate maximal regions whose union of speakers stays at two
    regions = []  # (start, end, speaker pair set)
    start = None
    spk_set: set = set()
    i = 0
    while i < len(segs):
        a, b, active = segs[i]
        if len(spk_set | active) <= 2:
            if start is None:
                start = a
            spk_set |= active
            i += 1
            continue
        # intrusion: close the region before the intruders, skip their activity
        intruders = active - spk_set
        if start is not None and len(spk_set) == 2:
            regions.append((start, a, frozenset(spk_set)))
        resume = max(iv.end for spk, iv in annotation.entries
                     if spk in intruders and iv.start <= a < iv.end)
        start, spk_set = None, set()
        while i < len(segs) and segs[i][0] < resume:
            i += 1
    if start is not None and len(spk_set) == 2:
        regions.append((start, annotation.total_len, frozenset(spk_set)))

    windows = []
    for lo, hi, pair_set in regions:
        pair = sorted(pair_set, key=str)
        overlaps = _pair_overlaps(annotation, pair)

        # trim to the pair's activity span; shift edges off any bisected overlap
        pair_ivs = [iv for spk, iv in annotation.entries if spk in pair_set]
        act_lo = max(lo, min(iv.start for iv in pair_ivs if iv.end > lo))
        act_hi = min(hi, max(iv.end for iv in pair_ivs if iv.start < hi))
        hit = _overlap_containing(overlaps, act_lo)
        if hit is not None:
            act_lo = hit.end
        hit = _overlap_containing(overlaps, act_hi)
        if hit is not None:
            act_hi = hit.start
        if act_hi - act_lo < min_len:
            continue

        boundaries = sorted({act_lo, act_hi}
                            | {iv.start for iv in overlaps} | {iv.end for iv in overlaps}
                            | {p for p in pts if act_lo <= p <= act_hi})
        pos = act_lo
        while act_hi - pos >= min_len:
            if act_hi - pos <= max_len:
                windows.append((pos, act_hi, pair))
                break
            cut = _clean_cut(pos + max_len, overlaps, boundaries, slack)
            if cut - pos < min_len:
                # a huge overlap blocks any legal cut; drop through its end
                hit = _overlap_containing(overlaps, pos + max_len)
                pos = hit.end if hit is not None else cut
                continue
            windows.append((pos, cut, pair))
            pos = cut

    out = []
    for s, e, pair in windows:
        local = _subset(annotation, set(pair), s, e, rebase=True)
        if len(local.speakers()) != 2:
            continue  # one speaker silent throughout this chunk
        out.append(DialogueWindow(SampleInterval(s, e), local))
    return out


def parse_annotation_tsv(text: str, sample_rate: int, total_len: int,
                         merge_gap: int = MERGE_GAP_DEFAULT) -> DiarizationAnnotation:
    """Parse `start_s<TAB>end_s<TAB>speaker` lines into a normalized annotation.

    Seconds are converted to sample indices by rounding half-up.
    """
    entries = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ValueError(f"line {lineno}: expected 3 tab-separated fields")
        start_s, end_s, speaker = parts
        s = int(float(start_s) * sample_rate + 0.5)
        e = int(float(end_s) * sample_rate + 0.5)
        if e <= s:
            raise ValueError(f"line {lineno}: end must exceed start")
        entries.append((speaker, SampleInterval(s, min(e, total_len))))
    return normalize_annotation(entries, total_len, merge_gap=merge_gap)


def format_annotation_tsv(annotation: DiarizationAnnotation, sample_rate: int) -> str:
    """Render an annotation in the tab-separated seconds format."""
    lines = [f"{iv.start / sample_rate:.6f}\t{iv.end / sample_rate:.6f}\t{spk}"
             for spk, iv in annotation.entries]
    return "\n".join(lines) + ("\n" if lines else "")
