"""Independent brute-force oracles used by the tests.

Everything here works per-sample on explicit arrays with plain Python
run-length scans, deliberately sharing no code with the implementations
under test.
"""

import numpy as np


def runs_of(values):
    """Maximal constant runs of a 1-D sequence: list of (start, end, value)."""
    if isinstance(values, np.ndarray):
        if len(values) == 0:
            return []
        change = np.flatnonzero(values[1:] != values[:-1]) + 1
        starts = np.concatenate(([0], change))
        ends = np.concatenate((change, [len(values)]))
        return [(int(s), int(e), values[s].item()) for s, e in zip(starts, ends)]
    out = []
    start = 0
    for i in range(1, len(values) + 1):
        if i == len(values) or values[i] != values[start]:
            out.append((start, i, values[start]))
            start = i
    return out


def activity_bitmaps(annotation, labels=None):
    """Per-speaker boolean activity arrays of length total_len."""
    if labels is None:
        labels = annotation.speakers()
    bitmap = {spk: np.zeros(annotation.total_len, dtype=bool) for spk in labels}
    for spk, iv in annotation.entries:
        bitmap[spk][iv.start:iv.end] = True
    return bitmap


def classify_per_sample(annotation):
    """Label each sample silence / solo(speaker) / overlap and return maximal
    intervals per class, exactly as a per-sample labeler sees them."""
    labels = annotation.speakers()
    assert len(labels) == 2
    bitmaps = activity_bitmaps(annotation, labels)
    code = bitmaps[labels[0]].astype(np.int8) + 2 * bitmaps[labels[1]].astype(np.int8)
    solo, overlap, silence = [], [], []
    for s, e, v in runs_of(code):
        if v == 0:
            silence.append((s, e))
        elif v == 3:
            overlap.append((s, e))
        else:
            solo.append((labels[v - 1], s, e))
    return solo, overlap, silence


def intervals_to_mask(intervals, n):
    mask = np.zeros(n, dtype=bool)
    for iv in intervals:
        mask[iv.start:iv.end] = True
    return mask


def events_per_sample(speech1_mask, speech2_mask):
    """Per-sample simulation of the gap/pause/overlap flanking rule.

    Returns (gap, pause, overlap) interval lists as (start, end) tuples.
    """
    n = len(speech1_mask)
    both = speech1_mask & speech2_mask
    any_ = speech1_mask | speech2_mask

    overlap = [(s, e) for s, e, v in runs_of(both) if v]

    def active_set(pos):
        active = set()
        if speech1_mask[pos]:
            active.add(0)
        if speech2_mask[pos]:
            active.add(1)
        return active

    gaps, pauses = [], []
    for s, e, v in runs_of(any_):
        if v:
            continue
        left = active_set(s - 1) if s > 0 else None
        right = active_set(e) if e < n else None

        def flank(active):
            if active is None or not active:
                return None
            return "tie" if len(active) == 2 else next(iter(active))

        fl, fr = flank(left), flank(right)
        if fl == "tie" or fr == "tie":
            gaps.append((s, e))
        elif fl is None and fr is None:
            gaps.append((s, e))
        elif fl is None or fr is None:
            pauses.append((s, e))
        elif fl != fr:
            gaps.append((s, e))
        else:
            pauses.append((s, e))
    return gaps, pauses, overlap


def si_snr(est, ref):
    """Scale-invariant signal-to-noise ratio in dB."""
    est = np.asarray(est, dtype=np.float64)
    ref = np.asarray(ref, dtype=np.float64)
    denom = float(np.dot(ref, ref))
    if denom == 0.0:
        return float("inf") if np.allclose(est, 0) else float("-inf")
    target = (float(np.dot(est, ref)) / denom) * ref
    noise = est - target
    noise_power = float(np.dot(noise, noise))
    if noise_power == 0.0:
        return float("inf")
    return 10.0 * np.log10(float(np.dot(target, target)) / noise_power)


def random_annotation(rng, total_len, n_speakers=2, max_entries=12):
    """Random raw annotation entries for property tests."""
    from stereoforge.audio import SampleInterval

    labels = [f"s{i}" for i in range(n_speakers)]
    entries = []
    for _ in range(int(rng.integers(1, max_entries + 1))):
        spk = labels[int(rng.integers(0, n_speakers))]
        start = int(rng.integers(0, total_len - 1))
        end = int(rng.integers(start + 1, total_len + 1))
        entries.append((spk, SampleInterval(start, end)))
    return entries
