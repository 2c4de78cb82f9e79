"""Constructs a 50-dialogue corpus whose aggregate turn-taking statistics
hit the fisher-table1 reference row exactly.

All event durations are multiples of the 10 ms VAD frame and every value in
the reference row times 50 dialogues is an integer number of frames at
16 kHz, so the corpus can be laid out with exact integer accounting:

    per dialogue: IPU 5686 frames, Gap 261, Overlap 429, Pause 483
    counts over 50 dialogues: IPU 993, Gap 144, Overlap 198, Pause 371
"""

import numpy as np

from stereoforge.audio import AudioBuffer, SampleInterval
from stereoforge.metrics import TurnTakingEvents

RATE = 16000
FRAME = 160
N_DIALOGUES = 50

# per-dialogue duration targets in frames (identical for every dialogue)
IPU_FRAMES = 5686      # 56.86 s
GAP_FRAMES = 261       # 2.61 s
OVERLAP_FRAMES = 429   # 4.29 s
PAUSE_FRAMES = 483     # 4.83 s

# corpus-wide event counts (means 19.86, 2.88, 3.96, 7.42 over 50 dialogues)
IPU_COUNT = 993
GAP_COUNT = 144
OVERLAP_COUNT = 198
PAUSE_COUNT = 371


def _distribute(total, n):
    """n integers summing to total, as equal as possible."""
    base, extra = divmod(total, n)
    return [base + (1 if i < extra else 0) for i in range(n)]


def plan_dialogues():
    ipu_counts = _distribute(IPU_COUNT, N_DIALOGUES)
    gap_counts = _distribute(GAP_COUNT, N_DIALOGUES)
    overlap_counts = _distribute(OVERLAP_COUNT, N_DIALOGUES)
    pause_counts = _distribute(PAUSE_COUNT, N_DIALOGUES)
    plans = []
    for d in range(N_DIALOGUES):
        n_ipu = ipu_counts[d]
        n_events = gap_counts[d] + overlap_counts[d] + pause_counts[d]
        n_abut = n_ipu - 1 - n_events
        assert n_abut >= 0, "not enough transitions for the event quotas"
        others = (["gap"] * gap_counts[d] + ["pause"] * pause_counts[d]
                  + ["abut"] * n_abut)
        # adjacent overlap transitions would squeeze a same-channel silence
        # below the VAD bridging threshold; keep them separated
        transitions = []
        for _ in range(overlap_counts[d]):
            transitions.append("overlap")
            if others:
                transitions.append(others.pop(0))
        transitions += others
        plans.append({
            "ipu_len": _distribute(IPU_FRAMES, n_ipu),
            "gap_len": _distribute(GAP_FRAMES, gap_counts[d]) if gap_counts[d] else [],
            "overlap_len": (_distribute(OVERLAP_FRAMES, overlap_counts[d])
                            if overlap_counts[d] else []),
            "pause_len": (_distribute(PAUSE_FRAMES, pause_counts[d])
                          if pause_counts[d] else []),
            "transitions": transitions,
        })
    return plans


def layout_dialogue(plan):
    """Place the planned IPUs on two channels.

    Returns (speech-per-channel interval lists, gap/pause/overlap interval
    lists, total length), all in samples.
    """
    speech = ([], [])
    gaps, pauses, overlaps = [], [], []
    gi = oi = pi = 0
    channel = 0
    t = 0  # frames
    for k, length in enumerate(plan["ipu_len"]):
        start, end = t, t + length
        speech[channel].append((start, end))
        if k == len(plan["ipu_len"]) - 1:
            t = end
            break
        kind = plan["transitions"][k]
        if kind == "gap":
            gaps.append((end, end + plan["gap_len"][gi]))
            t = end + plan["gap_len"][gi]
            gi += 1
            channel = 1 - channel
        elif kind == "pause":
            pauses.append((end, end + plan["pause_len"][pi]))
            t = end + plan["pause_len"][pi]
            pi += 1
        elif kind == "overlap":
            ov = plan["overlap_len"][oi]
            assert ov < length and ov < plan["ipu_len"][k + 1]
            overlaps.append((end - ov, end))
            t = end - ov
            oi += 1
            channel = 1 - channel
        else:  # abut: back-to-back cross-channel turns, no event
            t = end
            channel = 1 - channel
    total_frames = max(e for ch in speech for _, e in ch)
    to_iv = lambda pairs: tuple(SampleInterval(s * FRAME, e * FRAME) for s, e in pairs)
    return ((to_iv(speech[0]), to_iv(speech[1])),
            to_iv(gaps), to_iv(pauses), to_iv(overlaps),
            total_frames * FRAME)


def build_reference_matching_events():
    """TurnTakingEvents constructed directly from the plan (no VAD involved)."""
    events = []
    for plan in plan_dialogues():
        speech, gaps, pauses, overlaps, total = layout_dialogue(plan)
        events.append(TurnTakingEvents(ipu=speech, gap=gaps, pause=pauses,
                                       overlap=overlaps, total_len=total,
                                       sample_rate=RATE))
    return events


def build_reference_matching_wavs(out_dir):
    """Write the corpus as stereo WAVs whose VAD output is exactly the plan.

    Constant-amplitude tones aligned to the VAD frame grid make every frame
    unambiguously speech or silence.
    """
    from stereoforge.audio import write_wav

    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for d, plan in enumerate(plan_dialogues()):
        speech, _gaps, _pauses, _overlaps, total = layout_dialogue(plan)
        data = np.zeros((2, total))
        for ch, freq in ((0, 440.0), (1, 660.0)):
            for iv in speech[ch]:
                t = np.arange(iv.start, iv.end) / RATE
                data[ch, iv.start:iv.end] = 0.5 * np.sin(2 * np.pi * freq * t)
        path = out_dir / f"ref{d:02d}.wav"
        write_wav(AudioBuffer(data, RATE), path)
        paths.append(path)
    return paths
