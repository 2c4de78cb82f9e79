"""Pure-numpy implementations of the hot per-frame kernels."""

import numpy as np


def frame_energies(x, frame):
    """Mean-square energy per non-overlapping frame; the last frame may be partial."""
    n = x.shape[0]
    if n == 0:
        return np.empty(0, dtype=np.float64)
    n_frames = (n + frame - 1) // frame
    full = n // frame
    out = np.empty(n_frames, dtype=np.float64)
    if full:
        out[:full] = np.mean(np.square(x[: full * frame].reshape(full, frame)), axis=1)
    if n_frames > full:
        out[full] = np.mean(np.square(x[full * frame:]))
    return out


def mask_to_runs(mask):
    """Return (starts, ends) of the maximal True runs of a boolean mask."""
    n = mask.shape[0]
    if n == 0:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    m = mask.astype(np.int8)
    diff = np.diff(m)
    starts = np.flatnonzero(diff == 1) + 1
    ends = np.flatnonzero(diff == -1) + 1
    if mask[0]:
        starts = np.concatenate(([0], starts))
    if mask[-1]:
        ends = np.concatenate((ends, [n]))
    return starts.astype(np.int64), ends.astype(np.int64)


def refine_mask(mask, min_silence, min_speech):
    """Hangover smoothing: bridge interior False runs < min_silence, then
    drop True runs < min_speech."""
    out = mask.copy()
    n = out.shape[0]
    starts, ends = mask_to_runs(~out)
    for s, e in zip(starts, ends):
        if s > 0 and e < n and (e - s) < min_silence:
            out[s:e] = True
    starts, ends = mask_to_runs(out)
    for s, e in zip(starts, ends):
        if (e - s) < min_speech:
            out[s:e] = False
    return out
