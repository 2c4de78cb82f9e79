"""Numba-compiled implementations of the hot per-frame kernels.

Semantics must match _numpy exactly for integer/boolean outputs; float
energies may differ in the last ulp (different summation order).
"""

import numpy as np
from numba import njit


@njit(cache=True)
def frame_energies(x, frame):
    n = x.shape[0]
    n_frames = (n + frame - 1) // frame
    out = np.empty(n_frames, dtype=np.float64)
    for i in range(n_frames):
        s = i * frame
        e = min(s + frame, n)
        acc = 0.0
        for j in range(s, e):
            acc += x[j] * x[j]
        out[i] = acc / (e - s)
    return out


@njit(cache=True)
def mask_to_runs(mask):
    n = mask.shape[0]
    count = 0
    prev = False
    for i in range(n):
        if mask[i] and not prev:
            count += 1
        prev = mask[i]
    starts = np.empty(count, dtype=np.int64)
    ends = np.empty(count, dtype=np.int64)
    idx = 0
    prev = False
    for i in range(n):
        if mask[i] and not prev:
            starts[idx] = i
            idx += 1
        if prev and not mask[i]:
            ends[idx - 1] = i
        prev = mask[i]
    if count > 0 and mask[n - 1]:
        ends[count - 1] = n
    return starts, ends


@njit(cache=True)
def refine_mask(mask, min_silence, min_speech):
    n = mask.shape[0]
    out = mask.copy()
    i = 0
    while i < n:
        if not out[i]:
            j = i
            while j < n and not out[j]:
                j += 1
            if i > 0 and j < n and (j - i) < min_silence:
                for k in range(i, j):
                    out[k] = True
            i = j
        else:
            i += 1
    i = 0
    while i < n:
        if out[i]:
            j = i
            while j < n and out[j]:
                j += 1
            if (j - i) < min_speech:
                for k in range(i, j):
                    out[k] = False
            i = j
        else:
            i += 1
    return out
