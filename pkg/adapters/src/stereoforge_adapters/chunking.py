"""Chunked separation for long inputs, with cross-chunk stream alignment.

Separation models are permutation-ambiguous per call; consecutive chunks
overlap and the permutation of each new chunk is chosen to maximize
correlation with the already-assembled streams over the shared region.
"""

import numpy as np


def _corr(a, b):
    denom = np.linalg.norm(a) * np.linalg.norm(b)
    return float(np.dot(a, b) / denom) if denom > 0 else 0.0


def separate_chunked(model, samples, rate, chunk_s, overlap_s=0.5):
    """Run model.separate over overlapping chunks and stitch two streams."""
    n = len(samples)
    chunk = int(chunk_s * rate)
    overlap = min(int(overlap_s * rate), chunk // 2)
    if chunk_s <= 0 or n <= chunk:
        return model.separate(samples, rate)

    outs = (np.zeros(n), np.zeros(n))
    hop = chunk - overlap
    pos = 0
    prev_end = 0
    while pos < n:
        end = min(pos + chunk, n)
        first, second = model.separate(samples[pos:end], rate)
        if prev_end > pos:
            shared = prev_end - pos
            keep = (_corr(outs[0][pos:prev_end], first[:shared])
                    + _corr(outs[1][pos:prev_end], second[:shared]))
            swap = (_corr(outs[0][pos:prev_end], second[:shared])
                    + _corr(outs[1][pos:prev_end], first[:shared]))
            if swap > keep:
                first, second = second, first
            write_from = pos + shared // 2  # stitch mid-overlap
        else:
            write_from = pos
        outs[0][write_from:end] = first[write_from - pos:]
        outs[1][write_from:end] = second[write_from - pos:]
        prev_end = end
        if end == n:
            break
        pos += hop
    return outs
