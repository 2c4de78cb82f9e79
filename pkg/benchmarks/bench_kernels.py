"""Benchmark the numba kernels against their pure-numpy fallbacks.

    python benchmarks/bench_kernels.py

Sizes model the pipeline's hot path: VAD over 120 s windows at 16 kHz.
"""

import time

import numpy as np

from stereoforge.kernels import numba_impl, numpy_impl


def bench(fn, *args, n_warmup=3, n_iter=50):
    for _ in range(n_warmup):
        fn(*args)
    start = time.perf_counter()
    for _ in range(n_iter):
        fn(*args)
    return (time.perf_counter() - start) / n_iter * 1000  # ms


def main():
    if numba_impl is None:
        print("numba not available; nothing to compare")
        return

    rng = np.random.default_rng(0)
    print(f"{'kernel':<18}{'size':>12}{'numpy ms':>12}{'numba ms':>12}{'speedup':>10}")
    print("-" * 64)

    for seconds in (30, 120, 600):
        n = seconds * 16000
        x = rng.uniform(-1, 1, n)
        t_np = bench(numpy_impl.frame_energies, x, 160)
        t_nb = bench(numba_impl.frame_energies, x, 160)
        print(f"{'frame_energies':<18}{f'{seconds}s':>12}{t_np:>12.3f}{t_nb:>12.3f}"
              f"{t_np / t_nb:>9.1f}x")

    for n_frames in (3000, 12000, 60000):
        mask = rng.random(n_frames) < 0.5
        t_np = bench(numpy_impl.refine_mask, mask, 15, 20)
        t_nb = bench(numba_impl.refine_mask, mask, 15, 20)
        print(f"{'refine_mask':<18}{f'{n_frames}fr':>12}{t_np:>12.3f}{t_nb:>12.3f}"
              f"{t_np / t_nb:>9.1f}x")

    for n_frames in (3000, 12000, 60000):
        mask = rng.random(n_frames) < 0.5
        t_np = bench(numpy_impl.mask_to_runs, mask)
        t_nb = bench(numba_impl.mask_to_runs, mask)
        print(f"{'mask_to_runs':<18}{f'{n_frames}fr':>12}{t_np:>12.3f}{t_nb:>12.3f}"
              f"{t_np / t_nb:>9.1f}x")

    # parity spot-check on the benchmark inputs
    mask = rng.random(12000) < 0.5
    assert np.array_equal(numpy_impl.refine_mask(mask, 15, 20),
                          numba_impl.refine_mask(mask, 15, 20))
    x = rng.uniform(-1, 1, 16000)
    assert np.allclose(numpy_impl.frame_energies(x, 160),
                       numba_impl.frame_energies(x, 160), rtol=1e-12)
    print("\nparity: numba and numpy agree on benchmark inputs")


if __name__ == "__main__":
    main()
