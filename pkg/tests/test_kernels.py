import numpy as np
import pytest

from stereoforge.kernels import numba_impl, numpy_impl

from oracles import runs_of

IMPLS = [numpy_impl] + ([numba_impl] if numba_impl is not None else [])


@pytest.mark.parametrize("impl", IMPLS, ids=lambda m: m.__name__.split(".")[-1])
def test_frame_energies_against_loop(impl):
    rng = np.random.default_rng(0)
    for n, frame in ((1, 4), (160, 160), (1000, 160), (1001, 160), (483, 77)):
        x = rng.uniform(-1, 1, n)
        got = impl.frame_energies(x, frame)
        expected = []
        for s in range(0, n, frame):
            seg = x[s:s + frame]
            expected.append(sum(float(v) * float(v) for v in seg) / len(seg))
        assert got.shape[0] == len(expected)
        assert np.allclose(got, expected, rtol=1e-12)


@pytest.mark.parametrize("impl", IMPLS, ids=lambda m: m.__name__.split(".")[-1])
def test_mask_to_runs_against_oracle(impl):
    rng = np.random.default_rng(1)
    for trial in range(200):
        n = int(rng.integers(1, 200))
        mask = rng.random(n) < 0.5
        starts, ends = impl.mask_to_runs(mask)
        expected = [(s, e) for s, e, v in runs_of(mask.tolist()) if v]
        assert list(zip(starts.tolist(), ends.tolist())) == expected


@pytest.mark.parametrize("impl", IMPLS, ids=lambda m: m.__name__.split(".")[-1])
def test_refine_mask_against_oracle(impl):
    rng = np.random.default_rng(2)
    for trial in range(200):
        n = int(rng.integers(1, 300))
        mask = rng.random(n) < 0.4
        min_silence = int(rng.integers(1, 8))
        min_speech = int(rng.integers(1, 8))
        got = impl.refine_mask(mask, min_silence, min_speech)

        # oracle: bridge interior silence runs, then drop short speech runs
        work = mask.copy()
        for s, e, v in runs_of(mask.tolist()):
            if not v and s > 0 and e < n and (e - s) < min_silence:
                work[s:e] = True
        out = work.copy()
        for s, e, v in runs_of(work.tolist()):
            if v and (e - s) < min_speech:
                out[s:e] = False
        assert np.array_equal(got, out)


@pytest.mark.skipif(numba_impl is None, reason="numba unavailable")
def test_numba_numpy_parity():
    rng = np.random.default_rng(3)
    for trial in range(100):
        n = int(rng.integers(1, 500))
        x = rng.uniform(-1, 1, n)
        frame = int(rng.integers(1, 64))
        assert np.allclose(numpy_impl.frame_energies(x, frame),
                           numba_impl.frame_energies(x, frame), rtol=1e-12)
        mask = rng.random(n) < 0.5
        a = numpy_impl.mask_to_runs(mask)
        b = numba_impl.mask_to_runs(mask)
        assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
        ms, mp = int(rng.integers(1, 10)), int(rng.integers(1, 10))
        assert np.array_equal(numpy_impl.refine_mask(mask, ms, mp),
                              numba_impl.refine_mask(mask, ms, mp))


def test_env_flag_selects_numpy(monkeypatch):
    import importlib
    import stereoforge.kernels as pkg

    monkeypatch.setenv("STEREOFORGE_NO_NUMBA", "1")
    reloaded = importlib.reload(pkg)
    try:
        assert reloaded.IMPL == "numpy"
    finally:
        monkeypatch.delenv("STEREOFORGE_NO_NUMBA")
        importlib.reload(pkg)
