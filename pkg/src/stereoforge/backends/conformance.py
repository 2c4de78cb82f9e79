"""Contract checks applied identically to builtin and external backends."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..audio import AudioBuffer, CANONICAL_RATE
from ..errors import StereoforgeError, Timeout
from .external import ExternalBackend


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


def _tone_noise(seconds: float, rate: int = CANONICAL_RATE, seed: int = 0) -> AudioBuffer:
    rng = np.random.default_rng(seed)
    n = int(seconds * rate)
    t = np.arange(n) / rate
    x = 0.3 * np.sin(2 * np.pi * 440.0 * t) + 0.05 * rng.standard_normal(n)
    return AudioBuffer(np.clip(x, -1, 1), rate)


def _run(name: str, fn, results: list):
    try:
        detail = fn()
        results.append(CheckResult(name, True, detail or ""))
    except Timeout as exc:
        results.append(CheckResult(name, False, f"Timeout: {exc}"))
    except StereoforgeError as exc:
        results.append(CheckResult(name, False, f"{type(exc).__name__}: {exc}"))


def check_backend(kind: str, backend) -> list:
    """Run the per-kind contract suite against an already-constructed backend."""
    results: list = []

    if kind == "diarizer":
        def diarize_basic():
            buf = _tone_noise(2.0)
            ann = backend.diarize(buf)
            for _spk, iv in ann.entries:
                if iv.end > buf.n_samples:
                    raise StereoforgeError(f"entry {iv} exceeds input length")
            return f"{len(ann.entries)} entries"
        _run("diarize-basic", diarize_basic, results)

    elif kind == "separator":
        def separate_length():
            for n in (8000, 12345, 16000):
                buf = _tone_noise(n / CANONICAL_RATE, seed=n)
                pair = backend.separate(buf)
                for label, out in (("sep1", pair.first), ("sep2", pair.second)):
                    if out.n_samples != n:
                        raise StereoforgeError(
                            f"{label}: {out.n_samples} samples for {n}-sample input")
                    if not np.all(np.isfinite(out.data)):
                        raise StereoforgeError(f"{label} contains non-finite samples")
            return "lengths preserved"
        _run("separate-length", separate_length, results)

    elif kind == "verifier":
        def verify_range():
            buf = _tone_noise(1.0)
            sim = backend.verify(buf, buf)
            if not np.isfinite(sim) or not (-1.0 <= sim <= 1.0):
                raise StereoforgeError(f"similarity {sim} outside [-1, 1]")
            return f"self-similarity {sim:.4f}"
        _run("verify-range", verify_range, results)

    if isinstance(backend, ExternalBackend):
        def failure_reporting():
            op = {"diarizer": "diarize", "separator": "separate",
                  "verifier": "verify"}[kind]
            fields = {"audio": "/nonexistent/stereoforge-conformance.wav"}
            if op == "separate":
                fields["out_dir"] = "/nonexistent"
            if op == "verify":
                fields["audio2"] = fields["audio"]
            try:
                backend.request(op, fields)
            except Timeout:
                raise
            except StereoforgeError:
                return "graceful ok:false on bad input"
            raise StereoforgeError("backend accepted a nonexistent audio path")
        _run("failure-reporting", failure_reporting, results)

    return results
