"""The adapter-side protocol loop: handshake, then one JSON response line
per request line until stdin closes."""

import json
import os
import re
import sys

import numpy as np

from .chunking import separate_chunked
from .config import AdapterConfig
from .models import LoadError, load_model
from .wavio import read_wav, write_wav

PROTO_VERSION = 1

_ID_RE = re.compile(r'"id"\s*:\s*(\d+)')


def _log(message):
    print(f"stereoforge-adapter: {message}", file=sys.stderr, flush=True)


def _respond(obj):
    sys.stdout.write(json.dumps(obj) + "\n")
    sys.stdout.flush()


def _load_mono(path, expected_rate):
    samples, rate = read_wav(path)
    if rate != expected_rate:
        raise ValueError(f"{path}: sample rate {rate}, adapter expects {expected_rate} "
                         f"(resampling is not supported)")
    if samples.shape[0] != 1:
        raise ValueError(f"{path}: expected mono, got {samples.shape[0]} channels")
    return samples[0]


def _handle(config: AdapterConfig, model, req: dict):
    op = req.get("op")
    expected = {"diarizer": "diarize", "separator": "separate", "verifier": "verify"}
    if op != expected[config.kind]:
        raise ValueError(f"op {op!r} not supported by a {config.kind} adapter")

    if op == "diarize":
        samples = _load_mono(req["audio"], config.sample_rate)
        segments = model.diarize(samples, config.sample_rate)
        return [{"speaker": str(label), "start_s": float(start), "end_s": float(end)}
                for label, start, end in segments]

    if op == "separate":
        samples = _load_mono(req["audio"], config.sample_rate)
        out_dir = req["out_dir"]
        if config.chunk_s > 0:
            first, second = separate_chunked(model, samples, config.sample_rate,
                                             config.chunk_s, config.chunk_overlap_s)
        else:
            first, second = model.separate(samples, config.sample_rate)
        for name, stream in (("sep1", first), ("sep2", second)):
            if len(stream) != len(samples):
                raise ValueError(f"{name} length {len(stream)} != input {len(samples)}")
        paths = {}
        for name, stream in (("sep1", first), ("sep2", second)):
            path = os.path.join(out_dir, f"{name}.wav")
            write_wav(path, stream, config.sample_rate)
            paths[name] = path
        return paths

    reference = _load_mono(req["audio"], config.sample_rate)
    candidate = _load_mono(req["audio2"], config.sample_rate)
    ref_emb = model.embed(reference, config.sample_rate)
    cand_emb = model.embed(candidate, config.sample_rate)
    similarity = float(np.dot(ref_emb, cand_emb))
    if getattr(model, "out_of_range", False):
        return {"similarity": 1.7}  # broken-sim test fixture
    return {"similarity": float(np.clip(similarity, -1.0, 1.0))}


def serve(config: AdapterConfig) -> int:
    """Load the model, emit the handshake, answer requests until EOF.

    Exit code is nonzero only when the checkpoint cannot be loaded;
    per-request problems become ok:false responses.
    """
    try:
        model = load_model(config)
    except (LoadError, ValueError) as exc:
        _log(f"load failure: {exc}")
        return 1

    _respond({"proto": PROTO_VERSION, "kind": config.kind})
    _log(f"serving kind={config.kind} checkpoint={config.checkpoint}")

    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        try:
            req = json.loads(line)
            if not isinstance(req, dict):
                raise json.JSONDecodeError("not an object", line, 0)
        except json.JSONDecodeError:
            match = _ID_RE.search(line)
            if match:
                _respond({"id": int(match.group(1)), "ok": False,
                          "error": "malformed request JSON"})
            else:
                _log(f"ignoring malformed request with no parseable id: {line[:120]!r}")
            continue
        rid = req.get("id", 0)
        try:
            result = _handle(config, model, req)
            _respond({"id": rid, "ok": True, "result": result})
        except Exception as exc:
            _respond({"id": rid, "ok": False, "error": f"{type(exc).__name__}: {exc}"})
    return 0
