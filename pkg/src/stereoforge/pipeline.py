"""Batch orchestration: generate pseudo-stereo corpora, split manifests,
and compute turn-taking reports. Manifests are JSON-lines, one record per
produced (or skipped) window."""

from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .assembly import AssemblyConfig, assemble_pseudo_stereo
from .audio import AudioBuffer, read_wav, write_wav
from .backends import make_backend
from .errors import (
    BackendFailure,
    EmptyManifest,
    InsufficientSoloSpeech,
    NotStereo,
    StereoforgeError,
    Timeout,
)
from .metrics import REFERENCES, VadParams, aggregate, extract_events, report_json, report_text, vad
from .synthcorpus import DialogueScript, generate, write_corpus_item
from .timeline import build_windows

log = logging.getLogger(__name__)

DEFAULT_BACKENDS = {
    "diarizer": "builtin:band-energy",
    "separator": "builtin:band-split",
    "verifier": "builtin:band-energy",
}


@dataclass(frozen=True)
class PipelineConfig:
    sample_rate: int = 16000
    min_window_s: float = 30.0
    max_window_s: float = 120.0
    cut_slack_s: float = 2.0
    merge_gap_s: float = 0.2
    seed: int = 0
    workers: int = 0        # 0 = cpu count
    backend_pool: int = 0   # 0 = same as workers; caps external model processes
    timeout_s: float = 300.0
    handshake_timeout_s: float = 30.0
    assembly: AssemblyConfig = field(default_factory=AssemblyConfig)
    vad: VadParams = field(default_factory=VadParams)


@dataclass
class ManifestRecord:
    id: str
    source_path: str
    window_start_s: float
    window_end_s: float
    output_path: str = None        # relative to the manifest directory
    speakers: list = field(default_factory=list)
    overlap_total_s: float = 0.0
    n_overlaps: int = 0
    n_skipped_overlaps: int = 0
    status: str = "ok"

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), sort_keys=True)

    @staticmethod
    def from_json(line: str) -> "ManifestRecord":
        return ManifestRecord(**json.loads(line))


@dataclass(frozen=True)
class SplitSpec:
    eval_fraction: float = 0.01
    seed: int = 0

    def __post_init__(self):
        if not (0.0 < self.eval_fraction < 1.0):
            raise ValueError(f"eval_fraction must be in (0, 1), got {self.eval_fraction}")


def derive_seed(*parts) -> int:
    digest = hashlib.sha256("|".join(str(p) for p in parts).encode()).digest()
    return int.from_bytes(digest[:8], "big")


def config_from_dict(doc: dict) -> PipelineConfig:
    doc = dict(doc)
    assembly = AssemblyConfig(**doc.pop("assembly", {}))
    vad_params = VadParams(**doc.pop("vad", {}))
    return PipelineConfig(assembly=assembly, vad=vad_params, **doc)


def _discover_inputs(input_path) -> list:
    """Return [(record id, wav path)] for a directory, manifest, or single wav."""
    path = Path(input_path)
    if not path.exists():
        raise StereoforgeError(f"input path does not exist: {path}")
    if path.is_dir():
        wavs = sorted(p for p in path.glob("*.wav")
                      if not p.name.endswith(".truth.wav"))
        pairs = []
        for p in wavs:
            stem = p.stem
            if stem.endswith(".mix"):
                stem = stem[: -len(".mix")]
            pairs.append((stem, p))
        return pairs
    if path.suffix == ".jsonl":
        pairs = []
        for line in path.read_text().splitlines():
            if not line.strip():
                continue
            doc = json.loads(line)
            src = doc.get("source_path") or doc.get("path")
            pairs.append((doc.get("id") or Path(src).stem, Path(src)))
        return pairs
    stem = path.stem[: -len(".mix")] if path.stem.endswith(".mix") else path.stem
    return [(stem, path)]


_WORKER_STATE = {}


def _build_backends(descriptors: dict, config: PipelineConfig) -> dict:
    return {kind: make_backend(kind, transport, timeout_s=config.timeout_s,
                               handshake_timeout_s=config.handshake_timeout_s)
            for kind, transport in descriptors.items()}


def _init_worker(descriptors, config):
    _WORKER_STATE["backends"] = _build_backends(descriptors, config)
    _WORKER_STATE["config"] = config


def _process_recording_job(args):
    rec_id, path, out_dir = args
    return process_recording(rec_id, path, out_dir, _WORKER_STATE["backends"],
                             _WORKER_STATE["config"])


def process_recording(rec_id, path, out_dir, backends, config: PipelineConfig) -> list:
    """Diarize one recording, carve windows, assemble each, write stereo WAVs."""
    rate = config.sample_rate

    def skip(reason, start=0.0, end=0.0):
        return [ManifestRecord(id=rec_id, source_path=str(path), window_start_s=start,
                               window_end_s=end, status=f"skipped:{reason}")]

    try:
        buf = read_wav(path)
    except StereoforgeError as exc:
        log.warning("skipping %s: %s", path, exc)
        return skip("io")
    if buf.channels != 1:
        return skip("not-mono")
    if buf.sample_rate != rate:
        log.warning("skipping %s: sample rate %d, pipeline requires %d "
                    "(resampling is out of scope)", path, buf.sample_rate, rate)
        return skip("sample-rate")

    try:
        annotation = backends["diarizer"].diarize(buf, source_path=str(path))
    except (BackendFailure, Timeout) as exc:
        log.warning("diarization failed for %s: %s", path, exc)
        return skip("diarization")

    windows = build_windows(annotation, int(config.min_window_s * rate),
                            int(config.max_window_s * rate),
                            slack=int(config.cut_slack_s * rate))
    if not windows:
        return skip("no-windows")

    records = []
    for k, window in enumerate(windows):
        win_id = f"{rec_id}.w{k:03d}"
        iv = window.source_interval
        start_s, end_s = iv.start / rate, iv.end / rate
        mix = buf.slice(iv)
        seed = derive_seed(config.seed, rec_id, k)
        try:
            result = assemble_pseudo_stereo(mix, window, backends["separator"],
                                            backends["verifier"], config.assembly, seed)
        except InsufficientSoloSpeech as exc:
            log.warning("skipping window %s: %s", win_id, exc)
            records.append(ManifestRecord(
                id=win_id, source_path=str(path), window_start_s=start_s,
                window_end_s=end_s, status="skipped:insufficient-solo"))
            continue
        out_name = f"{win_id}.stereo.wav"
        write_wav(result.stereo, Path(out_dir) / out_name)
        overlap_ivs = [piv for piv, tag in result.provenance
                       if tag in ("separated", "passthrough-short-overlap", "skipped-overlap")]
        records.append(ManifestRecord(
            id=win_id, source_path=str(path), window_start_s=start_s,
            window_end_s=end_s, output_path=out_name,
            speakers=[str(s) for s in result.speakers],
            overlap_total_s=sum(len(piv) for piv in overlap_ivs) / rate,
            n_overlaps=len(overlap_ivs),
            n_skipped_overlaps=len(result.skipped_overlaps),
            status="ok"))
    return records


def run_generate(input_path, out_dir, descriptors: dict = None,
                 config: PipelineConfig = PipelineConfig()):
    """Process a corpus into pseudo-stereo windows; returns (records, manifest path)."""
    descriptors = {**DEFAULT_BACKENDS, **(descriptors or {})}
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    inputs = _discover_inputs(input_path)
    if not inputs:
        raise StereoforgeError(f"no input recordings found under {input_path}")

    workers = config.workers or os.cpu_count() or 1
    if any(t.startswith("external:") for t in descriptors.values()):
        pool_cap = config.backend_pool or workers
        workers = max(1, min(workers, pool_cap))

    jobs = [(rec_id, path, out_dir) for rec_id, path in inputs]
    if workers == 1 or len(jobs) == 1:
        backends = _build_backends(descriptors, config)
        try:
            results = [process_recording(rec_id, path, out_dir, backends, config)
                       for rec_id, path, out_dir in jobs]
        finally:
            for backend in backends.values():
                backend.close()
    else:
        with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker,
                                 initargs=(descriptors, config)) as pool:
            results = list(pool.map(_process_recording_job, jobs))

    records = sorted((r for recs in results for r in recs), key=lambda r: r.id)
    manifest_path = out_dir / "manifest.jsonl"
    with open(manifest_path, "w") as fh:
        for record in records:
            fh.write(record.to_json() + "\n")
    snapshot = {"backends": descriptors, **dataclasses.asdict(config)}
    (out_dir / "config.resolved.json").write_text(
        json.dumps(snapshot, indent=2, sort_keys=True) + "\n")

    ok = [r for r in records if r.status == "ok"]
    total_s = sum(r.window_end_s - r.window_start_s for r in ok)
    log.info("generate: %d windows ok (%.2f h), %d skipped",
             len(ok), total_s / 3600.0, len(records) - len(ok))
    print(f"generate: {len(ok)} windows ok, {total_s / 3600.0:.3f} h total, "
          f"{len(records) - len(ok)} skipped")
    return records, manifest_path


def read_manifest(path) -> list:
    return [ManifestRecord.from_json(line)
            for line in Path(path).read_text().splitlines() if line.strip()]


def run_split(records: list, spec: SplitSpec):
    """Deterministically sample eval_fraction of the ok records."""
    if not records:
        raise EmptyManifest("cannot split an empty manifest")
    ok = sorted((r for r in records if r.status == "ok"), key=lambda r: r.id)
    n_eval = int(round(spec.eval_fraction * len(ok)))
    rng = np.random.default_rng(spec.seed)
    eval_idx = set(rng.choice(len(ok), size=n_eval, replace=False).tolist()) if n_eval else set()
    train = [r for i, r in enumerate(ok) if i not in eval_idx]
    eval_ = [r for i, r in enumerate(ok) if i in eval_idx]
    return train, eval_


def _stats_inputs(input_path) -> list:
    path = Path(input_path)
    if path.is_dir():
        return sorted(path.glob("*.wav"))
    if path.suffix == ".jsonl":
        records = read_manifest(path)
        base = path.parent
        return [base / r.output_path for r in records if r.status == "ok"]
    return [path]


def run_stats(input_path, vad_params: VadParams = VadParams(),
              reference_name: str = None):
    """Per-channel VAD + event extraction over stereo dialogues; returns
    (stats, json report dict, text table)."""
    paths = _stats_inputs(input_path)
    events_list, lens = [], []
    for path in paths:
        buf = read_wav(path)
        if buf.channels != 2:
            raise NotStereo(f"{path} has {buf.channels} channels, need 2")
        speech = [vad(AudioBuffer(buf.data[ch], buf.sample_rate), vad_params)
                  for ch in range(2)]
        events_list.append(extract_events(speech[0], speech[1], buf.n_samples,
                                          buf.sample_rate))
        lens.append(buf.duration_s)
    reference = None
    if reference_name is not None:
        if reference_name not in REFERENCES:
            raise StereoforgeError(f"unknown reference {reference_name!r}; "
                                   f"available: {sorted(REFERENCES)}")
        reference = REFERENCES[reference_name]
    stats = aggregate(events_list, reference, reference_name)
    return stats, report_json(stats, vad_params, lens), report_text(stats)


def run_synth(out_dir, count: int, seed: int = 0, duration_s: float = 60.0,
              overlap_prob: float = 0.15, pause_prob: float = 0.2) -> list:
    """Generate a synthetic corpus in the documented 4-file layout."""
    out_dir = Path(out_dir)
    item_ids = []
    for i in range(count):
        script = DialogueScript(seed=derive_seed(seed, i), duration_s=duration_s,
                                overlap_prob=overlap_prob, pause_prob=pause_prob)
        mix, truth, annotation = generate(script)
        item_id = f"{i:04d}"
        write_corpus_item(out_dir, item_id, script, mix, truth, annotation)
        item_ids.append(item_id)
    return item_ids
