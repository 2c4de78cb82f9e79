"""Command-line surface: generate, stats, split, synth, backends check.

Exit codes: 0 success, 1 fatal configuration or I/O error, 2 partial
failures (some windows or checks failed).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

from .backends import check_backend, make_backend
from .errors import StereoforgeError
from .metrics import VadParams
from .pipeline import (
    PipelineConfig,
    SplitSpec,
    config_from_dict,
    read_manifest,
    run_generate,
    run_split,
    run_stats,
    run_synth,
)

log = logging.getLogger(__name__)


def _add_backend_flags(parser):
    parser.add_argument("--diarizer", help="diarizer descriptor (builtin:<name> or external:<cmd>)")
    parser.add_argument("--separator", help="separator descriptor")
    parser.add_argument("--verifier", help="verifier descriptor")


def _build_parser():
    parser = argparse.ArgumentParser(prog="stereoforge", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="build pseudo-stereo windows from mono dialogues")
    gen.add_argument("--input", required=True, help="directory of WAVs, manifest .jsonl, or one WAV")
    gen.add_argument("--out", required=True, help="output directory")
    _add_backend_flags(gen)
    gen.add_argument("--min-window-s", type=float, help="default 30")
    gen.add_argument("--max-window-s", type=float, help="default 120")
    gen.add_argument("--seed", type=int, help="default 0")
    gen.add_argument("--workers", type=int, help="default: cpu count")
    gen.add_argument("--backend-pool", type=int,
                     help="max external model processes (default: workers)")
    gen.add_argument("--timeout-s", type=float, help="per backend call, default 300")
    gen.add_argument("--config", help="JSON config file; explicit flags override its keys")

    stats = sub.add_parser("stats", help="turn-taking statistics over stereo dialogues")
    stats.add_argument("--input", required=True,
                       help="directory of stereo WAVs, manifest .jsonl, or one WAV")
    stats.add_argument("--reference", help="named reference row, e.g. fisher-table1")
    stats.add_argument("--out", help="directory for report.json / report.txt")
    stats.add_argument("--config", help="JSON config file (vad section applies)")

    split = sub.add_parser("split", help="train/eval split of a manifest")
    split.add_argument("--input", required=True, help="manifest .jsonl")
    split.add_argument("--out", required=True, help="directory for train.jsonl / eval.jsonl")
    split.add_argument("--eval-fraction", type=float, default=0.01)
    split.add_argument("--seed", type=int, default=0)

    synth = sub.add_parser("synth", help="generate a synthetic test corpus")
    synth.add_argument("--out", required=True)
    synth.add_argument("--count", type=int, default=5)
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--duration-s", type=float, default=60.0)
    synth.add_argument("--overlap-prob", type=float, default=0.15)
    synth.add_argument("--pause-prob", type=float, default=0.2)

    backends = sub.add_parser("backends", help="backend utilities")
    bsub = backends.add_subparsers(dest="backends_command", required=True)
    check = bsub.add_parser("check", help="run the backend contract suite")
    _add_backend_flags(check)
    check.add_argument("--timeout-s", type=float, default=60.0)
    check.add_argument("--json", action="store_true", help="machine-readable output")
    return parser


def _load_config(args, defaults: PipelineConfig) -> PipelineConfig:
    doc = {}
    if getattr(args, "config", None):
        doc = json.loads(Path(args.config).read_text())
    config = config_from_dict(doc) if doc else defaults
    overrides = {}
    for flag, field_name in (("min_window_s", "min_window_s"), ("max_window_s", "max_window_s"),
                             ("seed", "seed"), ("workers", "workers"),
                             ("backend_pool", "backend_pool"), ("timeout_s", "timeout_s")):
        value = getattr(args, flag, None)
        if value is not None:
            overrides[field_name] = value
    return dataclasses.replace(config, **overrides)


def _descriptors(args) -> dict:
    out = {}
    for kind in ("diarizer", "separator", "verifier"):
        value = getattr(args, kind, None)
        if value:
            out[kind] = value
    return out


def _cmd_generate(args) -> int:
    config = _load_config(args, PipelineConfig())
    records, manifest = run_generate(args.input, args.out, _descriptors(args), config)
    print(f"manifest: {manifest}")
    return 2 if any(r.status != "ok" for r in records) else 0


def _cmd_stats(args) -> int:
    vad_params = VadParams()
    if args.config:
        doc = json.loads(Path(args.config).read_text())
        vad_params = VadParams(**doc.get("vad", {}))
    stats, doc, table = run_stats(args.input, vad_params, args.reference)
    print(table)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(json.dumps(doc, indent=2) + "\n")
        (out / "report.txt").write_text(table + "\n")
        print(f"report: {out / 'report.json'}")
    else:
        print(json.dumps(doc, indent=2))
    return 0


def _cmd_split(args) -> int:
    records = read_manifest(args.input)
    train, eval_ = run_split(records, SplitSpec(args.eval_fraction, args.seed))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, subset in (("train", train), ("eval", eval_)):
        with open(out / f"{name}.jsonl", "w") as fh:
            for record in subset:
                fh.write(record.to_json() + "\n")
    print(f"split: {len(train)} train, {len(eval_)} eval")
    return 0


def _cmd_synth(args) -> int:
    ids = run_synth(args.out, args.count, seed=args.seed, duration_s=args.duration_s,
                    overlap_prob=args.overlap_prob, pause_prob=args.pause_prob)
    print(f"synth: wrote {len(ids)} items to {args.out}")
    return 0


def _cmd_backends_check(args) -> int:
    descriptors = _descriptors(args)
    if not descriptors:
        print("backends check: provide at least one of --diarizer/--separator/--verifier",
              file=sys.stderr)
        return 1
    all_passed = True
    report = []
    for kind, transport in descriptors.items():
        try:
            backend = make_backend(kind, transport, timeout_s=args.timeout_s)
        except StereoforgeError as exc:
            results = [{"kind": kind, "transport": transport, "check": "spawn-handshake",
                        "passed": False, "detail": f"{type(exc).__name__}: {exc}"}]
            all_passed = False
            report.extend(results)
            continue
        try:
            checks = check_backend(kind, backend)
        finally:
            backend.close()
        report.append({"kind": kind, "transport": transport, "check": "spawn-handshake",
                       "passed": True, "detail": ""})
        for result in checks:
            report.append({"kind": kind, "transport": transport, "check": result.name,
                           "passed": result.passed, "detail": result.detail})
            all_passed = all_passed and result.passed
    if args.json:
        print(json.dumps(report, indent=2))
    else:
        for entry in report:
            mark = "PASS" if entry["passed"] else "FAIL"
            detail = f" — {entry['detail']}" if entry["detail"] else ""
            print(f"[{mark}] {entry['kind']} {entry['transport']} {entry['check']}{detail}")
    return 0 if all_passed else 2


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handlers = {
        "generate": _cmd_generate,
        "stats": _cmd_stats,
        "split": _cmd_split,
        "synth": _cmd_synth,
    }
    try:
        if args.command == "backends":
            return _cmd_backends_check(args)
        return handlers[args.command](args)
    except StereoforgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
