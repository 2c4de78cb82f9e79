"""Runnable test backend for exercising the stdio JSON protocol.

    python -m stereoforge.backends.testproc --kind separator --mode wellbehaved

Modes beyond `wellbehaved` inject protocol faults for the client tests.
"""

import argparse
import json
import os
import sys
import time

from ..audio import AudioBuffer, read_wav, write_wav

MODES = ("wellbehaved", "echo", "badsim", "wrong-proto", "no-handshake",
         "hang", "crash-mid-request", "garbage")


def _respond(obj):
    print(json.dumps(obj), flush=True)


def _handle(kind, op, req, mode):
    if op == "diarize":
        buf = read_wav(req["audio"])
        return [{"speaker": "spk0", "start_s": 0.0, "end_s": buf.duration_s}]
    if op == "separate":
        buf = read_wav(req["audio"])
        half = buf.channel(0) * 0.5
        paths = {}
        for key in ("sep1", "sep2"):
            path = os.path.join(req["out_dir"], f"{key}.wav")
            write_wav(AudioBuffer(half, buf.sample_rate), path)
            paths[key] = path
        return paths
    if op == "verify":
        read_wav(req["audio"])
        read_wav(req["audio2"])
        return {"similarity": 1.7 if mode == "badsim" else 0.5}
    raise ValueError(f"unknown op {op!r}")


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--kind", required=True,
                        choices=["diarizer", "separator", "verifier"])
    parser.add_argument("--mode", default="wellbehaved", choices=MODES)
    args = parser.parse_args(argv)

    if args.mode == "no-handshake":
        return 0
    proto = 2 if args.mode == "wrong-proto" else 1
    _respond({"proto": proto, "kind": args.kind})

    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        if args.mode == "hang":
            time.sleep(3600)
        if args.mode == "crash-mid-request":
            return 1
        if args.mode == "garbage":
            print("this is not json", flush=True)
            continue
        try:
            req = json.loads(line)
        except json.JSONDecodeError:
            _respond({"id": 0, "ok": False, "error": "malformed request"})
            continue
        rid = req.get("id", 0)
        if args.mode == "echo":
            _respond({"id": rid, "ok": True, "result": {"echo": req}})
            continue
        try:
            result = _handle(args.kind, req.get("op"), req, args.mode)
            _respond({"id": rid, "ok": True, "result": result})
        except Exception as exc:
            _respond({"id": rid, "ok": False, "error": str(exc)})
    return 0


if __name__ == "__main__":
    sys.exit(main())
