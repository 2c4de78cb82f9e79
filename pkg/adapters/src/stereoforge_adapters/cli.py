"""Entry point: serve one model behind the stdio JSON protocol, or run the
conformance suite against an adapter command.

    stereoforge-adapter --kind separator --checkpoint speechbrain/sepformer-libri2mix
    stereoforge-adapter --kind verifier --checkpoint local:band-energy
    stereoforge-adapter conformance --kind separator --command "stereoforge-adapter ..."
"""

import argparse
import sys

from .config import AdapterConfig
from .conformance import conformance_check, format_report
from .protocol import serve


def _build_parser():
    parser = argparse.ArgumentParser(prog="stereoforge-adapter", description=__doc__)
    sub = parser.add_subparsers(dest="command")

    def add_serve_flags(p):
        p.add_argument("--kind", required=True,
                       choices=["diarizer", "separator", "verifier"])
        p.add_argument("--checkpoint", required=True,
                       help="hub id (pyannote/speechbrain) or local:<name>[?k=v]")
        p.add_argument("--device", default="cpu")
        p.add_argument("--chunk-s", type=float, default=0.0,
                       help="separator only: chunk calls longer than this many seconds")
        p.add_argument("--chunk-overlap-s", type=float, default=0.5)

    add_serve_flags(parser)  # default (no subcommand) serves
    conf = sub.add_parser("conformance", help="run the pipeline contract suite")
    conf.add_argument("--kind", required=True,
                      choices=["diarizer", "separator", "verifier"])
    conf.add_argument("--command", required=True,
                      help="full adapter command line to check")
    conf.add_argument("--timeout-s", type=float, default=60.0)
    return parser


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = _build_parser()
    if argv and argv[0] == "conformance":
        args = parser.parse_args(argv)
        report = conformance_check(args.command, args.kind, args.timeout_s)
        print(format_report(report))
        return 0 if report.passed else 2
    args = parser.parse_args(argv)
    config = AdapterConfig(kind=args.kind, checkpoint=args.checkpoint,
                           device=args.device, chunk_s=args.chunk_s,
                           chunk_overlap_s=args.chunk_overlap_s)
    return serve(config)


if __name__ == "__main__":
    sys.exit(main())
