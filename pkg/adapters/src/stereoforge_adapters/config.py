"""Adapter configuration and checkpoint-id parsing."""

from dataclasses import dataclass, field

KINDS = ("diarizer", "separator", "verifier")


@dataclass(frozen=True)
class AdapterConfig:
    kind: str
    checkpoint: str
    device: str = "cpu"
    sample_rate: int = 16000   # requests at any other rate are rejected
    chunk_s: float = 0.0       # separator: split calls longer than this (0 = never)
    chunk_overlap_s: float = 0.5

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if not self.checkpoint:
            raise ValueError("checkpoint id is required")


def parse_checkpoint(checkpoint: str):
    """Split `family:name?k=v&k2=v2` into (family, name, params).

    Checkpoints without a family prefix are treated as hub ids for the
    kind's default toolkit (pyannote for diarizers, speechbrain otherwise).
    """
    params = {}
    base = checkpoint
    if "?" in checkpoint:
        base, query = checkpoint.split("?", 1)
        for pair in query.split("&"):
            if pair:
                key, _, value = pair.partition("=")
                params[key] = value
    if ":" in base and not base.startswith(("hf:", "http")):
        family, name = base.split(":", 1)
    else:
        family, name = "hub", base.removeprefix("hf:")
    return family, name, params
