"""Checkpoint resolution: `local:*` DSP models or real toolkit wrappers."""

from ..config import AdapterConfig, parse_checkpoint
from .local import make_local


class LoadError(Exception):
    """Model or checkpoint could not be loaded (adapter exits nonzero)."""


def load_model(config: AdapterConfig):
    family, name, params = parse_checkpoint(config.checkpoint)
    if family == "local":
        return make_local(config.kind, name, params)
    if family != "hub":
        raise LoadError(f"unknown checkpoint family {family!r}")
    try:
        if config.kind == "diarizer":
            from .real import PyannoteDiarizer
            return PyannoteDiarizer(name, device=config.device)
        if config.kind == "separator":
            from .real import SepformerSeparator
            return SepformerSeparator(name, device=config.device)
        from .real import EcapaVerifier
        return EcapaVerifier(name, device=config.device)
    except Exception as exc:
        raise LoadError(f"cannot load {config.kind} checkpoint {name!r}: {exc}") from exc


def real_wrapper_class(kind: str):
    """The wrapper class a hub checkpoint of this kind resolves to (no loading)."""
    from . import real

    return {"diarizer": real.PyannoteDiarizer,
            "separator": real.SepformerSeparator,
            "verifier": real.EcapaVerifier}[kind]
