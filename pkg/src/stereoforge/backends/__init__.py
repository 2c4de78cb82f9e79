"""Backend interfaces: builtin reference models plus the external process client."""

from ..errors import SpawnError
from .builtin import (
    BandEnergyDiarizer,
    BandEnergyVerifier,
    BandSplitSeparator,
    OracleDiarizer,
    SeparatedPair,
    VERIFY_MIN_S,
)
from .conformance import CheckResult, check_backend
from .external import (
    PROTO_VERSION,
    BackendDescriptor,
    ExternalBackend,
    spawn_external_backend,
)

BUILTINS = {
    "diarizer": {"oracle": OracleDiarizer, "band-energy": BandEnergyDiarizer},
    "separator": {"band-split": BandSplitSeparator},
    "verifier": {"band-energy": BandEnergyVerifier},
}


def make_backend(kind: str, transport: str, timeout_s=300.0, handshake_timeout_s=30.0):
    """Construct a backend from its descriptor string (builtin:<name> or external:<cmd>)."""
    descriptor = BackendDescriptor(kind, transport)
    if descriptor.is_builtin:
        try:
            cls = BUILTINS[kind][descriptor.spec]
        except KeyError:
            raise SpawnError(f"no builtin {kind} named {descriptor.spec!r}; "
                             f"available: {sorted(BUILTINS[kind])}")
        return cls()
    return spawn_external_backend(descriptor, timeout_s=timeout_s,
                                  handshake_timeout_s=handshake_timeout_s)


__all__ = [
    "BUILTINS", "BackendDescriptor", "BandEnergyDiarizer", "BandEnergyVerifier",
    "BandSplitSeparator", "CheckResult", "ExternalBackend", "OracleDiarizer",
    "PROTO_VERSION", "SeparatedPair", "VERIFY_MIN_S", "check_backend",
    "make_backend", "spawn_external_backend",
]
