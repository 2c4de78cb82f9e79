"""Production-grade external backends for the stereoforge pipeline.

Each adapter is a child process speaking the pipeline's stdio JSON protocol
and wrapping one checkpoint: pyannote diarization, speechbrain Sepformer
separation, or speechbrain ECAPA-TDNN verification. `local:*` checkpoints
are offline DSP stand-ins for protocol and conformance testing.
"""

from .config import AdapterConfig, parse_checkpoint
from .conformance import ConformanceReport, conformance_check
from .protocol import serve

__version__ = "0.1.0"

__all__ = ["AdapterConfig", "ConformanceReport", "conformance_check",
           "parse_checkpoint", "serve"]
