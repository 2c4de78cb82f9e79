"""stereoforge: turn mono two-speaker dialogues into pseudo-stereo corpora.

Pipeline: diarize -> carve two-speaker windows -> copy solo speech to its
channel -> separate overlaps -> assign separated streams by speaker
similarity -> write stereo WAVs with a provenance manifest. Also ships
turn-taking analytics (IPU/Gap/Pause/Overlap) over stereo dialogues.
"""

from .audio import CANONICAL_RATE, AudioBuffer, SampleInterval, mixdown, read_wav, rms, write_wav
from .timeline import (
    DialogueWindow,
    DiarizationAnnotation,
    FrameClassification,
    build_windows,
    classify_frames,
    normalize_annotation,
)

__version__ = "0.1.0"

__all__ = [
    "AudioBuffer", "CANONICAL_RATE", "DialogueWindow", "DiarizationAnnotation",
    "FrameClassification", "SampleInterval", "build_windows", "classify_frames",
    "mixdown", "normalize_annotation", "read_wav", "rms", "write_wav",
]
