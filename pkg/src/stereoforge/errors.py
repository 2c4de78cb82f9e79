"""Exception types shared across the package."""


class StereoforgeError(Exception):
    """Base class for all package errors."""


# audio I/O

class MalformedWav(StereoforgeError):
    """WAV file has a bad header or is truncated."""


class UnsupportedEncoding(StereoforgeError):
    """WAV file uses a codec or sample width we do not read."""


class IoError(StereoforgeError):
    """Filesystem-level failure while writing audio."""


class ChannelCountMismatch(StereoforgeError):
    """Operation received a buffer with the wrong channel count."""


class OutOfBounds(StereoforgeError):
    """Interval exceeds the bounds of its buffer or timeline."""


# timeline

class SpeakerCountError(StereoforgeError):
    """Annotation does not contain exactly two speakers."""


# backends

class BackendFailure(StereoforgeError):
    """Backend process crashed, replied badly, or violated its contract."""


class Timeout(StereoforgeError):
    """Backend did not answer within the configured timeout."""


class TooShort(StereoforgeError):
    """Audio clip is shorter than the operation's minimum duration."""


class SpawnError(StereoforgeError):
    """External backend process could not be started."""


class HandshakeTimeout(StereoforgeError):
    """External backend did not emit its handshake line in time."""


class ProtocolVersionMismatch(StereoforgeError):
    """External backend spoke an unknown protocol version."""


# assembly

class InsufficientSoloSpeech(StereoforgeError):
    """A speaker lacks enough non-overlapping speech for a reference clip."""

    def __init__(self, speaker, message=None):
        self.speaker = speaker
        super().__init__(message or f"speaker {speaker!r} has insufficient solo speech")


class SkippedOverlap(StereoforgeError):
    """Backend failure while resolving one overlap interval."""


# metrics

class MalformedIntervals(StereoforgeError):
    """Interval list is unsorted, overlapping, or out of bounds."""


class EmptyCorpus(StereoforgeError):
    """Aggregate statistics requested over zero dialogues."""


# pipeline

class EmptyManifest(StereoforgeError):
    """Split requested on a manifest with no records."""


class NotStereo(StereoforgeError):
    """Turn-taking stats requested on audio that is not 2-channel."""


class InvalidScript(StereoforgeError):
    """Synthetic dialogue script violates its parameter constraints."""
