"""Client for external model backends speaking NDJSON over stdin/stdout.

Protocol: the child prints one handshake line `{"proto": 1, "kind": ...}`,
then answers one request line with one response line. Audio travels by
temp-file path; STEREOFORGE_TMPDIR overrides where those files go.
"""

from __future__ import annotations

import json
import os
import queue
import shlex
import shutil
import subprocess
import tempfile
import threading
from dataclasses import dataclass

from ..audio import AudioBuffer, SampleInterval, read_wav, write_wav
from ..errors import (
    BackendFailure,
    HandshakeTimeout,
    ProtocolVersionMismatch,
    SpawnError,
    Timeout,
    TooShort,
)
from ..timeline import DiarizationAnnotation, normalize_annotation
from .builtin import VERIFY_MIN_S, SeparatedPair

PROTO_VERSION = 1

KINDS = ("diarizer", "separator", "verifier")


@dataclass(frozen=True)
class BackendDescriptor:
    """A backend slot: its kind plus how to reach it (builtin:<name> or external:<cmd>)."""

    kind: str
    transport: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown backend kind {self.kind!r}")
        if not (self.transport.startswith("builtin:") or self.transport.startswith("external:")):
            raise ValueError(f"transport must be builtin:<name> or external:<command>,"
                             f" got {self.transport!r}")

    @property
    def is_builtin(self) -> bool:
        return self.transport.startswith("builtin:")

    @property
    def spec(self) -> str:
        return self.transport.split(":", 1)[1]


def _mkdtemp() -> str:
    base = os.environ.get("STEREOFORGE_TMPDIR") or None
    if base:
        os.makedirs(base, exist_ok=True)
    return tempfile.mkdtemp(prefix="stereoforge-", dir=base)


class ExternalBackend:
    """Handle on one child process; one request in flight at a time."""

    def __init__(self, descriptor: BackendDescriptor, timeout_s=300.0,
                 handshake_timeout_s=30.0):
        self.descriptor = descriptor
        self.kind = descriptor.kind
        self.timeout_s = timeout_s
        argv = shlex.split(descriptor.spec)
        if not argv:
            raise SpawnError("empty backend command")
        try:
            self._proc = subprocess.Popen(
                argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                text=True, bufsize=1)
        except OSError as exc:
            raise SpawnError(f"cannot spawn {argv[0]!r}: {exc}") from exc
        self._lines: queue.Queue = queue.Queue()
        self._reader = threading.Thread(target=self._pump, daemon=True)
        self._reader.start()
        self._dead = False
        self._next_id = 0

        try:
            line = self._read_line(handshake_timeout_s, HandshakeTimeout,
                                   "no handshake line")
            try:
                handshake = json.loads(line)
            except json.JSONDecodeError as exc:
                raise BackendFailure(f"malformed handshake: {line!r}") from exc
            if handshake.get("proto") != PROTO_VERSION:
                raise ProtocolVersionMismatch(
                    f"backend speaks proto {handshake.get('proto')!r}, want {PROTO_VERSION}")
            if handshake.get("kind") != self.kind:
                raise BackendFailure(
                    f"backend reports kind {handshake.get('kind')!r}, want {self.kind!r}")
        except Exception:
            self._kill()
            raise

    def _pump(self):
        for line in self._proc.stdout:
            self._lines.put(line)
        self._lines.put(None)

    def _read_line(self, timeout, exc_type, what) -> str:
        try:
            line = self._lines.get(timeout=timeout)
        except queue.Empty:
            self._kill()
            raise exc_type(f"{what} within {timeout} s")
        if line is None:
            self._dead = True
            raise BackendFailure(f"backend process exited: {what}")
        return line

    def request(self, op: str, fields: dict) -> dict:
        if self._dead:
            raise BackendFailure("backend process is no longer running")
        rid = self._next_id
        self._next_id += 1
        payload = {"id": rid, "op": op, **fields}
        try:
            self._proc.stdin.write(json.dumps(payload) + "\n")
            self._proc.stdin.flush()
        except (OSError, ValueError) as exc:
            self._dead = True
            raise BackendFailure(f"cannot send request {rid}: {exc}") from exc
        line = self._read_line(self.timeout_s, Timeout, f"no response to request {rid}")
        try:
            resp = json.loads(line)
        except json.JSONDecodeError as exc:
            self._dead = True
            raise BackendFailure(f"non-JSON response to request {rid}: {line!r}") from exc
        if resp.get("id") != rid:
            self._dead = True
            raise BackendFailure(f"response id {resp.get('id')!r} does not match request {rid}")
        if not resp.get("ok"):
            raise BackendFailure(f"request {rid} failed: {resp.get('error', 'unknown error')}")
        return resp.get("result")

    # kind-specific operations -------------------------------------------------

    def diarize(self, audio: AudioBuffer, source_path=None) -> DiarizationAnnotation:
        self._require_kind("diarizer")
        tmp = _mkdtemp()
        try:
            wav = os.path.join(tmp, "in.wav")
            write_wav(audio, wav)
            result = self.request("diarize", {"audio": wav})
            if not isinstance(result, list):
                raise BackendFailure(f"diarize result must be a list, got {type(result).__name__}")
            entries = []
            rate, total = audio.sample_rate, audio.n_samples
            for item in result:
                s = int(float(item["start_s"]) * rate + 0.5)
                e = min(int(float(item["end_s"]) * rate + 0.5), total)
                if e > s:
                    entries.append((str(item["speaker"]), SampleInterval(s, e)))
            return normalize_annotation(entries, total)
        finally:
            shutil.rmtree(tmp, ignore_errors=True)

    def separate(self, segment: AudioBuffer) -> SeparatedPair:
        self._require_kind("separator")
        tmp = _mkdtemp()
        try:
            wav = os.path.join(tmp, "in.wav")
            out_dir = os.path.join(tmp, "out")
            os.makedirs(out_dir)
            write_wav(segment, wav)
            result = self.request("separate", {"audio": wav, "out_dir": out_dir})
            pair = []
            for key in ("sep1", "sep2"):
                buf = read_wav(result[key])
                if buf.n_samples != segment.n_samples:
                    raise BackendFailure(
                        f"{key} has {buf.n_samples} samples, input had {segment.n_samples}")
                if buf.sample_rate != segment.sample_rate:
                    raise BackendFailure(f"{key} sample rate differs from input")
                pair.append(AudioBuffer(buf.channel(0), buf.sample_rate))
            return SeparatedPair(pair[0], pair[1])
        finally:
            shutil.rmtree(tmp, ignore_errors=True)

    def verify(self, reference: AudioBuffer, candidate: AudioBuffer) -> float:
        self._require_kind("verifier")
        min_len = int(VERIFY_MIN_S * reference.sample_rate)
        if reference.n_samples < min_len or candidate.n_samples < min_len:
            raise TooShort(f"verify inputs must be at least {VERIFY_MIN_S} s")
        tmp = _mkdtemp()
        try:
            a = os.path.join(tmp, "a.wav")
            b = os.path.join(tmp, "b.wav")
            write_wav(reference, a)
            write_wav(candidate, b)
            result = self.request("verify", {"audio": a, "audio2": b})
            sim = float(result["similarity"])
            if not (-1.0 <= sim <= 1.0):
                raise BackendFailure(f"similarity {sim} outside [-1, 1]")
            return sim
        finally:
            shutil.rmtree(tmp, ignore_errors=True)

    def _require_kind(self, kind: str):
        if self.kind != kind:
            raise BackendFailure(f"backend is a {self.kind}, not a {kind}")

    def _kill(self):
        try:
            self._proc.kill()
        except OSError:
            pass
        self._dead = True

    def close(self):
        if self._proc.poll() is None:
            try:
                self._proc.stdin.close()
                self._proc.wait(timeout=5)
            except (OSError, subprocess.TimeoutExpired):
                self._kill()
        self._dead = True

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def spawn_external_backend(descriptor: BackendDescriptor, timeout_s=300.0,
                           handshake_timeout_s=30.0) -> ExternalBackend:
    """Start the child process and complete the protocol handshake."""
    return ExternalBackend(descriptor, timeout_s=timeout_s,
                           handshake_timeout_s=handshake_timeout_s)
