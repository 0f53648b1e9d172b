"""Detector oracles: the built-in toy detector, the subprocess bridge with
its framed binary wire protocol, and helpers for implementing protocol
children.

Wire protocol, one request/response pair per query over stdin/stdout:

  request  = b"BBAT" + u32le width + u32le height + u32le channels
             + width*height*channels f32le pixels (row-major,
             channel-interleaved, values in [0,1])
  response = one f32le in [0,1]

The stream stays open across queries; nothing is cached.
"""

from __future__ import annotations

import math
import os
import select
import shlex
import struct
import subprocess
import time
from typing import BinaryIO, Optional

import numpy as np

from . import _kernels as kernels
from .util import stable_seed

MAGIC = b"BBAT"
HEADER = struct.Struct("<4sIII")
RESPONSE = struct.Struct("<f")


class DetectorError(RuntimeError):
    """Query failed (child crash, timeout, I/O failure)."""


class DetectorProtocolError(DetectorError):
    """The peer sent bytes that do not follow the wire protocol."""


class Detector:
    """Black-box scorer: deterministic map from an image tensor to the
    probability that it is fake. Subclasses implement _score."""

    def __init__(self):
        self.query_count = 0

    def score(self, pixels: np.ndarray) -> float:
        self.query_count += 1
        return float(self._score(pixels))

    def _score(self, pixels: np.ndarray) -> float:
        raise NotImplementedError

    def close(self):
        pass

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def _logistic(z: float) -> float:
    z = min(700.0, max(-700.0, z))
    return 1.0 / (1.0 + math.exp(-z))


class BuiltinToyDetector(Detector):
    """Linear probe on 8x8 average-pooled grayscale features.

    Weights are standard normal from the seed; the bias is set so that about
    half of uniform-noise images score above 0.5. Stands in for a real fake
    detector so the attack loop has a deterministic, cheap oracle.
    """

    POOL = 8
    CALIBRATION_IMAGES = 256

    def __init__(self, seed: int, image_size: int = 64, channels: int = 3):
        super().__init__()
        self.seed = seed
        rng = np.random.default_rng(stable_seed("toy-detector", seed))
        self.weights = rng.standard_normal(self.POOL * self.POOL)
        logits = []
        for _ in range(self.CALIBRATION_IMAGES):
            noise = rng.random((image_size, image_size, channels))
            feats = kernels.gray_pool(noise, self.POOL, self.POOL)
            logits.append(float(self.weights @ feats))
        self.bias = -float(np.median(logits))

    def _score(self, pixels: np.ndarray) -> float:
        if pixels.shape[0] < self.POOL or pixels.shape[1] < self.POOL:
            raise DetectorError(f"image smaller than the {self.POOL}x{self.POOL} pooling grid")
        feats = kernels.gray_pool(np.ascontiguousarray(pixels), self.POOL, self.POOL)
        return _logistic(float(self.weights @ feats) + self.bias)


def builtin_toy_detector(seed: int) -> BuiltinToyDetector:
    return BuiltinToyDetector(seed)


def encode_request(pixels: np.ndarray) -> bytes:
    h, w, c = pixels.shape
    return HEADER.pack(MAGIC, w, h, c) + np.ascontiguousarray(pixels, dtype="<f4").tobytes()


def decode_response(data: bytes) -> float:
    if len(data) != RESPONSE.size:
        raise DetectorProtocolError(f"response must be 4 bytes, got {data!r}")
    (value,) = RESPONSE.unpack(data)
    if math.isnan(value) or not 0.0 <= value <= 1.0:
        raise DetectorProtocolError(f"score outside [0,1]: {value!r} (bytes {data.hex()})")
    return float(value)


def read_request(stream: BinaryIO) -> Optional[np.ndarray]:
    """Child-side helper: read one framed request; None on clean EOF."""
    head = stream.read(HEADER.size)
    if not head:
        return None
    if len(head) != HEADER.size:
        raise DetectorProtocolError(f"truncated header: {head.hex()}")
    magic, w, h, c = HEADER.unpack(head)
    if magic != MAGIC:
        raise DetectorProtocolError(f"bad magic: {magic!r}")
    payload = stream.read(w * h * c * 4)
    if len(payload) != w * h * c * 4:
        raise DetectorProtocolError("truncated pixel payload")
    return np.frombuffer(payload, dtype="<f4").reshape(h, w, c).astype(float)


def write_response(stream: BinaryIO, score: float):
    stream.write(RESPONSE.pack(score))
    stream.flush()


class SubprocessDetector(Detector):
    """Bridge to an external detector speaking the framed protocol.

    One child per detector instance; a crashed or silent child turns into a
    DetectorError on the pending query, leaving the harness free to move on.
    """

    def __init__(self, command, timeout: float = 30.0):
        super().__init__()
        args = shlex.split(command) if isinstance(command, str) else list(command)
        self.command = command
        self.timeout = timeout
        self.proc = subprocess.Popen(
            args, stdin=subprocess.PIPE, stdout=subprocess.PIPE, bufsize=0
        )

    def _read_exact(self, nbytes: int) -> bytes:
        fd = self.proc.stdout.fileno()
        deadline = time.monotonic() + self.timeout
        chunks = b""
        while len(chunks) < nbytes:
            left = deadline - time.monotonic()
            if left <= 0:
                raise DetectorError(f"detector timed out after {self.timeout}s")
            ready, _, _ = select.select([fd], [], [], left)
            if not ready:
                continue
            chunk = os.read(fd, nbytes - len(chunks))
            if not chunk:
                code = self.proc.poll()
                raise DetectorError(f"detector child closed its stream (exit code {code})")
            chunks += chunk
        return chunks

    def _score(self, pixels: np.ndarray) -> float:
        if self.proc.poll() is not None:
            raise DetectorError(f"detector child exited with code {self.proc.returncode}")
        frame = encode_request(pixels)
        try:
            self.proc.stdin.write(frame)
            self.proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise DetectorError(f"failed to send query: {exc}") from exc
        return decode_response(self._read_exact(RESPONSE.size))

    def close(self):
        if self.proc.poll() is None:
            try:
                self.proc.stdin.close()
            except OSError:
                pass
            try:
                self.proc.wait(timeout=2.0)
            except subprocess.TimeoutExpired:
                self.proc.kill()
                self.proc.wait()
