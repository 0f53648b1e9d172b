"""Image carrier, binary PPM (P6) I/O, and synthetic attack subjects."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .util import stable_seed


@dataclass
class Image:
    """Row-major (height, width, channels) float64 pixels in [0, 1]."""

    pixels: np.ndarray
    id: str = ""

    def __post_init__(self):
        self.pixels = np.asarray(self.pixels, dtype=float)
        if self.pixels.ndim != 3:
            raise ValueError("pixels must be (height, width, channels)")
        if self.pixels.size and (self.pixels.min() < 0.0 or self.pixels.max() > 1.0):
            raise ValueError("pixel values must lie in [0, 1]")

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def channels(self) -> int:
        return self.pixels.shape[2]


class PpmError(ValueError):
    pass


def _next_token(data: bytes, pos: int) -> tuple[bytes, int]:
    n = len(data)
    while pos < n:
        if data[pos : pos + 1].isspace():
            pos += 1
        elif data[pos : pos + 1] == b"#":
            while pos < n and data[pos : pos + 1] != b"\n":
                pos += 1
        else:
            break
    start = pos
    while pos < n and not data[pos : pos + 1].isspace():
        pos += 1
    if start == pos:
        raise PpmError("truncated PPM header")
    return data[start:pos], pos


def read_ppm(path) -> Image:
    """Read a binary P6 PPM with maxval 255; pixels map to [0,1] via /255."""
    path = Path(path)
    data = path.read_bytes()
    magic, pos = _next_token(data, 0)
    if magic != b"P6":
        raise PpmError(f"{path}: not a binary PPM (magic {magic!r})")
    wtok, pos = _next_token(data, pos)
    htok, pos = _next_token(data, pos)
    mtok, pos = _next_token(data, pos)
    width, height, maxval = int(wtok), int(htok), int(mtok)
    if maxval != 255:
        raise PpmError(f"{path}: maxval must be 255, got {maxval}")
    pos += 1  # single whitespace after maxval
    expected = width * height * 3
    raw = data[pos : pos + expected]
    if len(raw) != expected:
        raise PpmError(f"{path}: expected {expected} pixel bytes, got {len(raw)}")
    pixels = np.frombuffer(raw, dtype=np.uint8).reshape(height, width, 3) / 255.0
    return Image(pixels, id=path.stem)


def write_ppm(path, image: Image):
    """Write pixels as P6 maxval 255, quantized with round-half-to-even."""
    if image.channels != 3:
        raise PpmError("PPM output needs exactly 3 channels")
    quant = np.rint(np.clip(image.pixels, 0.0, 1.0) * 255.0).astype(np.uint8)
    header = f"P6\n{image.width} {image.height}\n255\n".encode("ascii")
    Path(path).write_bytes(header + quant.tobytes())


def generate_synthetic_fakes(count: int, seed: int, size: int = 64, channels: int = 3) -> list[Image]:
    """Deterministic smooth random Fourier-noise fields rescaled to [0,1]."""
    rng = np.random.default_rng(stable_seed("synthetic-fakes", seed))
    fy = np.fft.fftfreq(size)[:, None]
    fx = np.fft.rfftfreq(size)[None, :]
    dist = np.hypot(fy, fx) * size
    amplitude = 1.0 / (1.0 + dist) ** 2
    images = []
    for i in range(count):
        fields = np.empty((size, size, channels))
        for c in range(channels):
            spectrum = (
                rng.standard_normal(amplitude.shape) + 1j * rng.standard_normal(amplitude.shape)
            ) * amplitude
            fields[:, :, c] = np.fft.irfft2(spectrum, s=(size, size))
        lo, hi = fields.min(), fields.max()
        if hi > lo:
            fields = (fields - lo) / (hi - lo)
        else:
            fields = np.full_like(fields, 0.5)
        images.append(Image(fields, id=f"synthetic-{i}"))
    return images
