"""Small shared helpers."""

from __future__ import annotations

import hashlib


def stable_seed(*parts) -> int:
    """Deterministic 64-bit seed from a tuple of printable parts.

    Stable across processes and platforms (unlike hash()), so grid cells and
    per-image attacks stay reproducible under any parallelism.
    """
    text = "\x1f".join(str(p) for p in parts)
    digest = hashlib.blake2b(text.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")
