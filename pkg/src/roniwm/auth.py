"""Pixel serialisation and SHA-256 / HMAC-SHA-256 digests."""
from __future__ import annotations

import hashlib
import hmac
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .image import GrayImage, RoiRect

DIGEST_BYTES = 32
DIGEST_BITS = 8 * DIGEST_BYTES
MAX_KEY_BYTES = 64


@dataclass(frozen=True)
class Digest256:
    value: bytes

    def __post_init__(self):
        if len(self.value) != DIGEST_BYTES:
            raise ValueError(f"digest must be {DIGEST_BYTES} bytes, got {len(self.value)}")

    @classmethod
    def from_bits(cls, bits) -> Digest256:
        bits = np.asarray(bits, dtype=np.uint8)
        if bits.shape != (DIGEST_BITS,):
            raise ValueError(f"need exactly {DIGEST_BITS} bits")
        return cls(np.packbits(bits).tobytes())

    @classmethod
    def fromhex(cls, text: str) -> Digest256:
        return cls(bytes.fromhex(text))

    def bits(self) -> np.ndarray:
        """Payload view: most significant byte first, most significant bit first."""
        return np.unpackbits(np.frombuffer(self.value, dtype=np.uint8))

    def hex(self) -> str:
        return self.value.hex()

    def __str__(self):
        return self.hex()


@dataclass(frozen=True)
class HashKey:
    """Shared secret for keyed hashing. Its repr never shows the secret."""

    secret: bytes

    def __post_init__(self):
        if not isinstance(self.secret, (bytes, bytearray)):
            raise ParameterError("hash key must be bytes")
        if not 1 <= len(self.secret) <= MAX_KEY_BYTES:
            raise ParameterError(f"hash key must be 1..{MAX_KEY_BYTES} bytes")
        object.__setattr__(self, "secret", bytes(self.secret))

    def __repr__(self):
        return f"HashKey(<{len(self.secret)} bytes>)"


def canonical_string(img: GrayImage, region: RoiRect | None = None) -> bytes:
    """Pixels of ``region`` (default: the whole image), one byte each, row-major."""
    if region is None:
        return img.tobytes()
    region.check_within(img)
    return img.pixels[region.y0 : region.y1, region.x0 : region.x1].tobytes()


def digest(s: bytes) -> Digest256:
    return Digest256(hashlib.sha256(s).digest())


def keyed_digest(key: HashKey, s: bytes) -> Digest256:
    return Digest256(hmac.new(key.secret, s, hashlib.sha256).digest())


def image_digest(
    img: GrayImage, region: RoiRect | None = None, key: HashKey | None = None
) -> Digest256:
    s = canonical_string(img, region)
    return digest(s) if key is None else keyed_digest(key, s)
