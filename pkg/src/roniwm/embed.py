"""Slot enumeration over the RONI, keyed bit placement, LSB write/read and zero flip.

A *slot* is one writable ``(pixel, bit plane)`` position outside the ROI.
Slots are numbered 0..n-1 plane-major: all plane-0 slots in raster order,
then all plane-1 slots. Bit label ``x`` (1-based) goes to slot ``(k*x) mod n``.
With ``k = 1`` this is the keyless raster mapping, shifted by one: label ``x``
lands in slot ``x mod n``, so the last label wraps to slot 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import (
    CapacityError,
    EmptyRegionError,
    GeometryError,
    KeyRejectedError,
    ParameterError,
    SlotMismatchError,
)
from .image import GrayImage, RoiRect

DEPTHS = (1, 2)


def _check_depth(b: int) -> None:
    if b not in DEPTHS:
        raise ParameterError(f"LSB depth must be 1 or 2, got {b!r}")


@dataclass(frozen=True, eq=False)
class SlotMap:
    """Embeddable pixels (raster order, outside ``roi``) times ``depth`` planes."""

    pixels: np.ndarray
    depth: int
    roi: RoiRect
    width: int
    height: int

    def __post_init__(self):
        pix = np.ascontiguousarray(self.pixels, dtype=np.int64)
        pix.setflags(write=False)
        object.__setattr__(self, "pixels", pix)

    @property
    def n(self) -> int:
        return int(self.pixels.shape[0]) * self.depth

    def __len__(self):
        return self.n

    def slot(self, s: int) -> tuple[int, int]:
        """``(flat pixel index, bit plane)`` of slot ``s``."""
        if not 0 <= s < self.n:
            raise IndexError(s)
        plane, i = divmod(s, self.pixels.shape[0])
        return int(self.pixels[i]), plane

    @property
    def slots(self) -> list[tuple[int, int]]:
        return [(int(p), plane) for plane in range(self.depth) for p in self.pixels]

    def __eq__(self, other):
        if not isinstance(other, SlotMap):
            return NotImplemented
        return (
            (self.depth, self.roi, self.width, self.height)
            == (other.depth, other.roi, other.width, other.height)
            and np.array_equal(self.pixels, other.pixels)
        )

    def __repr__(self):
        return f"SlotMap(n={self.n}, depth={self.depth}, roi={self.roi.as_tuple()})"


@dataclass(frozen=True)
class EmbedKey:
    k: int = 1

    def __post_init__(self):
        if isinstance(self.k, bool) or not isinstance(self.k, (int, np.integer)) or self.k < 1:
            raise KeyRejectedError(f"embedding key must be a positive integer, got {self.k!r}")
        object.__setattr__(self, "k", int(self.k))

    def check(self, n: int) -> None:
        if math.gcd(self.k, n) != 1:
            raise KeyRejectedError(f"key k={self.k} shares a factor with slot count n={n}")


@dataclass(frozen=True, eq=False)
class Payload:
    bits: np.ndarray

    def __post_init__(self):
        bits = np.ascontiguousarray(self.bits, dtype=np.uint8)
        if bits.ndim != 1 or bits.size < 1:
            raise ParameterError("payload must be a non-empty 1-D bit sequence")
        if bits.max() > 1:
            raise ParameterError("payload bits must be 0 or 1")
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    @property
    def h(self) -> int:
        return int(self.bits.size)

    def __eq__(self, other):
        if not isinstance(other, Payload):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)

    def __repr__(self):
        return f"Payload(h={self.h})"


def _collect(img: GrayImage, roi: RoiRect, maxval: int) -> np.ndarray:
    roi.check_within(img)
    return _kernels.roni_candidates(
        img.flat(), img.width, img.height, roi.x0, roi.y0, roi.x1, roi.y1, maxval
    )


def build_slot_map(img: GrayImage, roi: RoiRect, b: int = 1) -> SlotMap:
    """Slots over the zero-valued pixels of ``img`` that lie outside ``roi``."""
    _check_depth(b)
    pix = _collect(img, roi, 0)
    if pix.size == 0:
        raise EmptyRegionError("no zero-valued pixels outside the ROI")
    return SlotMap(pix, b, roi, img.width, img.height)


def recover_slot_map(img: GrayImage, roi: RoiRect, b: int = 1) -> SlotMap:
    """Receiver-side slot map of a watermarked image.

    After embedding, slot pixels hold values below ``2**b``. This matches
    :func:`build_slot_map` on the original whenever the original RONI had no
    values in ``1 .. 2**b - 1`` (see :func:`roni_is_clean`).
    """
    _check_depth(b)
    pix = _collect(img, roi, (1 << b) - 1)
    if pix.size == 0:
        raise EmptyRegionError("no embeddable pixels outside the ROI")
    return SlotMap(pix, b, roi, img.width, img.height)


def roni_is_clean(img: GrayImage, roi: RoiRect, b: int) -> bool:
    """True when no pixel outside ``roi`` takes a value in ``1 .. 2**b - 1``."""
    _check_depth(b)
    return _collect(img, roi, (1 << b) - 1).size == _collect(img, roi, 0).size


def map_bit(x: int, k: int | EmbedKey, n: int) -> int:
    """Slot index of 1-based bit label ``x``."""
    key = k if isinstance(k, EmbedKey) else EmbedKey(k)
    if n < 1:
        raise ParameterError("slot count must be positive")
    key.check(n)
    if x < 0:
        raise ParameterError("bit label must be non-negative")
    return (key.k * x) % n


def map_bits(h: int, k: int | EmbedKey, n: int) -> np.ndarray:
    """Slots of labels ``1..h`` as an array."""
    key = k if isinstance(k, EmbedKey) else EmbedKey(k)
    key.check(n)
    return _kernels.label_slots(key.k, n, h)


def capacity(sm: SlotMap) -> int:
    return sm.n


def _check_binding(img: GrayImage, sm: SlotMap, key: EmbedKey, h: int) -> None:
    if (img.width, img.height) != (sm.width, sm.height):
        raise SlotMismatchError(
            f"slot map built for {sm.width}x{sm.height}, image is {img.width}x{img.height}"
        )
    if h > sm.n:
        raise CapacityError(f"payload of {h} bits exceeds capacity {sm.n}")
    key.check(sm.n)


def embed(img: GrayImage, sm: SlotMap, key: EmbedKey, p: Payload) -> GrayImage:
    """Return a copy of ``img`` with ``p`` written into the keyed slots."""
    _check_binding(img, sm, key, p.h)
    flat = img.flat()
    if sm.pixels.size and int(flat[sm.pixels].max()) >= 1 << sm.depth:
        raise SlotMismatchError("slot pixels exceed the LSB depth; slot map is not for this image")
    out = flat.copy()
    _kernels.write_bits(out, sm.pixels, key.k, sm.n, p.bits)
    return img.with_flat(out)


def extract(img: GrayImage, sm: SlotMap, key: EmbedKey, h: int) -> Payload:
    if h < 1:
        raise ParameterError("bit count must be positive")
    _check_binding(img, sm, key, h)
    return Payload(_kernels.read_bits(img.flat(), sm.pixels, key.k, sm.n, h))


def flip_restore(img: GrayImage, sm: SlotMap) -> GrayImage:
    """Zero every slot pixel in full; all other pixels are untouched."""
    if (img.width, img.height) != (sm.width, sm.height):
        raise GeometryError("slot map does not match image dimensions")
    out = img.flat().copy()
    _kernels.clear_pixels(out, sm.pixels)
    return img.with_flat(out)
