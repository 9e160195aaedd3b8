"""Grayscale raster, ROI geometry and distortion metrics."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import _kernels
from .errors import GeometryError

#: Returned by :func:`psnr` for identical images.
INFINITE_PSNR = math.inf

MAX_VALUE = 255


@dataclass(frozen=True, eq=False)
class GrayImage:
    """Immutable 8-bit grayscale image stored row-major as a ``(height, width)`` array."""

    pixels: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.pixels)
        if arr.ndim != 2:
            raise GeometryError(f"expected a 2-D raster, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise GeometryError("image must be at least 1x1")
        if arr.dtype != np.uint8:
            if arr.size and (arr.min() < 0 or arr.max() > MAX_VALUE):
                raise GeometryError("pixel values must lie in [0, 255]")
            arr = arr.astype(np.uint8)
        arr = np.array(arr, dtype=np.uint8, order="C", copy=True)
        arr.setflags(write=False)
        object.__setattr__(self, "pixels", arr)

    @classmethod
    def from_flat(cls, width: int, height: int, values: Iterable[int] | bytes) -> GrayImage:
        if isinstance(values, (bytes, bytearray, memoryview)):
            flat = np.frombuffer(bytes(values), dtype=np.uint8)
        else:
            flat = np.asarray(list(values) if not isinstance(values, np.ndarray) else values)
        if width < 1 or height < 1:
            raise GeometryError("image must be at least 1x1")
        if flat.size != width * height:
            raise GeometryError(f"{flat.size} values for a {width}x{height} image")
        return cls(flat.reshape(height, width))

    @classmethod
    def zeros(cls, width: int, height: int) -> GrayImage:
        return cls(np.zeros((height, width), dtype=np.uint8))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def size(self) -> int:
        return self.pixels.size

    def flat(self) -> np.ndarray:
        """Read-only row-major view."""
        return self.pixels.reshape(-1)

    def tobytes(self) -> bytes:
        return self.pixels.tobytes()

    def with_flat(self, flat: np.ndarray) -> GrayImage:
        return GrayImage(np.asarray(flat, dtype=np.uint8).reshape(self.height, self.width))

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and bool(np.array_equal(self.pixels, other.pixels))

    def __hash__(self):
        return hash((self.pixels.shape, self.tobytes()))

    def __repr__(self):
        return f"GrayImage({self.width}x{self.height})"


@dataclass(frozen=True)
class RoiRect:
    """Half-open rectangle ``[x0, x1) x [y0, y1)`` in pixel coordinates."""

    x0: int
    y0: int
    x1: int
    y1: int

    def __post_init__(self):
        for name in ("x0", "y0", "x1", "y1"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
                raise GeometryError(f"{name} must be an integer")
            object.__setattr__(self, name, int(v))
        if self.x0 < 0 or self.y0 < 0 or self.x0 >= self.x1 or self.y0 >= self.y1:
            raise GeometryError(f"degenerate rectangle {self.as_tuple()}")

    @classmethod
    def whole(cls, img: GrayImage) -> RoiRect:
        return cls(0, 0, img.width, img.height)

    @classmethod
    def parse(cls, text: str) -> RoiRect:
        """Parse ``"x0,y0,x1,y1"``."""
        parts = text.split(",")
        if len(parts) != 4:
            raise GeometryError(f"expected x0,y0,x1,y1, got {text!r}")
        try:
            return cls(*(int(p) for p in parts))
        except ValueError as exc:
            raise GeometryError(f"non-integer rectangle {text!r}") from exc

    @property
    def width(self) -> int:
        return self.x1 - self.x0

    @property
    def height(self) -> int:
        return self.y1 - self.y0

    @property
    def area(self) -> int:
        return self.width * self.height

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.x0, self.y0, self.x1, self.y1)

    def fits(self, width: int, height: int) -> bool:
        return self.x1 <= width and self.y1 <= height

    def check_within(self, img: GrayImage) -> None:
        if not self.fits(img.width, img.height):
            raise GeometryError(
                f"rectangle {self.as_tuple()} exceeds {img.width}x{img.height} image"
            )

    def contains(self, x: int, y: int) -> bool:
        return self.x0 <= x < self.x1 and self.y0 <= y < self.y1


def pixel_index(x: int, y: int, width: int, height: int | None = None) -> int:
    """0-based raster-scan index of column ``x``, row ``y``."""
    if width < 1 or x < 0 or y < 0 or x >= width or (height is not None and y >= height):
        raise GeometryError(f"pixel ({x}, {y}) out of bounds for width {width}")
    return y * width + x


def pixel_coords(index: int, width: int, height: int | None = None) -> tuple[int, int]:
    """Inverse of :func:`pixel_index`: returns ``(x, y)``."""
    if width < 1 or index < 0 or (height is not None and index >= width * height):
        raise GeometryError(f"index {index} out of bounds")
    y, x = divmod(index, width)
    return x, y


def _check_same_shape(a: GrayImage, b: GrayImage) -> None:
    if a.pixels.shape != b.pixels.shape:
        raise GeometryError(
            f"dimension mismatch: {a.width}x{a.height} vs {b.width}x{b.height}"
        )


def mse(a: GrayImage, b: GrayImage) -> float:
    _check_same_shape(a, b)
    return _kernels.sum_squared_diff(a.flat(), b.flat()) / a.size


def psnr(a: GrayImage, b: GrayImage) -> float:
    """PSNR in dB over the whole image with peak 255; :data:`INFINITE_PSNR` if equal."""
    _check_same_shape(a, b)
    sse = _kernels.sum_squared_diff(a.flat(), b.flat())
    if sse == 0:
        return INFINITE_PSNR
    return 10.0 * math.log10(MAX_VALUE**2 * a.size / sse)


def histogram(img: GrayImage) -> np.ndarray:
    """256 pixel counts; bin ``i`` counts pixels equal to ``i``."""
    return _kernels.histogram(img.flat())
