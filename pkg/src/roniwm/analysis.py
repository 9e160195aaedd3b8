"""Capacity/PSNR sweeps, histogram deltas and clone-tamper simulation."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .embed import EmbedKey, Payload, build_slot_map, embed
from .errors import GeometryError
from .image import GrayImage, RoiRect, histogram, psnr

CSV_COLUMNS = ("payload_bits", "lsb_depth", "psnr_db", "capacity_used")
KILOBIT = 1024


@dataclass(frozen=True)
class SweepRow:
    payload_bits: int
    lsb_depth: int | None  # None when the payload does not fit two planes
    psnr_db: float | None
    capacity_used: float

    @property
    def feasible(self) -> bool:
        return self.lsb_depth is not None


@dataclass(frozen=True)
class TamperSpec:
    src: RoiRect
    dst: RoiRect

    def __post_init__(self):
        if (self.src.width, self.src.height) != (self.dst.width, self.dst.height):
            raise GeometryError("clone source and target must have the same size")


def synthetic_ultrasound(
    width: int = 800,
    height: int = 600,
    roi_size: tuple[int, int] = (200, 180),
    seed: int = 0,
) -> tuple[GrayImage, RoiRect]:
    """Zero background with a speckled fan-shaped scan area; returns (image, bounding ROI).

    Scan pixels are kept at 8 or above so the background stays the only
    source of values below 4.
    """
    rw, rh = roi_size
    if not (1 <= rw <= width and 1 <= rh <= height):
        raise GeometryError("ROI size exceeds image")
    rng = np.random.default_rng(seed)
    ox, oy = (width - rw) // 2, (height - rh) // 2

    yy, xx = np.mgrid[0:rh, 0:rw].astype(np.float64)
    apex_x, apex_y = (rw - 1) / 2.0, -0.25 * rh
    r = np.hypot(xx - apex_x, yy - apex_y)
    theta = np.arctan2(xx - apex_x, yy - apex_y)
    fan = (np.abs(theta) <= math.radians(40)) & (r >= 0.35 * rh) & (r <= 1.25 * rh)

    depth = np.clip(r / (1.25 * rh), 0.0, 1.0)
    speckle = rng.rayleigh(scale=0.35, size=(rh, rw))
    tissue = 60 + 120 * (1 - 0.6 * depth) * speckle + 25 * np.sin(xx / 7.0) * np.cos(yy / 11.0)
    block = np.where(fan, np.clip(tissue, 8, 255), 0).astype(np.uint8)

    img = np.zeros((height, width), dtype=np.uint8)
    img[oy : oy + rh, ox : ox + rw] = block
    ys, xs = np.nonzero(img)
    roi = RoiRect(int(xs.min()), int(ys.min()), int(xs.max()) + 1, int(ys.max()) + 1)
    return GrayImage(img), roi


def _fill(kind: str, size: int, rng: np.random.Generator) -> np.ndarray:
    if kind == "random":
        return rng.integers(0, 2, size=size, dtype=np.uint8)
    if kind == "zeros":
        return np.zeros(size, dtype=np.uint8)
    if kind == "ones":
        return np.ones(size, dtype=np.uint8)
    raise ValueError(f"unknown fill {kind!r}")


def sweep(
    img: GrayImage,
    roi: RoiRect,
    payload_sizes,
    seed: int = 0,
    k: int = 1,
    fill: str = "random",
) -> list[SweepRow]:
    """Embed growing payloads and measure PSNR against ``img``.

    A payload uses one plane while it fits, otherwise spills into plane 1.
    Payloads are prefixes of one seeded bit stream, so larger sizes carry
    every bit of smaller ones.
    """
    return [row for row, _ in sweep_with_images(img, roi, payload_sizes, seed, k, fill)]


def _sweep_iter(img, sizes, sm1, sm2, stream, key):
    for size in sizes:
        if size < 0:
            raise ValueError("payload size must be non-negative")
        if size > sm2.n:
            yield SweepRow(size, None, None, size / sm2.n), None
            continue
        sm = sm1 if size <= sm1.n else sm2
        if size == 0:
            yield SweepRow(0, 1, psnr(img, img), 0.0), img
            continue
        marked = embed(img, sm, key, Payload(stream[:size]))
        yield SweepRow(size, sm.depth, psnr(img, marked), size / sm.n), marked


def sweep_with_images(img, roi, payload_sizes, seed=0, k=1, fill="random"):
    """Like :func:`sweep` but yields ``(row, marked image or None)`` pairs."""
    sizes = [int(s) for s in payload_sizes]
    if not sizes:
        return
    sm1 = build_slot_map(img, roi, 1)
    sm2 = build_slot_map(img, roi, 2)
    stream = _fill(fill, min(max(sizes), sm2.n), np.random.default_rng(seed))
    yield from _sweep_iter(img, sizes, sm1, sm2, stream, EmbedKey(k))


def clone_tamper(img: GrayImage, spec: TamperSpec) -> GrayImage:
    """Copy the ``spec.src`` block over ``spec.dst`` (read from the unmodified image)."""
    spec.src.check_within(img)
    spec.dst.check_within(img)
    s, d = spec.src, spec.dst
    out = np.array(img.pixels)
    out[d.y0 : d.y1, d.x0 : d.x1] = img.pixels[s.y0 : s.y1, s.x0 : s.x1]
    return GrayImage(out)


def histogram_delta(orig: GrayImage, marked: GrayImage) -> np.ndarray:
    """Signed per-bin change ``hist(marked) - hist(orig)``."""
    if orig.pixels.shape != marked.pixels.shape:
        raise GeometryError("dimension mismatch")
    return histogram(marked) - histogram(orig)


def _psnr_text(v):
    if v is None:
        return ""
    return "inf" if math.isinf(v) else repr(v)


def _psnr_json(v):
    if v is None:
        return None
    return "inf" if math.isinf(v) else v


def rows_to_csv(rows) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow(
            [r.payload_bits, "" if r.lsb_depth is None else r.lsb_depth,
             _psnr_text(r.psnr_db), repr(float(r.capacity_used))]
        )
    return buf.getvalue().encode("utf-8")


def rows_from_csv(data: bytes) -> list[SweepRow]:
    reader = csv.DictReader(io.StringIO(data.decode("utf-8")))
    out = []
    for rec in reader:
        p = rec["psnr_db"]
        out.append(
            SweepRow(
                int(rec["payload_bits"]),
                int(rec["lsb_depth"]) if rec["lsb_depth"] else None,
                None if p == "" else float(p),
                float(rec["capacity_used"]),
            )
        )
    return out


def emit_report(rows, deltas=None, verdicts=None) -> tuple[bytes, bytes]:
    """Serialise a sweep (plus optional histogram deltas and verdicts) as (CSV, JSON)."""
    doc = {
        "rows": [dict(asdict(r), psnr_db=_psnr_json(r.psnr_db)) for r in rows],
        "histogram_delta": None if deltas is None else [int(v) for v in deltas],
        "verdicts": dict(verdicts or {}),
    }
    js = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    return rows_to_csv(rows), js.encode("utf-8")


def rows_from_json(data: bytes) -> list[SweepRow]:
    doc = json.loads(data)
    out = []
    for r in doc["rows"]:
        p = r["psnr_db"]
        out.append(
            SweepRow(
                r["payload_bits"],
                r["lsb_depth"],
                math.inf if p == "inf" else p,
                r["capacity_used"],
            )
        )
    return out
