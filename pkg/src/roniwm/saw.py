"""Strict authentication watermarking: sender embed and receiver verify.

Sender: hash the image (RONI slots are zero at this point), then write the
256 digest bits into the RONI LSBs with the keyed mapping. Receiver: read the
bits back, zero the slots, rehash and compare. The parameters the receiver
needs travel in a JSON sidecar manifest.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass

from .auth import DIGEST_BITS, Digest256, HashKey, image_digest
from .embed import (
    EmbedKey,
    Payload,
    build_slot_map,
    embed,
    extract,
    flip_restore,
    recover_slot_map,
    roni_is_clean,
)
from .errors import (
    CapacityError,
    EmptyRegionError,
    GeometryError,
    KeyRejectedError,
    ManifestError,
    ParameterError,
    RoniNotCleanError,
)
from .image import GrayImage, RoiRect

FORMAT_VERSION = 1
HASH_MODES = ("whole", "roi")
_MANIFEST_FIELDS = {"version", "roi", "k", "b", "h", "hash_mode", "keyed"}
_ROI_FIELDS = {"x0", "y0", "x1", "y1"}


class Status(str, enum.Enum):
    AUTHENTIC = "authentic"
    TAMPERED = "tampered"
    MALFORMED = "malformed"


@dataclass(frozen=True)
class WatermarkManifest:
    roi: RoiRect
    k: int
    b: int
    h: int = DIGEST_BITS
    hash_mode: str = "whole"
    keyed: bool = False
    version: int = FORMAT_VERSION

    def __post_init__(self):
        if self.version != FORMAT_VERSION:
            raise ManifestError(f"unsupported manifest version {self.version!r}")
        if self.b not in (1, 2):
            raise ManifestError(f"LSB depth must be 1 or 2, got {self.b!r}")
        if self.h != DIGEST_BITS:
            raise ManifestError(f"payload length must be {DIGEST_BITS} in digest mode")
        if self.hash_mode not in HASH_MODES:
            raise ManifestError(f"unknown hash mode {self.hash_mode!r}")
        try:
            EmbedKey(self.k)
        except KeyRejectedError as exc:
            raise ManifestError(str(exc)) from exc

    def hash_region(self) -> RoiRect | None:
        return self.roi if self.hash_mode == "roi" else None

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "roi": {"x0": self.roi.x0, "y0": self.roi.y0, "x1": self.roi.x1, "y1": self.roi.y1},
            "k": self.k,
            "b": self.b,
            "h": self.h,
            "hash_mode": self.hash_mode,
            "keyed": self.keyed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, obj) -> WatermarkManifest:
        if not isinstance(obj, dict):
            raise ManifestError("manifest must be a JSON object")
        keys = set(obj)
        if keys != _MANIFEST_FIELDS:
            extra, missing = keys - _MANIFEST_FIELDS, _MANIFEST_FIELDS - keys
            raise ManifestError(f"manifest fields: unknown {sorted(extra)}, missing {sorted(missing)}")
        roi = obj["roi"]
        if not isinstance(roi, dict) or set(roi) != _ROI_FIELDS:
            raise ManifestError("roi must be an object with exactly x0, y0, x1, y1")
        for name in ("version", "k", "b", "h"):
            if not _is_int(obj[name]):
                raise ManifestError(f"{name} must be an integer")
        if not all(_is_int(v) for v in roi.values()):
            raise ManifestError("roi coordinates must be integers")
        if not isinstance(obj["keyed"], bool):
            raise ManifestError("keyed must be true or false")
        try:
            rect = RoiRect(roi["x0"], roi["y0"], roi["x1"], roi["y1"])
        except GeometryError as exc:
            raise ManifestError(str(exc)) from exc
        return cls(
            roi=rect,
            k=obj["k"],
            b=obj["b"],
            h=obj["h"],
            hash_mode=obj["hash_mode"],
            keyed=obj["keyed"],
            version=obj["version"],
        )

    @classmethod
    def from_json(cls, text: str | bytes) -> WatermarkManifest:
        try:
            obj = json.loads(text)
        except (ValueError, UnicodeDecodeError) as exc:
            raise ManifestError(f"manifest is not valid JSON: {exc}") from exc
        return cls.from_dict(obj)


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


@dataclass(frozen=True)
class VerificationReport:
    status: Status
    extracted_digest: Digest256 | None = None
    recomputed_digest: Digest256 | None = None
    recovered_image: GrayImage | None = None
    mismatch_note: str = ""

    @property
    def authentic(self) -> bool:
        return self.status is Status.AUTHENTIC

    def summary(self) -> str:
        lines = [f"status: {self.status.value}"]
        lines.append(f"extracted:  {self.extracted_digest.hex() if self.extracted_digest else '-'}")
        lines.append(f"recomputed: {self.recomputed_digest.hex() if self.recomputed_digest else '-'}")
        if self.mismatch_note:
            lines.append(f"note: {self.mismatch_note}")
        return "\n".join(lines)


def saw_embed(
    img: GrayImage,
    roi: RoiRect,
    k: EmbedKey | int = 1,
    b: int = 1,
    hash_key: HashKey | None = None,
    hash_mode: str = "whole",
) -> tuple[GrayImage, WatermarkManifest]:
    """Watermark ``img`` with the digest of itself; return the image and its manifest."""
    key = k if isinstance(k, EmbedKey) else EmbedKey(k)
    if hash_mode not in HASH_MODES:
        raise ParameterError(f"unknown hash mode {hash_mode!r}")
    roi.check_within(img)
    if not roni_is_clean(img, roi, b):
        raise RoniNotCleanError(
            f"pixels outside the ROI take values in 1..{(1 << b) - 1}; "
            "restore the image before watermarking"
        )
    sm = build_slot_map(img, roi, b)
    if sm.n < DIGEST_BITS:
        raise CapacityError(f"RONI holds {sm.n} slots, need {DIGEST_BITS}")
    key.check(sm.n)
    manifest = WatermarkManifest(
        roi=roi, k=key.k, b=b, hash_mode=hash_mode, keyed=hash_key is not None
    )
    d = image_digest(img, manifest.hash_region(), hash_key)
    return embed(img, sm, key, Payload(d.bits())), manifest


def saw_verify(
    img: GrayImage, manifest: WatermarkManifest, hash_key: HashKey | None = None
) -> VerificationReport:
    """Extract, flip, rehash, compare. Never raises on bad input; never mutates ``img``."""
    if not manifest.roi.fits(img.width, img.height):
        return VerificationReport(Status.MALFORMED, mismatch_note="ROI exceeds image bounds")
    if manifest.keyed and hash_key is None:
        return VerificationReport(Status.MALFORMED, mismatch_note="manifest is keyed but no hash key given")
    if not manifest.keyed and hash_key is not None:
        return VerificationReport(Status.MALFORMED, mismatch_note="manifest is unkeyed but a hash key was given")

    key = EmbedKey(manifest.k)
    try:
        sm = recover_slot_map(img, manifest.roi, manifest.b)
        key.check(sm.n)
        if sm.n < manifest.h:
            raise CapacityError(f"only {sm.n} slots recovered")
    except (EmptyRegionError, CapacityError, KeyRejectedError) as exc:
        # the sender validated these, so a failure here means the RONI changed
        return VerificationReport(Status.TAMPERED, mismatch_note=f"embedding region altered: {exc}")

    bits = extract(img, sm, key, manifest.h)
    extracted = Digest256.from_bits(bits.bits)
    restored = flip_restore(img, sm)
    recomputed = image_digest(restored, manifest.hash_region(), hash_key)

    notes = []
    if extracted != recomputed:
        notes.append("digest mismatch")
    # unused slots and the non-payload bits of slot pixels are not covered by
    # the digest; require them to be exactly what the embedder leaves behind
    if embed(restored, sm, key, bits) != img:
        notes.append("embedding region holds bits outside the watermark")
    return VerificationReport(
        Status.TAMPERED if notes else Status.AUTHENTIC,
        extracted_digest=extracted,
        recomputed_digest=recomputed,
        recovered_image=restored,
        mismatch_note="; ".join(notes),
    )


def verify_keyed_hash_agreement(
    img: GrayImage, manifest: WatermarkManifest, wrong_key: HashKey | None
) -> VerificationReport:
    """Verify with a caller-chosen hash key, e.g. to show a wrong key fails."""
    return saw_verify(img, manifest, wrong_key)
