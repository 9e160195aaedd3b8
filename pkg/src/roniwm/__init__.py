"""Reversible fragile watermarking of grayscale medical images.

A SHA-256 (or HMAC-SHA-256) digest of the image is written into the LSBs of
the zero-valued region outside the region of interest, at positions chosen by
the keyed map ``slot = k*x mod n``. Zeroing those pixels restores the original
exactly, so the receiver can rehash and compare.
"""
__version__ = "0.1.0"

from .auth import Digest256, HashKey, canonical_string, digest, image_digest, keyed_digest
from .embed import (
    EmbedKey,
    Payload,
    SlotMap,
    build_slot_map,
    capacity,
    embed,
    extract,
    flip_restore,
    map_bit,
    map_bits,
    recover_slot_map,
)
from .errors import *  # noqa: F401,F403
from .image import INFINITE_PSNR, GrayImage, RoiRect, histogram, mse, pixel_coords, pixel_index, psnr
from .saw import (
    Status,
    VerificationReport,
    WatermarkManifest,
    saw_embed,
    saw_verify,
    verify_keyed_hash_agreement,
)
