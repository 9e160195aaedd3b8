"""Minimal DICOM Part 10 reader/writer for uncompressed 8-bit monochrome images.

Only explicit VR little endian is understood. Every element is kept as the raw
bytes it was read from, so writing an unmodified dataset reproduces the input
exactly; :func:`write_dicom` splices a new PixelData value into the original
buffer and touches nothing else.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from ..errors import FormatError, GeometryError, UnsupportedFormatError
from ..image import GrayImage

PREAMBLE_LEN = 128
MAGIC = b"DICM"
EXPLICIT_VR_LE = "1.2.840.10008.1.2.1"

PIXEL_DATA = (0x7FE0, 0x0010)
TRANSFER_SYNTAX = (0x0002, 0x0010)
SAMPLES_PER_PIXEL = (0x0028, 0x0002)
PHOTOMETRIC = (0x0028, 0x0004)
NUMBER_OF_FRAMES = (0x0028, 0x0008)
ROWS = (0x0028, 0x0010)
COLUMNS = (0x0028, 0x0011)
BITS_ALLOCATED = (0x0028, 0x0100)

ITEM = (0xFFFE, 0xE000)
ITEM_END = (0xFFFE, 0xE00D)
SEQUENCE_END = (0xFFFE, 0xE0DD)
UNDEFINED = 0xFFFFFFFF

# VRs encoded with 2 reserved bytes and a 32-bit length
_LONG_VRS = frozenset(
    [b"OB", b"OD", b"OF", b"OL", b"OV", b"OW", b"SQ", b"SV", b"UC", b"UN", b"UR", b"UT", b"UV"]
)


@dataclass(frozen=True)
class DicomElement:
    tag: tuple[int, int]
    vr: str
    value: bytes
    offset: int  # start of the element header within the file
    header_len: int
    length: int  # declared value length, UNDEFINED for delimited sequences

    @property
    def value_offset(self) -> int:
        return self.offset + self.header_len

    def __repr__(self):
        g, e = self.tag
        return f"DicomElement(({g:04X},{e:04X}) {self.vr} len={len(self.value)})"


@dataclass(frozen=True)
class DicomDataset:
    raw: bytes = field(repr=False)
    meta: tuple[DicomElement, ...]
    elements: tuple[DicomElement, ...]
    transfer_syntax: str
    rows: int
    columns: int
    bits_allocated: int
    samples_per_pixel: int
    photometric: str

    @property
    def preamble(self) -> bytes:
        return self.raw[: PREAMBLE_LEN + 4]

    @property
    def pixel_element(self) -> DicomElement:
        return self.find(PIXEL_DATA)

    @property
    def pixel_data_offset(self) -> int:
        return self.pixel_element.value_offset

    @property
    def pixel_data_length(self) -> int:
        return self.pixel_element.length

    def find(self, tag):
        for el in self.meta + self.elements:
            if el.tag == tag:
                return el
        raise KeyError(tag)

    def get(self, tag, default=None):
        try:
            return self.find(tag)
        except KeyError:
            return default


def _text(value: bytes) -> str:
    return value.decode("ascii", errors="replace").strip(" \x00")


def _u16(el: DicomElement) -> int:
    if len(el.value) < 2:
        raise FormatError(f"element {el!r} too short for US")
    return struct.unpack_from("<H", el.value)[0]


def _read_header(data: bytes, pos: int):
    """Return (tag, vr, length, header_len) for the element at ``pos``."""
    if pos + 8 > len(data):
        raise FormatError(f"length overrun: element header at {pos} past end of file")
    group, elem = struct.unpack_from("<HH", data, pos)
    if group == 0xFFFE:
        (length,) = struct.unpack_from("<I", data, pos + 4)
        return (group, elem), "", length, 8
    vr = data[pos + 4 : pos + 6]
    if not (vr.isalpha() and vr.isupper()):
        raise FormatError(f"invalid VR {vr!r} at offset {pos} (implicit VR data?)")
    if vr in _LONG_VRS:
        if pos + 12 > len(data):
            raise FormatError(f"length overrun: element header at {pos} past end of file")
        (length,) = struct.unpack_from("<I", data, pos + 8)
        return (group, elem), vr.decode(), length, 12
    (length,) = struct.unpack_from("<H", data, pos + 6)
    return (group, elem), vr.decode(), length, 8


def _skip_sequence(data: bytes, pos: int) -> int:
    """Skip an undefined-length sequence body starting at ``pos``; return the end offset."""
    while True:
        tag, _, length, hlen = _read_header(data, pos)
        pos += hlen
        if tag == SEQUENCE_END:
            return pos
        if tag != ITEM:
            raise FormatError(f"unexpected tag {tag} inside sequence")
        if length != UNDEFINED:
            pos += length
            if pos > len(data):
                raise FormatError("length overrun inside sequence item")
            continue
        while True:
            tag, _, _, hlen = _read_header(data, pos)
            if tag == ITEM_END:
                pos += hlen
                break
            pos = _read_element(data, pos)[1]


def _read_element(data: bytes, pos: int):
    tag, vr, length, hlen = _read_header(data, pos)
    if tag[0] == 0xFFFE:
        raise FormatError(f"stray delimiter {tag} at offset {pos}")
    start = pos + hlen
    if length == UNDEFINED:
        if tag == PIXEL_DATA:
            raise UnsupportedFormatError("encapsulated (compressed) pixel data is not supported")
        if vr not in ("SQ", "UN"):
            raise FormatError(f"undefined length on non-sequence element {tag}")
        end = _skip_sequence(data, start)
    else:
        end = start + length
        if end > len(data):
            raise FormatError(f"length overrun: element {tag} needs {length} bytes")
    el = DicomElement(tag, vr, data[start:end], pos, hlen, length)
    return el, end


def read_dicom(data: bytes) -> tuple[DicomDataset, GrayImage]:
    data = bytes(data)
    if len(data) < PREAMBLE_LEN + 4 or data[PREAMBLE_LEN : PREAMBLE_LEN + 4] != MAGIC:
        raise FormatError("missing DICM magic at offset 128")
    pos = PREAMBLE_LEN + 4
    meta, elements = [], []
    while pos < len(data):
        (group,) = struct.unpack_from("<H", data, pos) if pos + 2 <= len(data) else (None,)
        if group is None:
            raise FormatError("length overrun: dangling bytes at end of file")
        if group != 0x0002:
            break
        el, pos = _read_element(data, pos)
        meta.append(el)
    if not meta:
        raise FormatError("missing file meta information group")
    ts_el = next((e for e in meta if e.tag == TRANSFER_SYNTAX), None)
    if ts_el is None:
        raise FormatError("file meta lacks a transfer syntax UID")
    ts = _text(ts_el.value)
    if ts != EXPLICIT_VR_LE:
        raise UnsupportedFormatError(f"unsupported transfer syntax {ts}")
    while pos < len(data):
        el, pos = _read_element(data, pos)
        elements.append(el)
    for seq in (meta, elements):
        for prev, cur in zip(seq, seq[1:]):
            if cur.tag <= prev.tag:
                raise FormatError(f"elements out of order: {cur.tag} after {prev.tag}")

    by_tag = {e.tag: e for e in elements}
    missing = [t for t in (ROWS, COLUMNS, BITS_ALLOCATED, PIXEL_DATA) if t not in by_tag]
    if missing:
        raise UnsupportedFormatError(f"unsupported pixel module: missing {missing}")
    rows, cols = _u16(by_tag[ROWS]), _u16(by_tag[COLUMNS])
    bits = _u16(by_tag[BITS_ALLOCATED])
    spp = _u16(by_tag[SAMPLES_PER_PIXEL]) if SAMPLES_PER_PIXEL in by_tag else 1
    photometric = _text(by_tag[PHOTOMETRIC].value) if PHOTOMETRIC in by_tag else "MONOCHROME2"
    if bits != 8:
        raise UnsupportedFormatError(f"unsupported depth: bits allocated {bits}")
    if spp != 1:
        raise UnsupportedFormatError(f"unsupported samples per pixel {spp}")
    if photometric != "MONOCHROME2":
        raise UnsupportedFormatError(f"unsupported photometric interpretation {photometric}")
    if NUMBER_OF_FRAMES in by_tag:
        frames = _text(by_tag[NUMBER_OF_FRAMES].value)
        if frames not in ("", "1"):
            raise UnsupportedFormatError(f"multi-frame pixel data ({frames} frames)")
    if rows < 1 or cols < 1:
        raise UnsupportedFormatError(f"unsupported image size {cols}x{rows}")
    need = rows * cols
    pixel = by_tag[PIXEL_DATA]
    if len(pixel.value) not in (need, need + (need & 1)):
        raise FormatError(f"PixelData holds {len(pixel.value)} bytes, expected {need}")
    ds = DicomDataset(
        raw=data,
        meta=tuple(meta),
        elements=tuple(elements),
        transfer_syntax=ts,
        rows=rows,
        columns=cols,
        bits_allocated=bits,
        samples_per_pixel=spp,
        photometric=photometric,
    )
    img = GrayImage(np.frombuffer(pixel.value[:need], dtype=np.uint8).reshape(rows, cols))
    return ds, img


def write_dicom(ds: DicomDataset, img: GrayImage) -> bytes:
    """Serialise ``ds`` with its PixelData replaced by ``img``'s raster."""
    if (img.height, img.width) != (ds.rows, ds.columns):
        raise GeometryError(
            f"image is {img.width}x{img.height}, dataset declares {ds.columns}x{ds.rows}"
        )
    el = ds.pixel_element
    value = img.tobytes()
    if len(value) & 1:
        # keep an existing pad byte, otherwise NUL-pad to even length
        value += el.value[len(value) : len(value) + 1] or b"\x00"
    raw = ds.raw
    header = raw[el.offset : el.value_offset]
    if len(value) != el.length:
        if el.header_len == 12:
            header = header[:8] + struct.pack("<I", len(value))
        else:
            header = header[:6] + struct.pack("<H", len(value))
    return raw[: el.offset] + header + value + raw[el.value_offset + el.length :]
