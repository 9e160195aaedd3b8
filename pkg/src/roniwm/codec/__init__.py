"""Image containers: binary PGM and uncompressed 8-bit DICOM."""
from ..errors import FormatError
from .dicom import DicomDataset, DicomElement, read_dicom, write_dicom
from .pgm import read_pgm, write_pgm


def sniff(data: bytes) -> str:
    """Container kind by magic bytes: ``"dicom"`` or ``"pgm"``."""
    if data[128:132] == b"DICM":
        return "dicom"
    if data[:2] == b"P5":
        return "pgm"
    raise FormatError("unrecognised container (neither DICOM nor binary PGM)")


__all__ = [
    "DicomDataset",
    "DicomElement",
    "read_dicom",
    "write_dicom",
    "read_pgm",
    "write_pgm",
    "sniff",
]
