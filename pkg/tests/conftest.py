import io
import math

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

pydicom = pytest.importorskip("pydicom")
from pydicom.dataset import Dataset, FileMetaDataset  # noqa: E402
from pydicom.sequence import Sequence  # noqa: E402
from pydicom.uid import ExplicitVRLittleEndian, ImplicitVRLittleEndian, generate_uid  # noqa: E402

from roniwm import GrayImage, RoiRect  # noqa: E402

US_STORAGE = "1.2.840.10008.5.1.4.1.1.6.1"


def make_dicom(
    pixels: np.ndarray,
    *,
    bits=8,
    transfer_syntax=ExplicitVRLittleEndian,
    photometric="MONOCHROME2",
    with_sequence=True,
) -> bytes:
    """Build a Part 10 file with pydicom (the independent reference writer)."""
    rows, cols = pixels.shape
    meta = FileMetaDataset()
    meta.MediaStorageSOPClassUID = US_STORAGE
    meta.MediaStorageSOPInstanceUID = generate_uid(entropy_srcs=["roniwm", str(pixels.shape)])
    meta.TransferSyntaxUID = transfer_syntax
    ds = Dataset()
    ds.file_meta = meta
    ds.SOPClassUID = US_STORAGE
    ds.SOPInstanceUID = meta.MediaStorageSOPInstanceUID
    ds.PatientName = "Test^Patient"
    ds.PatientID = "123456"
    ds.Modality = "US"
    if with_sequence:
        item = Dataset()
        item.CodeValue = "T-D4000"
        item.CodingSchemeDesignator = "SRT"
        item.CodeMeaning = "Abdomen"
        ds.AnatomicRegionSequence = Sequence([item])
        ds["AnatomicRegionSequence"].is_undefined_length = True
    ds.SamplesPerPixel = 1
    ds.PhotometricInterpretation = photometric
    ds.Rows = rows
    ds.Columns = cols
    ds.BitsAllocated = bits
    ds.BitsStored = bits
    ds.HighBit = bits - 1
    ds.PixelRepresentation = 0
    raw = pixels.astype(np.uint8 if bits == 8 else np.uint16).tobytes()
    if len(raw) % 2:
        raw += b"\x00"
    ds.PixelData = raw
    ds["PixelData"].VR = "OB" if bits == 8 else "OW"
    buf = io.BytesIO()
    implicit = transfer_syntax == ImplicitVRLittleEndian
    ds.save_as(buf, enforce_file_format=True, implicit_vr=implicit, little_endian=True)
    return buf.getvalue()


@pytest.fixture
def dicom_factory():
    return make_dicom


def ultrasound_like(width, height, roi: RoiRect, rng, depth=1, sprinkle=0.0):
    """Zero RONI around random ROI content; optional RONI pixels at or above 2**depth."""
    img = np.zeros((height, width), dtype=np.uint8)
    img[roi.y0 : roi.y1, roi.x0 : roi.x1] = rng.integers(0, 256, size=(roi.height, roi.width))
    if sprinkle:
        mask = rng.random((height, width)) < sprinkle
        vals = rng.integers(1 << depth, 256, size=(height, width))
        outside = np.ones_like(mask)
        outside[roi.y0 : roi.y1, roi.x0 : roi.x1] = False
        img[mask & outside] = vals[mask & outside]
    return GrayImage(img)


def coprime_key(n, rng, upper=10**6):
    while True:
        k = int(rng.integers(1, upper))
        if math.gcd(k, n) == 1:
            return k


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def small_marked():
    """64x64 fixture: 32x32 centred ROI, zero border."""
    from roniwm import saw_embed

    r = np.random.default_rng(7)
    roi = RoiRect(16, 16, 48, 48)
    img = ultrasound_like(64, 64, roi, r)
    marked, manifest = saw_embed(img, roi, k=37, b=1)
    return img, marked, manifest


# -- acceptance reporting: one PASS/FAIL line per criterion ------------------

_ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when not in ("setup", "call"):
        return
    key = (mark.args[0], mark.args[1])
    prev = _ACCEPTANCE.get(key, True)
    if rep.when == "call" or rep.failed:
        _ACCEPTANCE[key] = prev and rep.passed


def _natural(num):
    text = str(num)
    digits = "".join(c for c in text if c.isdigit())
    return int(digits), text


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for (num, title), ok in sorted(_ACCEPTANCE.items(), key=lambda kv: _natural(kv[0][0])):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {num:<4} {title}")
