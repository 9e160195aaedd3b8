"""Vectorised numpy kernels. Reference path, and the fallback when numba is off."""
import numpy as np

NAME = "numpy"


def roni_candidates(flat, width, height, x0, y0, x1, y1, maxval):
    grid = flat.reshape(height, width)
    keep = grid <= maxval
    keep[y0:y1, x0:x1] = False
    return np.flatnonzero(keep).astype(np.int64)


def label_slots(k, n, h):
    labels = np.arange(1, h + 1, dtype=np.int64)
    return (labels * (k % n)) % n


def write_bits(flat, pix, k, n, bits):
    npix = pix.shape[0]
    slots = label_slots(k, n, bits.shape[0])
    planes = slots // npix
    targets = pix[slots % npix]
    for plane in np.unique(planes):
        sel = planes == plane
        idx = targets[sel]
        mask = np.uint8(1 << int(plane))
        flat[idx] = (flat[idx] & ~mask) | (bits[sel].astype(np.uint8) << np.uint8(plane))


def read_bits(flat, pix, k, n, h):
    npix = pix.shape[0]
    slots = label_slots(k, n, h)
    planes = (slots // npix).astype(np.uint8)
    return ((flat[pix[slots % npix]] >> planes) & 1).astype(np.uint8)


def clear_pixels(flat, pix):
    flat[pix] = 0


def sum_squared_diff(a, b):
    d = a.astype(np.int64) - b.astype(np.int64)
    return int(np.dot(d, d))


def histogram(flat):
    return np.bincount(flat, minlength=256).astype(np.int64)
