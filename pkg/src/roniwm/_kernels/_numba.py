"""numba-compiled kernels with the same signatures as the numpy path."""
import numba as nb
import numpy as np

NAME = "numba"

_opts = {"cache": True, "nogil": True}


@nb.njit(**_opts)
def roni_candidates(flat, width, height, x0, y0, x1, y1, maxval):
    out = np.empty(flat.shape[0], dtype=np.int64)
    m = 0
    for y in range(height):
        inside_rows = y0 <= y < y1
        base = y * width
        for x in range(width):
            if inside_rows and x0 <= x < x1:
                continue
            if flat[base + x] <= maxval:
                out[m] = base + x
                m += 1
    return out[:m].copy()


@nb.njit(**_opts)
def label_slots(k, n, h):
    out = np.empty(h, dtype=np.int64)
    kk = k % n
    s = 0
    for i in range(h):
        # running sum keeps every intermediate below 2n
        s += kk
        if s >= n:
            s -= n
        out[i] = s
    return out


@nb.njit(**_opts)
def write_bits(flat, pix, k, n, bits):
    npix = pix.shape[0]
    kk = k % n
    s = 0
    for i in range(bits.shape[0]):
        s += kk
        if s >= n:
            s -= n
        p = pix[s % npix]
        plane = s // npix
        mask = np.uint8(1 << plane)
        if bits[i]:
            flat[p] = flat[p] | mask
        else:
            flat[p] = flat[p] & ~mask


@nb.njit(**_opts)
def read_bits(flat, pix, k, n, h):
    npix = pix.shape[0]
    out = np.empty(h, dtype=np.uint8)
    kk = k % n
    s = 0
    for i in range(h):
        s += kk
        if s >= n:
            s -= n
        out[i] = (flat[pix[s % npix]] >> (s // npix)) & 1
    return out


@nb.njit(**_opts)
def clear_pixels(flat, pix):
    for i in range(pix.shape[0]):
        flat[pix[i]] = 0


@nb.njit(**_opts)
def _ssd(a, b):
    acc = 0
    for i in range(a.shape[0]):
        d = np.int64(a[i]) - np.int64(b[i])
        acc += d * d
    return acc


def sum_squared_diff(a, b):
    return int(_ssd(a, b))


@nb.njit(**_opts)
def _hist(flat):
    out = np.zeros(256, dtype=np.int64)
    for i in range(flat.shape[0]):
        out[flat[i]] += 1
    return out


def histogram(flat):
    return _hist(flat)
