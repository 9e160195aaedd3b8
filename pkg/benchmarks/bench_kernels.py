"""Time the numpy and numba kernel backends on an 800x600 watermarking workload.

    python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import math
import timeit

import numpy as np

from roniwm import _kernels
from roniwm.analysis import synthetic_ultrasound


def workload(seed=0):
    img, roi = synthetic_ultrasound(seed=seed)
    flat = np.array(img.flat())
    args = (flat, img.width, img.height, roi.x0, roi.y0, roi.x1, roi.y1)
    return flat, args


def bench(kb, flat, args, repeat):
    pix = kb.roni_candidates(*args, 0)
    n = pix.size * 2
    k = next(c for c in (1_000_003, 37, 101, 7) if math.gcd(c, n) == 1)
    bits = np.random.default_rng(1).integers(0, 2, size=n).astype(np.uint8)
    work = flat.copy()
    cases = {
        "roni_candidates": lambda: kb.roni_candidates(*args, 0),
        "write_bits (2 planes)": lambda: kb.write_bits(work, pix, k, n, bits),
        "read_bits (2 planes)": lambda: kb.read_bits(work, pix, k, n, n),
        "clear_pixels": lambda: kb.clear_pixels(work, pix),
        "sum_squared_diff": lambda: kb.sum_squared_diff(flat, work),
        "histogram": lambda: kb.histogram(flat),
    }
    out = {}
    for name, fn in cases.items():
        fn()  # warm-up, triggers JIT compilation
        out[name] = min(timeit.repeat(fn, number=1, repeat=repeat))
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=20)
    opts = ap.parse_args()
    flat, args = workload()
    results = {name: bench(kb, flat, args, opts.repeat) for name, kb in _kernels.backends().items()}
    names = list(results)
    print(f"{'kernel':<24}" + "".join(f"{n + ' ms':>14}" for n in names) + (f"{'speedup':>10}" if len(names) > 1 else ""))
    for kernel in results[names[0]]:
        row = [results[n][kernel] * 1e3 for n in names]
        line = f"{kernel:<24}" + "".join(f"{v:>14.3f}" for v in row)
        if len(names) > 1:
            line += f"{row[0] / row[1]:>9.1f}x"
        print(line)


if __name__ == "__main__":
    main()
