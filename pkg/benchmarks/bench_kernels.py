"""Time the compiled kernels against the NumPy fallback on typical inputs.

    python3 benchmarks/bench_kernels.py [--repeat 3]
"""
import argparse
import time

import numpy as np

from homometry import _fallback, kernels

try:
    from homometry import _kernels
except ImportError:
    _kernels = None


def cases(rng):
    w = rng.choice([-1.0, 1.0], 2**16)
    blocks = np.ascontiguousarray(w.reshape(64, 1024))
    k = np.arange(256) / 256
    w2 = rng.choice([-1.0, 1.0], (256, 256))
    axis = np.arange(16) / 16
    bits = (w > 0).astype(np.uint8)
    bits2 = np.ascontiguousarray(w2 > 0, dtype=np.uint8)
    ys = rng.integers(0, 252, 10_000).astype(np.int64)
    xs = rng.integers(0, 252, 10_000).astype(np.int64)
    pts = rng.integers(-500, 501, (200_000, 2)).astype(np.int64)
    mask = (rng.random((801, 801)) < 0.6).astype(np.uint8)
    return {
        "autocorr_1d N=2^16 M=128": lambda m: m.autocorr_1d(w, 128),
        "autocorr_2d 256x256 M=16": lambda m: m.autocorr_2d(w2, 16),
        "block_power 64x1024, 256 k": lambda m: m.block_power(blocks, k),
        "block_power_2d 256x256, 16x16 k": lambda m: m.block_power_2d(w2, 64, axis, axis),
        "pointset_amplitude 2e5 points": lambda m: m.pointset_amplitude(pts, 0.5, 1 / 3),
        "mask_overlaps 801x801 M=2": lambda m: m.mask_overlaps(mask, 2),
        "sliding_codes N=2^16 L=15": lambda m: m.sliding_codes(bits, 15),
        "patch_codes 1e4 positions L=4": lambda m: m.patch_codes(bits2, 4, ys, xs),
        "visible_mask R=1000": lambda m: m.visible_mask(1000, 1000.0),
    }


def best(fn, mod, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(mod)
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    print(f"{'kernel':<34} {'numpy [s]':>10} {'cython [s]':>11} {'speedup':>8}  used")
    for name, fn in cases(rng).items():
        tp = best(fn, _fallback, args.repeat)
        if _kernels is None:
            print(f"{name:<34} {tp:>10.4f} {'n/a':>11} {'':>8}")
            continue
        tc = best(fn, _kernels, args.repeat)
        used = kernels.SOURCES[name.split()[0]]
        print(f"{name:<34} {tp:>10.4f} {tc:>11.4f} {tp / tc:>7.1f}x  {used}")


if __name__ == "__main__":
    main()
