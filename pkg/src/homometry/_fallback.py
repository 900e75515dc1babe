"""Pure NumPy versions of the compiled kernels in ``_kernels.pyx``.

Same signatures and return types; results agree to floating-point rounding
(exactly, for integer-valued inputs).
"""
import numpy as np

_CHUNK = 4096


def _phases(k, n):
    kn = np.multiply.outer(n.astype(np.float64), np.asarray(k, dtype=np.float64))
    return np.exp(-2j * np.pi * (kn - np.floor(kn)))


def autocorr_1d(w, maxlag):
    w = np.asarray(w, dtype=np.float64)
    n = w.size
    return np.array([np.dot(w[: n - m], w[m:]) for m in range(maxlag + 1)])


def autocorr_2d(w, maxlag):
    w = np.asarray(w, dtype=np.float64)
    h, wd = w.shape
    M = maxlag
    out = np.zeros((2 * M + 1, 2 * M + 1))
    for dy in range(-M, M + 1):
        ys = slice(max(0, -dy), h - max(0, dy))
        ys2 = slice(max(0, dy), h + min(0, dy))
        for dx in range(-M, M + 1):
            xs = slice(max(0, -dx), wd - max(0, dx))
            xs2 = slice(max(0, dx), wd + min(0, dx))
            out[dy + M, dx + M] = np.sum(w[ys, xs] * w[ys2, xs2])
    return out


def block_power(blocks, k):
    blocks = np.asarray(blocks, dtype=np.float64)
    nb, L = blocks.shape
    acc = np.zeros((nb, len(k)), dtype=np.complex128)
    for start in range(0, L, _CHUNK):
        n = np.arange(start, min(L, start + _CHUNK))
        acc += blocks[:, n] @ _phases(k, n)
    return acc.real**2 + acc.imag**2


def block_power_2d(w, bs, k1, k2):
    w = np.asarray(w, dtype=np.float64)
    h, wd = w.shape
    n = np.arange(bs)
    ex = _phases(k1, n)  # (bs, n1)
    ey = _phases(k2, n)  # (bs, n2)
    out = []
    for by in range(h // bs):
        for bx in range(wd // bs):
            b = w[by * bs:(by + 1) * bs, bx * bs:(bx + 1) * bs]
            f = ey.T @ b @ ex
            out.append(f.real**2 + f.imag**2)
    return np.array(out)


def pointset_amplitude(pts, k1, k2):
    pts = np.asarray(pts)
    total = 0j
    for start in range(0, pts.shape[0], 1 << 20):
        p = pts[start:start + (1 << 20)]
        a = k1 * p[:, 0]
        b = k2 * p[:, 1]
        ph = (a - np.floor(a)) + (b - np.floor(b))
        ph = 2 * np.pi * (ph - np.floor(ph))
        total += complex(np.cos(ph).sum(), -np.sin(ph).sum())
    return total


def mask_overlaps(mask, maxlag):
    mask = np.asarray(mask, dtype=bool)
    h, wd = mask.shape
    M = maxlag
    out = np.zeros((2 * M + 1, 2 * M + 1), dtype=np.int64)
    for da in range(-M, M + 1):
        a1 = slice(max(0, -da), h - max(0, da))
        a2 = slice(max(0, da), h + min(0, da))
        for db in range(-M, M + 1):
            b1 = slice(max(0, -db), wd - max(0, db))
            b2 = slice(max(0, db), wd + min(0, db))
            out[da + M, db + M] = np.count_nonzero(mask[a1, b1] & mask[a2, b2])
    return out


def sliding_codes(bits, L):
    bits = np.asarray(bits, dtype=np.int64)
    n = bits.size - L + 1
    code = np.zeros(n, dtype=np.int64)
    for j in range(L):
        code = (code << 1) | bits[j:j + n]
    return code


def patch_codes(bits, L, ys, xs):
    bits = np.asarray(bits, dtype=np.int64)
    ys = np.asarray(ys)
    xs = np.asarray(xs)
    code = np.zeros(ys.size, dtype=np.int64)
    for a in range(L):
        for b in range(L):
            code = (code << 1) | bits[ys + a, xs + b]
    return code


def visible_mask(e, radius):
    out = np.zeros((2 * e + 1, 2 * e + 1), dtype=np.uint8)
    n = np.arange(-e, e + 1, dtype=np.int64)
    r2 = radius * radius
    for m in range(-e, e + 1):
        row = (np.gcd(m, n) == 1) & ((m * m + n * n).astype(np.float64) <= r2)
        out[m + e] = row
    return out
