# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops.  Signatures mirror ``homometry._fallback``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, floor, M_PI

cnp.import_array()


cdef inline double _frac(double x) nogil:
    return x - floor(x)


def autocorr_1d(const double[::1] w, Py_ssize_t maxlag):
    # lag index innermost so the accumulation vectorises
    cdef Py_ssize_t n = w.shape[0], m, i, top
    cdef double v
    out = np.zeros(maxlag + 1, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        for i in range(n):
            v = w[i]
            top = maxlag + 1 if i + maxlag < n else n - i
            for m in range(top):
                o[m] += v * w[i + m]
    return out


def autocorr_2d(const double[:, ::1] w, Py_ssize_t maxlag):
    cdef Py_ssize_t h = w.shape[0], wd = w.shape[1]
    cdef Py_ssize_t dy, dx, y, x, y0, y1, lo, hi, M = maxlag
    cdef double v
    out = np.zeros((2 * M + 1, 2 * M + 1), dtype=np.float64)
    cdef double[:, ::1] o = out
    with nogil:
        for dy in range(-M, M + 1):
            y0 = 0 if dy >= 0 else -dy
            y1 = h - dy if dy >= 0 else h
            for y in range(y0, y1):
                for x in range(wd):
                    v = w[y, x]
                    lo = -M if x >= M else -x
                    hi = M if x + M < wd else wd - 1 - x
                    for dx in range(lo, hi + 1):
                        o[dy + M, dx + M] += v * w[y + dy, x + dx]
    return out


def block_power(const double[:, ::1] blocks, const double[::1] k):
    # accumulate all blocks at once against one row of the phase table
    cdef Py_ssize_t nb = blocks.shape[0], L = blocks.shape[1], nk = k.shape[0]
    cdef Py_ssize_t b, j, i
    cdef double ph, v
    cdef double[::1] c = np.empty(nk, dtype=np.float64)
    cdef double[::1] s = np.empty(nk, dtype=np.float64)
    cdef double[:, ::1] re = np.zeros((nb, nk), dtype=np.float64)
    cdef double[:, ::1] im = np.zeros((nb, nk), dtype=np.float64)
    out = np.empty((nb, nk), dtype=np.float64)
    cdef double[:, ::1] o = out
    with nogil:
        for i in range(L):
            for j in range(nk):
                ph = 2.0 * M_PI * _frac(k[j] * i)
                c[j] = cos(ph)
                s[j] = sin(ph)
            for b in range(nb):
                v = blocks[b, i]
                for j in range(nk):
                    re[b, j] += v * c[j]
                    im[b, j] -= v * s[j]
        for b in range(nb):
            for j in range(nk):
                o[b, j] = re[b, j] * re[b, j] + im[b, j] * im[b, j]
    return out


def block_power_2d(const double[:, ::1] w, Py_ssize_t bs, const double[::1] k1, const double[::1] k2):
    """|F|^2 per square block of side ``bs`` on the grid k1 (x) by k2 (y)."""
    cdef Py_ssize_t h = w.shape[0], wd = w.shape[1]
    cdef Py_ssize_t nby = h // bs, nbx = wd // bs, n1 = k1.shape[0], n2 = k2.shape[0]
    cdef Py_ssize_t by, bx, y, x, a, b
    cdef double ph, rr, ii, v
    cdef double[:, ::1] cx = np.empty((n1, bs), dtype=np.float64)
    cdef double[:, ::1] sx = np.empty((n1, bs), dtype=np.float64)
    cdef double[:, ::1] cy = np.empty((n2, bs), dtype=np.float64)
    cdef double[:, ::1] sy = np.empty((n2, bs), dtype=np.float64)
    # row transforms: rowre[y, a] = sum_x w e^{-2 pi i k1[a] x}
    cdef double[:, ::1] rowre = np.empty((bs, n1), dtype=np.float64)
    cdef double[:, ::1] rowim = np.empty((bs, n1), dtype=np.float64)
    out = np.empty((nby * nbx, n2, n1), dtype=np.float64)
    cdef double[:, :, ::1] o = out
    with nogil:
        for a in range(n1):
            for x in range(bs):
                ph = 2.0 * M_PI * _frac(k1[a] * x)
                cx[a, x] = cos(ph)
                sx[a, x] = sin(ph)
        for b in range(n2):
            for y in range(bs):
                ph = 2.0 * M_PI * _frac(k2[b] * y)
                cy[b, y] = cos(ph)
                sy[b, y] = sin(ph)
        for by in range(nby):
            for bx in range(nbx):
                for y in range(bs):
                    for a in range(n1):
                        rr = 0.0
                        ii = 0.0
                        for x in range(bs):
                            v = w[by * bs + y, bx * bs + x]
                            rr += v * cx[a, x]
                            ii -= v * sx[a, x]
                        rowre[y, a] = rr
                        rowim[y, a] = ii
                for b in range(n2):
                    for a in range(n1):
                        rr = 0.0
                        ii = 0.0
                        for y in range(bs):
                            # (re + i im) * (cy - i sy)
                            rr += rowre[y, a] * cy[b, y] + rowim[y, a] * sy[b, y]
                            ii += rowim[y, a] * cy[b, y] - rowre[y, a] * sy[b, y]
                        o[by * nbx + bx, b, a] = rr * rr + ii * ii
    return out


def pointset_amplitude(const long long[:, ::1] pts, double k1, double k2):
    cdef Py_ssize_t n = pts.shape[0], i
    cdef double re = 0.0, im = 0.0, ph
    with nogil:
        for i in range(n):
            ph = 2.0 * M_PI * _frac(_frac(k1 * pts[i, 0]) + _frac(k2 * pts[i, 1]))
            re += cos(ph)
            im -= sin(ph)
    return complex(re, im)


def mask_overlaps(const unsigned char[:, ::1] mask, Py_ssize_t maxlag):
    """counts[da+M, db+M] = #{(i,j): mask[i,j] and mask[i+da, j+db]}."""
    cdef Py_ssize_t h = mask.shape[0], wd = mask.shape[1], M = maxlag
    cdef Py_ssize_t da, db, i, j, i0, i1, j0, j1
    cdef long long c
    out = np.zeros((2 * M + 1, 2 * M + 1), dtype=np.int64)
    cdef long long[:, ::1] o = out
    with nogil:
        for da in range(-M, M + 1):
            i0 = 0 if da >= 0 else -da
            i1 = h - da if da >= 0 else h
            for db in range(-M, M + 1):
                j0 = 0 if db >= 0 else -db
                j1 = wd - db if db >= 0 else wd
                c = 0
                for i in range(i0, i1):
                    for j in range(j0, j1):
                        c += mask[i, j] & mask[i + da, j + db]
                o[da + M, db + M] = c
    return out


def sliding_codes(const unsigned char[::1] bits, Py_ssize_t L):
    cdef Py_ssize_t n = bits.shape[0], i
    cdef long long code = 0, full = (1LL << L) - 1
    out = np.empty(n - L + 1, dtype=np.int64)
    cdef long long[::1] o = out
    with nogil:
        for i in range(L):
            code = (code << 1) | bits[i]
        o[0] = code
        for i in range(L, n):
            code = ((code << 1) | bits[i]) & full
            o[i - L + 1] = code
    return out


def patch_codes(const unsigned char[:, ::1] bits, Py_ssize_t L, const long long[::1] ys, const long long[::1] xs):
    cdef Py_ssize_t n = ys.shape[0], t, a, b
    cdef long long code
    out = np.empty(n, dtype=np.int64)
    cdef long long[::1] o = out
    with nogil:
        for t in range(n):
            code = 0
            for a in range(L):
                for b in range(L):
                    code = (code << 1) | bits[ys[t] + a, xs[t] + b]
            o[t] = code
    return out


cdef inline long long _gcd(long long a, long long b) nogil:
    cdef long long t
    if a < 0:
        a = -a
    if b < 0:
        b = -b
    while b:
        t = a % b
        a = b
        b = t
    return a


def visible_mask(Py_ssize_t e, double radius):
    """mask[m+e, n+e] = 1 iff m^2+n^2 <= radius^2 and gcd(|m|,|n|) = 1."""
    cdef Py_ssize_t m, n
    cdef double r2 = radius * radius
    out = np.zeros((2 * e + 1, 2 * e + 1), dtype=np.uint8)
    cdef unsigned char[:, ::1] o = out
    with nogil:
        for m in range(-e, e + 1):
            for n in range(-e, e + 1):
                if <double>(m * m + n * n) <= r2 and _gcd(m, n) == 1:
                    o[m + e, n + e] = 1
    return out
