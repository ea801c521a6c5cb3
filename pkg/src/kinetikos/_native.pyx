# cython: language_level=3
"""Compiled hot kernels; see ``_fallback.py`` for the reference semantics."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()

cdef enum:
    MAXL = 33          # MAX_DEGREE + 1
    MAXS = 34
    STACK = 512

cdef double ZERO_REL = 1e-11


cdef inline double _horner(const double* c, int n, double x) noexcept nogil:
    cdef double v = 0.0
    cdef int i
    for i in range(n - 1, -1, -1):
        v = v * x + c[i]
    return v


cdef inline void _normalize(double* c, int n) noexcept nogil:
    cdef double s = 0.0
    cdef int i
    for i in range(n):
        if fabs(c[i]) > s:
            s = fabs(c[i])
    for i in range(n):
        c[i] = c[i] / s


cdef int _neg_remainder(const double* a, int na, const double* b, int nb,
                        double* out) noexcept nogil:
    cdef double r[MAXL]
    cdef int k, j, n
    cdef int db = nb - 1
    cdef double lb = b[db]
    cdef double q
    for k in range(na):
        r[k] = a[k]
    for k in range(na - 1, db - 1, -1):
        q = r[k] / lb
        for j in range(db + 1):
            r[k - db + j] = r[k - db + j] - q * b[j]
        r[k] = 0.0
    n = db
    while n > 0 and fabs(r[n - 1]) <= ZERO_REL:
        n -= 1
    for k in range(n):
        out[k] = -r[k]
    return n


cdef int _chain(const double* c, int n, double seq[MAXS][MAXL], int* lens) noexcept nogil:
    cdef int i, m, count
    for i in range(n):
        seq[0][i] = c[i]
    _normalize(seq[0], n)
    lens[0] = n
    for i in range(1, n):
        seq[1][i - 1] = i * seq[0][i]
    _normalize(seq[1], n - 1)
    lens[1] = n - 1
    count = 2
    while lens[count - 1] > 1:
        m = _neg_remainder(seq[count - 2], lens[count - 2],
                           seq[count - 1], lens[count - 1], seq[count])
        if m == 0:
            break
        _normalize(seq[count], m)
        lens[count] = m
        count += 1
    return count


cdef int _variations(double seq[MAXS][MAXL], int* lens, int ns, double x) noexcept nogil:
    cdef int count = 0
    cdef int last = 0
    cdef int sg, i
    cdef double v
    for i in range(ns):
        v = _horner(seq[i], lens[i], x)
        if v > 0.0:
            sg = 1
        elif v < 0.0:
            sg = -1
        else:
            continue
        if last != 0 and sg != last:
            count += 1
        last = sg
    return count


cdef double _refine(double seq[MAXS][MAXL], int* lens, int ns,
                    double a, double b, int va, double tol) noexcept nogil:
    cdef double fa = _horner(seq[0], lens[0], a)
    cdef double fb = _horner(seq[0], lens[0], b)
    cdef double m, fm
    cdef int vm
    if fb == 0.0:
        return b
    if fa != 0.0 and (fa < 0.0) != (fb < 0.0):
        while b - a > tol:
            m = 0.5 * (a + b)
            fm = _horner(seq[0], lens[0], m)
            if fm == 0.0:
                return m
            if (fm < 0.0) == (fa < 0.0):
                a = m
                fa = fm
            else:
                b = m
        return 0.5 * (a + b)
    while b - a > tol:
        m = 0.5 * (a + b)
        vm = _variations(seq, lens, ns, m)
        if va - vm >= 1:
            b = m
        else:
            a = m
            va = vm
    return 0.5 * (a + b)


cdef int _roots_of(const double* c, int n, double lo, double hi, double tol,
                   double* out) noexcept nogil:
    cdef double seq[MAXS][MAXL]
    cdef int lens[MAXS]
    cdef double sa[STACK]
    cdef double sb[STACK]
    cdef int sva[STACK]
    cdef int svb[STACK]
    cdef int top = 0
    cdef int ns, k, cnt, vm, va, vb, i, j, kept
    cdef double a, b, m, tmp
    if n <= 1:
        return 0
    ns = _chain(c, n, seq, lens)
    cnt = 0
    if _horner(seq[0], lens[0], lo) == 0.0:
        out[cnt] = lo
        cnt += 1
    sa[0] = lo
    sb[0] = hi
    sva[0] = _variations(seq, lens, ns, lo)
    svb[0] = _variations(seq, lens, ns, hi)
    top = 1
    while top > 0:
        top -= 1
        a = sa[top]
        b = sb[top]
        va = sva[top]
        vb = svb[top]
        k = va - vb
        if k <= 0:
            continue
        if k == 1:
            out[cnt] = _refine(seq, lens, ns, a, b, va, tol)
            cnt += 1
            continue
        if b - a <= tol or top + 2 >= STACK or cnt >= MAXL:
            out[cnt] = 0.5 * (a + b)
            cnt += 1
            continue
        m = 0.5 * (a + b)
        vm = _variations(seq, lens, ns, m)
        sa[top] = m
        sb[top] = b
        sva[top] = vm
        svb[top] = vb
        top += 1
        sa[top] = a
        sb[top] = m
        sva[top] = va
        svb[top] = vm
        top += 1
    # insertion sort, then merge roots closer than 2*tol
    for i in range(1, cnt):
        tmp = out[i]
        j = i - 1
        while j >= 0 and out[j] > tmp:
            out[j + 1] = out[j]
            j -= 1
        out[j + 1] = tmp
    kept = 0
    for i in range(cnt):
        if kept > 0 and out[i] - out[kept - 1] <= 2.0 * tol:
            continue
        out[kept] = out[i]
        kept += 1
    return kept


def real_roots_batch(coeffs, double lo, double hi, double tol):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] c = np.ascontiguousarray(coeffs, dtype=np.float64)
    cdef Py_ssize_t m = c.shape[0]
    cdef int width = c.shape[1]
    cdef Py_ssize_t i
    cdef int n, k, j
    cdef double buf[2 * MAXL + 2]
    if width > MAXL:
        if np.any(c[:, MAXL:] != 0.0):
            raise ValueError(f"degree exceeds kernel limit {MAXL - 1}")
        c = np.ascontiguousarray(c[:, :MAXL])
        width = MAXL
    roots = np.empty(m * MAXL, dtype=np.float64)
    owner = np.empty(m * MAXL, dtype=np.int64)
    cdef double[::1] rv = roots
    cdef cnp.int64_t[::1] ov = owner
    cdef Py_ssize_t total = 0
    with nogil:
        for i in range(m):
            n = width
            while n > 0 and c[i, n - 1] == 0.0:
                n -= 1
            k = _roots_of(&c[i, 0], n, lo, hi, tol, buf)
            for j in range(k):
                rv[total] = buf[j]
                ov[total] = i
                total += 1
    return roots[:total].copy(), owner[:total].copy()


def ball_depth(queries, centers, radii_sq, double rtol=0.0, double atol=0.0):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] q = np.ascontiguousarray(queries, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] c = np.ascontiguousarray(centers, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] r2 = np.ascontiguousarray(radii_sq, dtype=np.float64)
    cdef Py_ssize_t nq = q.shape[0]
    cdef Py_ssize_t nc = c.shape[0]
    cdef int d = q.shape[1]
    cdef Py_ssize_t i, j
    cdef int k
    cdef double d2, diff
    cdef cnp.int64_t cnt
    lim_arr = r2 * (1.0 + rtol) + atol
    cdef double[::1] lim = lim_arr
    out = np.empty(nq, dtype=np.int64)
    cdef cnp.int64_t[::1] ov = out
    with nogil:
        for i in range(nq):
            cnt = 0
            for j in range(nc):
                diff = q[i, 0] - c[j, 0]
                d2 = diff * diff
                for k in range(1, d):
                    diff = q[i, k] - c[j, k]
                    d2 = d2 + diff * diff
                if d2 <= lim[j]:
                    cnt += 1
            ov[i] = cnt
    return out


def nearest_sites(points, sites):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] x = np.ascontiguousarray(points, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] s = np.ascontiguousarray(sites, dtype=np.float64)
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t m = s.shape[0]
    cdef int d = x.shape[1]
    cdef Py_ssize_t i, j, best
    cdef int k
    cdef double d2, diff, bd
    out = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] ov = out
    with nogil:
        for i in range(n):
            best = 0
            bd = 0.0
            for j in range(m):
                diff = x[i, 0] - s[j, 0]
                d2 = diff * diff
                for k in range(1, d):
                    diff = x[i, k] - s[j, k]
                    d2 = d2 + diff * diff
                if j == 0 or d2 < bd:
                    bd = d2
                    best = j
            ov[i] = best
    return out
