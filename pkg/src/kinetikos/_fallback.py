"""Pure-Python implementations of the hot kernels.

These mirror ``_native.pyx`` operation for operation so that both backends
produce bit-identical floating-point results.
"""
import numpy as np

MAX_DEGREE = 32
# Remainder coefficients below this fraction of the (normalised) dividend are
# treated as cancellation noise when building the Sturm chain.
ZERO_REL = 1e-11
_STACK = 512


def _horner(c, x):
    v = 0.0
    for i in range(len(c) - 1, -1, -1):
        v = v * x + c[i]
    return v


def _normalize(c):
    s = 0.0
    for a in c:
        if abs(a) > s:
            s = abs(a)
    return [a / s for a in c]


def _neg_remainder(a, b):
    r = list(a)
    db = len(b) - 1
    lb = b[db]
    for k in range(len(r) - 1, db - 1, -1):
        q = r[k] / lb
        for j in range(db + 1):
            r[k - db + j] = r[k - db + j] - q * b[j]
        r[k] = 0.0
    r = r[:db]
    while r and abs(r[-1]) <= ZERO_REL:
        r.pop()
    return [-v for v in r]


def sturm_chain(c):
    """Normalised Sturm chain of a trimmed coefficient list (degree >= 1)."""
    p = _normalize(c)
    dp = _normalize([i * p[i] for i in range(1, len(p))])
    seq = [p, dp]
    while len(seq[-1]) > 1:
        r = _neg_remainder(seq[-2], seq[-1])
        if not r:
            break
        seq.append(_normalize(r))
    return seq


def _variations(seq, x):
    count = 0
    last = 0
    for s in seq:
        v = _horner(s, x)
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


def _refine(seq, a, b, va, tol):
    p = seq[0]
    fa = _horner(p, a)
    fb = _horner(p, b)
    if fb == 0.0:
        return b
    if fa != 0.0 and (fa < 0.0) != (fb < 0.0):
        while b - a > tol:
            m = 0.5 * (a + b)
            fm = _horner(p, m)
            if fm == 0.0:
                return m
            if (fm < 0.0) == (fa < 0.0):
                a = m
                fa = fm
            else:
                b = m
        return 0.5 * (a + b)
    # even multiplicity (no sign change): bisect on Sturm counts
    while b - a > tol:
        m = 0.5 * (a + b)
        vm = _variations(seq, m)
        if va - vm >= 1:
            b = m
        else:
            a = m
            va = vm
    return 0.5 * (a + b)


def roots_of(c, lo, hi, tol):
    """Distinct real roots of one trimmed, nonzero polynomial in [lo, hi]."""
    if len(c) <= 1:
        return []
    if len(c) - 1 > MAX_DEGREE:
        raise ValueError(f"degree {len(c) - 1} exceeds kernel limit {MAX_DEGREE}")
    seq = sturm_chain(c)
    out = []
    if _horner(seq[0], lo) == 0.0:
        out.append(lo)
    stack = [(lo, hi, _variations(seq, lo), _variations(seq, hi))]
    while stack:
        a, b, va, vb = stack.pop()
        k = va - vb
        if k <= 0:
            continue
        if k == 1:
            out.append(_refine(seq, a, b, va, tol))
            continue
        if b - a <= tol or len(stack) + 2 >= _STACK or len(out) >= MAX_DEGREE + 1:
            out.append(0.5 * (a + b))
            continue
        m = 0.5 * (a + b)
        vm = _variations(seq, m)
        stack.append((m, b, vm, vb))
        stack.append((a, m, va, vm))
    out.sort()
    merged = []
    for r in out:
        if merged and r - merged[-1] <= 2.0 * tol:
            continue
        merged.append(r)
    return merged


def real_roots_batch(coeffs, lo, hi, tol):
    """Roots of every row of an ascending coefficient matrix inside [lo, hi].

    Returns ``(roots, owner)``; rows that are identically zero or constant
    contribute nothing.
    """
    coeffs = np.ascontiguousarray(coeffs, dtype=np.float64)
    if coeffs.shape[1] > MAX_DEGREE + 1:
        if np.any(coeffs[:, MAX_DEGREE + 1:] != 0.0):
            raise ValueError(f"degree exceeds kernel limit {MAX_DEGREE}")
        coeffs = np.ascontiguousarray(coeffs[:, :MAX_DEGREE + 1])
    roots = []
    owner = []
    for i, row in enumerate(coeffs.tolist()):
        while row and row[-1] == 0.0:
            row.pop()
        for r in roots_of(row, float(lo), float(hi), float(tol)):
            roots.append(r)
            owner.append(i)
    return np.array(roots, dtype=np.float64), np.array(owner, dtype=np.int64)


def ball_depth(queries, centers, radii_sq, rtol=0.0, atol=0.0):
    """Number of closed balls containing each query point."""
    q = np.ascontiguousarray(queries, dtype=np.float64)
    c = np.ascontiguousarray(centers, dtype=np.float64)
    lim = np.asarray(radii_sq, dtype=np.float64) * (1.0 + rtol) + atol
    out = np.empty(len(q), dtype=np.int64)
    step = max(1, 2_000_000 // max(1, len(c)))
    for s in range(0, len(q), step):
        diff = q[s:s + step, None, :] - c[None, :, :]
        d2 = diff[..., 0] * diff[..., 0]
        for k in range(1, q.shape[1]):
            d2 = d2 + diff[..., k] * diff[..., k]
        out[s:s + step] = (d2 <= lim[None, :]).sum(axis=1)
    return out


def nearest_sites(points, sites):
    """Index of the nearest site for every point; ties go to the lower index."""
    x = np.ascontiguousarray(points, dtype=np.float64)
    s = np.ascontiguousarray(sites, dtype=np.float64)
    out = np.empty(len(x), dtype=np.int64)
    step = max(1, 2_000_000 // max(1, len(s)))
    for a in range(0, len(x), step):
        diff = x[a:a + step, None, :] - s[None, :, :]
        d2 = diff[..., 0] * diff[..., 0]
        for k in range(1, x.shape[1]):
            d2 = d2 + diff[..., k] * diff[..., k]
        out[a:a + step] = np.argmin(d2, axis=1)
    return out
