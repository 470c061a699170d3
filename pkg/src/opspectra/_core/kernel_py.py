"""Pure-Python exact matrix kernel over the Gaussian rationals.

Matrices are flat lists of ints, four per entry:
[re_num, re_den, im_num, im_den, ...] row-major, each component reduced
to lowest terms with a positive denominator.  The compiled backend in
kernel_cy.pyx implements the identical contract; outputs of the two
backends are bit-identical.
"""

from math import gcd

BACKEND = "python"


def q4(rn, rd, im_n, im_d):
    """Normalize one entry to canonical (rn, rd, in, id)."""
    if rd < 0:
        rn, rd = -rn, -rd
    g = gcd(rn, rd)
    if g > 1:
        rn //= g
        rd //= g
    if im_d < 0:
        im_n, im_d = -im_n, -im_d
    g = gcd(im_n, im_d)
    if g > 1:
        im_n //= g
        im_d //= g
    return rn, rd, im_n, im_d


def _fadd(an, ad, bn, bd):
    n = an * bd + bn * ad
    d = ad * bd
    g = gcd(n, d)
    if g > 1:
        n //= g
        d //= g
    return n, d


def _fsub(an, ad, bn, bd):
    n = an * bd - bn * ad
    d = ad * bd
    g = gcd(n, d)
    if g > 1:
        n //= g
        d //= g
    return n, d


def _fmul(an, ad, bn, bd):
    n = an * bn
    d = ad * bd
    g = gcd(n, d)
    if g > 1:
        n //= g
        d //= g
    return n, d


def q_add(a, b):
    rn, rd = _fadd(a[0], a[1], b[0], b[1])
    im_n, im_d = _fadd(a[2], a[3], b[2], b[3])
    return rn, rd, im_n, im_d


def q_sub(a, b):
    rn, rd = _fsub(a[0], a[1], b[0], b[1])
    im_n, im_d = _fsub(a[2], a[3], b[2], b[3])
    return rn, rd, im_n, im_d


def q_mul(a, b):
    # (x+yi)(u+vi) = (xu - yv) + (xv + yu)i
    n1, d1 = _fmul(a[0], a[1], b[0], b[1])
    n2, d2 = _fmul(a[2], a[3], b[2], b[3])
    rn, rd = _fsub(n1, d1, n2, d2)
    n3, d3 = _fmul(a[0], a[1], b[2], b[3])
    n4, d4 = _fmul(a[2], a[3], b[0], b[1])
    im_n, im_d = _fadd(n3, d3, n4, d4)
    return rn, rd, im_n, im_d


def q_div(a, b):
    # a / b = a * conj(b) / |b|^2
    n1, d1 = _fmul(b[0], b[1], b[0], b[1])
    n2, d2 = _fmul(b[2], b[3], b[2], b[3])
    mn, md = _fadd(n1, d1, n2, d2)
    if mn == 0:
        raise ZeroDivisionError("matrix kernel: division by zero entry")
    conj = (b[0], b[1], -b[2], b[3])
    num = q_mul(a, conj)
    rn, rd = _fmul(num[0], num[1], md, mn)
    im_n, im_d = _fmul(num[2], num[3], md, mn)
    return q4(rn, rd, im_n, im_d)


def q_is_zero(a):
    return a[0] == 0 and a[2] == 0


ZERO = (0, 1, 0, 1)
ONE = (1, 1, 0, 1)


def _get(data, idx):
    k = idx * 4
    return data[k], data[k + 1], data[k + 2], data[k + 3]


def _put(data, idx, v):
    k = idx * 4
    data[k] = v[0]
    data[k + 1] = v[1]
    data[k + 2] = v[2]
    data[k + 3] = v[3]


def mat_zero(n, m):
    out = [0, 1, 0, 1] * (n * m)
    return out


def mat_identity(n):
    out = mat_zero(n, n)
    for i in range(n):
        _put(out, i * n + i, ONE)
    return out


def mat_add(n, m, a, b):
    out = [0] * (4 * n * m)
    for i in range(n * m):
        _put(out, i, q_add(_get(a, i), _get(b, i)))
    return out


def mat_sub(n, m, a, b):
    out = [0] * (4 * n * m)
    for i in range(n * m):
        _put(out, i, q_sub(_get(a, i), _get(b, i)))
    return out


def mat_scale(n, m, a, c):
    out = [0] * (4 * n * m)
    for i in range(n * m):
        _put(out, i, q_mul(_get(a, i), c))
    return out


def mat_mul(n, m, p, a, b):
    """(n x m) @ (m x p)."""
    out = mat_zero(n, p)
    for i in range(n):
        arow = i * m
        for k in range(m):
            aik = _get(a, arow + k)
            if aik[0] == 0 and aik[2] == 0:
                continue
            brow = k * p
            crow = i * p
            for j in range(p):
                bkj = _get(b, brow + j)
                if bkj[0] == 0 and bkj[2] == 0:
                    continue
                _put(out, crow + j, q_add(_get(out, crow + j), q_mul(aik, bkj)))
    return out


def mat_conj_transpose(n, m, a):
    out = [0] * (4 * n * m)
    for i in range(n):
        for j in range(m):
            v = _get(a, i * m + j)
            _put(out, j * n + i, (v[0], v[1], -v[2], v[3]))
    return out


def mat_transpose(n, m, a):
    out = [0] * (4 * n * m)
    for i in range(n):
        for j in range(m):
            _put(out, j * n + i, _get(a, i * m + j))
    return out


def _rref_in_place(n, m, work, width):
    """Gauss-Jordan on an n x width buffer, pivoting only on the first m
    columns.  Returns the pivot column list."""
    pivots = []
    row = 0
    for col in range(m):
        piv = -1
        for r in range(row, n):
            v = _get(work, r * width + col)
            if v[0] != 0 or v[2] != 0:
                piv = r
                break
        if piv < 0:
            continue
        if piv != row:
            for j in range(width):
                a = piv * width + j
                b = row * width + j
                va = _get(work, a)
                _put(work, a, _get(work, b))
                _put(work, b, va)
        pv = _get(work, row * width + col)
        if pv != ONE:
            for j in range(col, width):
                idx = row * width + j
                _put(work, idx, q_div(_get(work, idx), pv))
        for r in range(n):
            if r == row:
                continue
            f = _get(work, r * width + col)
            if f[0] == 0 and f[2] == 0:
                continue
            for j in range(col, width):
                idx = r * width + j
                srcv = _get(work, row * width + j)
                if srcv[0] == 0 and srcv[2] == 0:
                    continue
                _put(work, idx, q_sub(_get(work, idx), q_mul(f, srcv)))
        pivots.append(col)
        row += 1
        if row == n:
            break
    return pivots


def mat_rref(n, m, a):
    """Reduced row echelon form; returns (rref, pivot columns)."""
    work = list(a)
    pivots = _rref_in_place(n, m, work, m)
    return work, pivots


def mat_rank(n, m, a):
    _, pivots = mat_rref(n, m, a)
    return len(pivots)


def mat_inv(n, a):
    """Inverse of an n x n matrix, or None if singular."""
    width = 2 * n
    work = [0] * (4 * n * width)
    for i in range(n):
        for j in range(n):
            _put(work, i * width + j, _get(a, i * n + j))
        _put(work, i * width + n + i, ONE)
    pivots = _rref_in_place(n, n, work, width)
    if len(pivots) != n:
        return None
    out = [0] * (4 * n * n)
    for i in range(n):
        for j in range(n):
            _put(out, i * n + j, _get(work, i * width + n + j))
    return out


def mat_solve(n, m, a, k, b):
    """Particular solution X (m x k) of A X = B with free variables set
    to zero, or None if inconsistent.  A is n x m, B is n x k."""
    width = m + k
    work = [0] * (4 * n * width)
    for i in range(n):
        for j in range(m):
            _put(work, i * width + j, _get(a, i * m + j))
        for j in range(k):
            _put(work, i * width + m + j, _get(b, i * k + j))
    pivots = _rref_in_place(n, m, work, width)
    rank = len(pivots)
    for r in range(rank, n):
        for j in range(k):
            v = _get(work, r * width + m + j)
            if v[0] != 0 or v[2] != 0:
                return None
    out = mat_zero(m, k)
    for r, col in enumerate(pivots):
        for j in range(k):
            _put(out, col * k + j, _get(work, r * width + m + j))
    return out


def mat_nullspace(n, m, a):
    """Basis of the right kernel as an m x k column matrix; returns
    (k, basis)."""
    r, pivots = mat_rref(n, m, a)
    pivset = set(pivots)
    free = [j for j in range(m) if j not in pivset]
    k = len(free)
    out = mat_zero(m, k)
    for idx, fc in enumerate(free):
        _put(out, fc * k + idx, ONE)
        for row, pc in enumerate(pivots):
            v = _get(r, row * m + fc)
            if v[0] != 0 or v[2] != 0:
                _put(out, pc * k + idx, (-v[0], v[1], -v[2], v[3]))
    return k, out
