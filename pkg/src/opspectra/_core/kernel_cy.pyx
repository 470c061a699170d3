# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled exact matrix kernel over the Gaussian rationals.

Same contract and bit-identical outputs as kernel_py.py; entries are
arbitrary-precision Python ints, loops and indexing are compiled.
"""

from math import gcd

BACKEND = "cython"


cdef inline tuple _norm2(object n, object d):
    cdef object g
    if d < 0:
        n = -n
        d = -d
    g = gcd(n, d)
    if g > 1:
        n = n // g
        d = d // g
    return (n, d)


def q4(rn, rd, im_n, im_d):
    """Normalize one entry to canonical (rn, rd, in, id)."""
    rn, rd = _norm2(rn, rd)
    im_n, im_d = _norm2(im_n, im_d)
    return (rn, rd, im_n, im_d)


cdef inline tuple _fadd(object an, object ad, object bn, object bd):
    return _norm2(an * bd + bn * ad, ad * bd)


cdef inline tuple _fsub(object an, object ad, object bn, object bd):
    return _norm2(an * bd - bn * ad, ad * bd)


cdef inline tuple _fmul(object an, object ad, object bn, object bd):
    return _norm2(an * bn, ad * bd)


cdef inline tuple _qadd4(object a0, object a1, object a2, object a3,
                         object b0, object b1, object b2, object b3):
    cdef tuple re = _fadd(a0, a1, b0, b1)
    cdef tuple im = _fadd(a2, a3, b2, b3)
    return (re[0], re[1], im[0], im[1])


cdef inline tuple _qsub4(object a0, object a1, object a2, object a3,
                         object b0, object b1, object b2, object b3):
    cdef tuple re = _fsub(a0, a1, b0, b1)
    cdef tuple im = _fsub(a2, a3, b2, b3)
    return (re[0], re[1], im[0], im[1])


cdef inline tuple _qmul4(object a0, object a1, object a2, object a3,
                         object b0, object b1, object b2, object b3):
    cdef tuple n1 = _fmul(a0, a1, b0, b1)
    cdef tuple n2 = _fmul(a2, a3, b2, b3)
    cdef tuple re = _fsub(n1[0], n1[1], n2[0], n2[1])
    cdef tuple n3 = _fmul(a0, a1, b2, b3)
    cdef tuple n4 = _fmul(a2, a3, b0, b1)
    cdef tuple im = _fadd(n3[0], n3[1], n4[0], n4[1])
    return (re[0], re[1], im[0], im[1])


cdef inline tuple _qdiv4(object a0, object a1, object a2, object a3,
                         object b0, object b1, object b2, object b3):
    cdef tuple n1 = _fmul(b0, b1, b0, b1)
    cdef tuple n2 = _fmul(b2, b3, b2, b3)
    cdef tuple mod2 = _fadd(n1[0], n1[1], n2[0], n2[1])
    if mod2[0] == 0:
        raise ZeroDivisionError("matrix kernel: division by zero entry")
    cdef tuple num = _qmul4(a0, a1, a2, a3, b0, b1, -b2, b3)
    cdef tuple re = _fmul(num[0], num[1], mod2[1], mod2[0])
    cdef tuple im = _fmul(num[2], num[3], mod2[1], mod2[0])
    return (re[0], re[1], im[0], im[1])


def q_add(a, b):
    return _qadd4(a[0], a[1], a[2], a[3], b[0], b[1], b[2], b[3])


def q_sub(a, b):
    return _qsub4(a[0], a[1], a[2], a[3], b[0], b[1], b[2], b[3])


def q_mul(a, b):
    return _qmul4(a[0], a[1], a[2], a[3], b[0], b[1], b[2], b[3])


def q_div(a, b):
    return _qdiv4(a[0], a[1], a[2], a[3], b[0], b[1], b[2], b[3])


def q_is_zero(a):
    return a[0] == 0 and a[2] == 0


ZERO = (0, 1, 0, 1)
ONE = (1, 1, 0, 1)


cdef inline void _store(list data, Py_ssize_t idx, tuple v):
    cdef Py_ssize_t k = idx * 4
    data[k] = v[0]
    data[k + 1] = v[1]
    data[k + 2] = v[2]
    data[k + 3] = v[3]


def mat_zero(Py_ssize_t n, Py_ssize_t m):
    return [0, 1, 0, 1] * (n * m)


def mat_identity(Py_ssize_t n):
    cdef list out = mat_zero(n, n)
    cdef Py_ssize_t i
    for i in range(n):
        _store(out, i * n + i, ONE)
    return out


def mat_add(Py_ssize_t n, Py_ssize_t m, list a, list b):
    cdef list out = [0] * (4 * n * m)
    cdef Py_ssize_t i, k
    for i in range(n * m):
        k = i * 4
        _store(out, i, _qadd4(a[k], a[k + 1], a[k + 2], a[k + 3],
                              b[k], b[k + 1], b[k + 2], b[k + 3]))
    return out


def mat_sub(Py_ssize_t n, Py_ssize_t m, list a, list b):
    cdef list out = [0] * (4 * n * m)
    cdef Py_ssize_t i, k
    for i in range(n * m):
        k = i * 4
        _store(out, i, _qsub4(a[k], a[k + 1], a[k + 2], a[k + 3],
                              b[k], b[k + 1], b[k + 2], b[k + 3]))
    return out


def mat_scale(Py_ssize_t n, Py_ssize_t m, list a, tuple c):
    cdef list out = [0] * (4 * n * m)
    cdef Py_ssize_t i, k
    cdef object c0 = c[0], c1 = c[1], c2 = c[2], c3 = c[3]
    for i in range(n * m):
        k = i * 4
        _store(out, i, _qmul4(a[k], a[k + 1], a[k + 2], a[k + 3],
                              c0, c1, c2, c3))
    return out


def mat_mul(Py_ssize_t n, Py_ssize_t m, Py_ssize_t p, list a, list b):
    cdef list out = mat_zero(n, p)
    cdef Py_ssize_t i, j, k, ai, bi, ci
    cdef tuple prod, acc
    for i in range(n):
        for k in range(m):
            ai = (i * m + k) * 4
            if a[ai] == 0 and a[ai + 2] == 0:
                continue
            for j in range(p):
                bi = (k * p + j) * 4
                if b[bi] == 0 and b[bi + 2] == 0:
                    continue
                prod = _qmul4(a[ai], a[ai + 1], a[ai + 2], a[ai + 3],
                              b[bi], b[bi + 1], b[bi + 2], b[bi + 3])
                ci = (i * p + j) * 4
                acc = _qadd4(out[ci], out[ci + 1], out[ci + 2], out[ci + 3],
                             prod[0], prod[1], prod[2], prod[3])
                _store(out, i * p + j, acc)
    return out


def mat_conj_transpose(Py_ssize_t n, Py_ssize_t m, list a):
    cdef list out = [0] * (4 * n * m)
    cdef Py_ssize_t i, j, k
    for i in range(n):
        for j in range(m):
            k = (i * m + j) * 4
            _store(out, j * n + i, (a[k], a[k + 1], -a[k + 2], a[k + 3]))
    return out


def mat_transpose(Py_ssize_t n, Py_ssize_t m, list a):
    cdef list out = [0] * (4 * n * m)
    cdef Py_ssize_t i, j, k
    for i in range(n):
        for j in range(m):
            k = (i * m + j) * 4
            _store(out, j * n + i, (a[k], a[k + 1], a[k + 2], a[k + 3]))
    return out


cdef list _rref_in_place(Py_ssize_t n, Py_ssize_t m, list work,
                         Py_ssize_t width):
    cdef list pivots = []
    cdef Py_ssize_t row = 0, col, r, j, ia, ib, piv
    cdef tuple pv, f, va, srcv, cur
    for col in range(m):
        piv = -1
        for r in range(row, n):
            ia = (r * width + col) * 4
            if work[ia] != 0 or work[ia + 2] != 0:
                piv = r
                break
        if piv < 0:
            continue
        if piv != row:
            for j in range(width):
                ia = (piv * width + j) * 4
                ib = (row * width + j) * 4
                work[ia], work[ib] = work[ib], work[ia]
                work[ia + 1], work[ib + 1] = work[ib + 1], work[ia + 1]
                work[ia + 2], work[ib + 2] = work[ib + 2], work[ia + 2]
                work[ia + 3], work[ib + 3] = work[ib + 3], work[ia + 3]
        ia = (row * width + col) * 4
        pv = (work[ia], work[ia + 1], work[ia + 2], work[ia + 3])
        if pv != ONE:
            for j in range(col, width):
                ib = (row * width + j) * 4
                cur = _qdiv4(work[ib], work[ib + 1], work[ib + 2], work[ib + 3],
                             pv[0], pv[1], pv[2], pv[3])
                _store(work, row * width + j, cur)
        for r in range(n):
            if r == row:
                continue
            ia = (r * width + col) * 4
            if work[ia] == 0 and work[ia + 2] == 0:
                continue
            f = (work[ia], work[ia + 1], work[ia + 2], work[ia + 3])
            for j in range(col, width):
                ib = (row * width + j) * 4
                if work[ib] == 0 and work[ib + 2] == 0:
                    continue
                srcv = _qmul4(f[0], f[1], f[2], f[3],
                              work[ib], work[ib + 1], work[ib + 2], work[ib + 3])
                ia = (r * width + j) * 4
                cur = _qsub4(work[ia], work[ia + 1], work[ia + 2], work[ia + 3],
                             srcv[0], srcv[1], srcv[2], srcv[3])
                _store(work, r * width + j, cur)
            ia = (r * width + col) * 4
        pivots.append(col)
        row += 1
        if row == n:
            break
    return pivots


def mat_rref(Py_ssize_t n, Py_ssize_t m, list a):
    cdef list work = list(a)
    cdef list pivots = _rref_in_place(n, m, work, m)
    return work, pivots


def mat_rank(Py_ssize_t n, Py_ssize_t m, list a):
    cdef list work = list(a)
    return len(_rref_in_place(n, m, work, m))


def mat_inv(Py_ssize_t n, list a):
    cdef Py_ssize_t width = 2 * n
    cdef list work = mat_zero(n, width)
    cdef Py_ssize_t i, j, k
    for i in range(n):
        for j in range(n):
            k = (i * n + j) * 4
            _store(work, i * width + j, (a[k], a[k + 1], a[k + 2], a[k + 3]))
        _store(work, i * width + n + i, ONE)
    cdef list pivots = _rref_in_place(n, n, work, width)
    if len(pivots) != n:
        return None
    cdef list out = [0] * (4 * n * n)
    for i in range(n):
        for j in range(n):
            k = (i * width + n + j) * 4
            _store(out, i * n + j, (work[k], work[k + 1], work[k + 2], work[k + 3]))
    return out


def mat_solve(Py_ssize_t n, Py_ssize_t m, list a, Py_ssize_t k, list b):
    cdef Py_ssize_t width = m + k
    cdef list work = mat_zero(n, width)
    cdef Py_ssize_t i, j, t, rank
    for i in range(n):
        for j in range(m):
            t = (i * m + j) * 4
            _store(work, i * width + j, (a[t], a[t + 1], a[t + 2], a[t + 3]))
        for j in range(k):
            t = (i * k + j) * 4
            _store(work, i * width + m + j, (b[t], b[t + 1], b[t + 2], b[t + 3]))
    cdef list pivots = _rref_in_place(n, m, work, width)
    rank = len(pivots)
    for i in range(rank, n):
        for j in range(k):
            t = (i * width + m + j) * 4
            if work[t] != 0 or work[t + 2] != 0:
                return None
    cdef list out = mat_zero(m, k)
    cdef Py_ssize_t row = 0
    for row in range(rank):
        i = pivots[row]
        for j in range(k):
            t = (row * width + m + j) * 4
            _store(out, i * k + j, (work[t], work[t + 1], work[t + 2], work[t + 3]))
    return out


def mat_nullspace(Py_ssize_t n, Py_ssize_t m, list a):
    r, pivots = mat_rref(n, m, a)
    cdef set pivset = set(pivots)
    cdef list free = [j for j in range(m) if j not in pivset]
    cdef Py_ssize_t k = len(free)
    cdef list out = mat_zero(m, k)
    cdef Py_ssize_t idx, fc, row, pc, t
    for idx in range(k):
        fc = free[idx]
        _store(out, fc * k + idx, ONE)
        for row in range(len(pivots)):
            pc = pivots[row]
            t = (row * m + fc) * 4
            if r[t] != 0 or r[t + 2] != 0:
                _store(out, pc * k + idx, (-r[t], r[t + 1], -r[t + 2], r[t + 3]))
    return k, out
