"""Exact matrix algebra: index, core-nilpotent splitting, Drazin and
group inverses, ascent/descent.  No floating point anywhere."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from ._core import kernel
from .errors import IndexTooLarge
from .scalars import QQi, format_fraction, parse_qqi


def _entry4(value) -> tuple:
    if isinstance(value, QQi):
        z = value
    else:
        z = parse_qqi(value)
    return kernel.q4(
        z.re.numerator, z.re.denominator, z.im.numerator, z.im.denominator
    )


def _to_qqi(e4) -> QQi:
    return QQi(Fraction(e4[0], e4[1]), Fraction(e4[2], e4[3]))


class ExactMatrix:
    """Immutable matrix over the Gaussian rationals."""

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, rows: int, cols: int, data: list):
        self.rows = rows
        self.cols = cols
        self._data = data

    @staticmethod
    def from_rows(rows: Sequence[Sequence]) -> "ExactMatrix":
        n = len(rows)
        m = len(rows[0]) if n else 0
        data = []
        for r in rows:
            if len(r) != m:
                raise ValueError("ragged matrix rows")
            for v in r:
                data.extend(_entry4(v))
        return ExactMatrix(n, m, data)

    @staticmethod
    def identity(n: int) -> "ExactMatrix":
        return ExactMatrix(n, n, kernel.mat_identity(n))

    @staticmethod
    def zeros(n: int, m: int | None = None) -> "ExactMatrix":
        m = n if m is None else m
        return ExactMatrix(n, m, kernel.mat_zero(n, m))

    @staticmethod
    def diag(values: Iterable) -> "ExactMatrix":
        vals = list(values)
        n = len(vals)
        out = kernel.mat_zero(n, n)
        for i, v in enumerate(vals):
            e = _entry4(v)
            k = (i * n + i) * 4
            out[k : k + 4] = e
        return ExactMatrix(n, n, out)

    def entry(self, i: int, j: int) -> QQi:
        k = (i * self.cols + j) * 4
        d = self._data
        return QQi(Fraction(d[k], d[k + 1]), Fraction(d[k + 2], d[k + 3]))

    def to_rows(self) -> list:
        return [
            [self.entry(i, j) for j in range(self.cols)] for i in range(self.rows)
        ]

    def _require_square(self):
        if self.rows != self.cols:
            raise ValueError("square matrix required")

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._shape_check(other)
        return ExactMatrix(
            self.rows, self.cols,
            kernel.mat_add(self.rows, self.cols, self._data, other._data),
        )

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._shape_check(other)
        return ExactMatrix(
            self.rows, self.cols,
            kernel.mat_sub(self.rows, self.cols, self._data, other._data),
        )

    def __neg__(self) -> "ExactMatrix":
        return self.scale(QQi.of(-1))

    def _shape_check(self, other):
        if self.rows != other.rows or self.cols != other.cols:
            raise ValueError("shape mismatch")

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.rows:
            raise ValueError("inner dimension mismatch")
        return ExactMatrix(
            self.rows, other.cols,
            kernel.mat_mul(self.rows, self.cols, other.cols, self._data, other._data),
        )

    def scale(self, c) -> "ExactMatrix":
        return ExactMatrix(
            self.rows, self.cols,
            kernel.mat_scale(self.rows, self.cols, self._data, _entry4(c)),
        )

    def __pow__(self, n: int) -> "ExactMatrix":
        self._require_square()
        if n < 0:
            raise ValueError("negative matrix power; use inv() first")
        out = ExactMatrix.identity(self.rows)
        base = self
        while n:
            if n & 1:
                out = out @ base
            base = base @ base if n > 1 else base
            n >>= 1
        return out

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ExactMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self._data == other._data
        )

    def __hash__(self):
        return hash((self.rows, self.cols, tuple(self._data)))

    def is_zero(self) -> bool:
        d = self._data
        return all(d[k] == 0 for k in range(0, len(d), 4)) and all(
            d[k + 2] == 0 for k in range(0, len(d), 4)
        )

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(
            self.cols, self.rows,
            kernel.mat_transpose(self.rows, self.cols, self._data),
        )

    def conj_transpose(self) -> "ExactMatrix":
        return ExactMatrix(
            self.cols, self.rows,
            kernel.mat_conj_transpose(self.rows, self.cols, self._data),
        )

    def rank(self) -> int:
        return kernel.mat_rank(self.rows, self.cols, self._data)

    def rref(self) -> tuple["ExactMatrix", tuple]:
        r, pivots = kernel.mat_rref(self.rows, self.cols, self._data)
        return ExactMatrix(self.rows, self.cols, r), tuple(pivots)

    def inv(self) -> "ExactMatrix":
        self._require_square()
        out = kernel.mat_inv(self.rows, self._data)
        if out is None:
            raise ValueError("matrix is singular")
        return ExactMatrix(self.rows, self.rows, out)

    def nullspace(self) -> "ExactMatrix":
        """Kernel basis as columns (cols x k)."""
        k, out = kernel.mat_nullspace(self.rows, self.cols, self._data)
        return ExactMatrix(self.cols, k, out)

    def solve(self, b: "ExactMatrix") -> "ExactMatrix | None":
        """Particular solution of self @ X = b, free variables zero."""
        if self.rows != b.rows:
            raise ValueError("shape mismatch in solve")
        out = kernel.mat_solve(self.rows, self.cols, self._data, b.cols, b._data)
        if out is None:
            return None
        return ExactMatrix(self.cols, b.cols, out)

    def column_space_basis(self) -> "ExactMatrix":
        """Pivot columns of self as an n x r matrix."""
        _, pivots = self.rref()
        out = kernel.mat_zero(self.rows, len(pivots))
        for idx, c in enumerate(pivots):
            for i in range(self.rows):
                src = (i * self.cols + c) * 4
                dst = (i * len(pivots) + idx) * 4
                out[dst : dst + 4] = self._data[src : src + 4]
        return ExactMatrix(self.rows, len(pivots), out)

    def hstack(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.rows != other.rows:
            raise ValueError("row mismatch in hstack")
        m = self.cols + other.cols
        out = kernel.mat_zero(self.rows, m)
        for i in range(self.rows):
            for j in range(self.cols):
                src = (i * self.cols + j) * 4
                dst = (i * m + j) * 4
                out[dst : dst + 4] = self._data[src : src + 4]
            for j in range(other.cols):
                src = (i * other.cols + j) * 4
                dst = (i * m + self.cols + j) * 4
                out[dst : dst + 4] = other._data[src : src + 4]
        return ExactMatrix(self.rows, m, out)

    def submatrix(self, row0: int, row1: int, col0: int, col1: int) -> "ExactMatrix":
        rr, cc = row1 - row0, col1 - col0
        out = kernel.mat_zero(rr, cc)
        for i in range(rr):
            for j in range(cc):
                src = ((row0 + i) * self.cols + (col0 + j)) * 4
                dst = (i * cc + j) * 4
                out[dst : dst + 4] = self._data[src : src + 4]
        return ExactMatrix(rr, cc, out)

    @staticmethod
    def block_diag(a: "ExactMatrix", b: "ExactMatrix") -> "ExactMatrix":
        n = a.rows + b.rows
        m = a.cols + b.cols
        out = kernel.mat_zero(n, m)
        for i in range(a.rows):
            for j in range(a.cols):
                src = (i * a.cols + j) * 4
                dst = (i * m + j) * 4
                out[dst : dst + 4] = a._data[src : src + 4]
        for i in range(b.rows):
            for j in range(b.cols):
                src = (i * b.cols + j) * 4
                dst = ((a.rows + i) * m + a.cols + j) * 4
                out[dst : dst + 4] = b._data[src : src + 4]
        return ExactMatrix(n, m, out)

    def __repr__(self):
        rows = [
            "[" + ", ".join(str(self.entry(i, j)) for j in range(self.cols)) + "]"
            for i in range(self.rows)
        ]
        return f"ExactMatrix([{', '.join(rows)}])"

    # -- JSON interface ------------------------------------------------

    def to_json(self) -> dict:
        entries = [
            [str(self.entry(i, j)) for j in range(self.cols)]
            for i in range(self.rows)
        ]
        return {"rows": self.rows, "cols": self.cols, "entries": entries}

    @staticmethod
    def from_json(obj) -> "ExactMatrix":
        if isinstance(obj, str):
            obj = json.loads(obj)
        rows = int(obj["rows"])
        cols = int(obj["cols"])
        entries = obj["entries"]
        if len(entries) != rows or any(len(r) != cols for r in entries):
            raise ValueError("matrix JSON shape mismatch")
        return ExactMatrix.from_rows(entries)


@dataclass(frozen=True)
class DrazinCertificate:
    """The Drazin inverse together with the three ring-axiom checks,
    each evaluated exactly."""

    inverse: ExactMatrix
    index: int
    commutes: bool        # a b = b a
    inner: bool           # b a b = b
    eventual: bool        # a^(r+1) b = a^r

    @property
    def all_ok(self) -> bool:
        return self.commutes and self.inner and self.eventual


def index(a: ExactMatrix) -> int:
    """Smallest k >= 0 with rank(a^k) = rank(a^(k+1))."""
    a._require_square()
    n = a.rows
    prev = n
    power = ExactMatrix.identity(n)
    k = 0
    while True:
        power = power @ a
        r = power.rank()
        if r == prev:
            return k
        prev = r
        k += 1
        if k > n:  # rank strictly drops at most n times
            raise AssertionError("index computation failed to stabilize")


def drazin(a: ExactMatrix) -> DrazinCertificate:
    """Drazin inverse via the exact core-nilpotent splitting."""
    a._require_square()
    n = a.rows
    m = index(a)
    if m == 0:
        inv = a.inv()
        return _certify(a, inv, 0)
    am = a**m
    core = am.column_space_basis()          # n x r
    null = am.nullspace()                   # n x (n-r)
    p = core.hstack(null)
    pinv = p.inv()
    d = pinv @ a @ p
    r = core.cols
    c_block = d.submatrix(0, r, 0, r)
    # invariant-subspace structure must make the off-diagonal blocks zero
    if not d.submatrix(0, r, r, n).is_zero() or not d.submatrix(r, n, 0, r).is_zero():
        raise AssertionError("core-nilpotent splitting is not block diagonal")
    middle = ExactMatrix.zeros(n)
    if r:
        c_inv = c_block.inv()
        middle = ExactMatrix.block_diag(c_inv, ExactMatrix.zeros(n - r))
    ad = p @ middle @ pinv
    return _certify(a, ad, m)


def _certify(a: ExactMatrix, b: ExactMatrix, r: int) -> DrazinCertificate:
    commutes = (a @ b) == (b @ a)
    inner = (b @ a @ b) == b
    eventual = (a ** (r + 1)) @ b == a**r
    return DrazinCertificate(b, r, commutes, inner, eventual)


def verify_drazin_axioms(a: ExactMatrix, b: ExactMatrix, r: int) -> DrazinCertificate:
    """Evaluate the three axioms for an arbitrary candidate inverse."""
    return _certify(a, b, r)


def group_inverse(a: ExactMatrix) -> ExactMatrix:
    """Drazin inverse restricted to index <= 1."""
    cert = drazin(a)
    if cert.index > 1:
        raise IndexTooLarge(f"index-too-large: index {cert.index} >= 2")
    return cert.inverse


def ascent_descent(a: ExactMatrix, lam: QQi) -> tuple[int, int]:
    """(p, q) of lam*I - a; equal for matrices, returned as a pair for
    API symmetry with the operator model."""
    a._require_square()
    shifted = ExactMatrix.identity(a.rows).scale(lam) - a
    k = index(shifted)
    return k, k
