"""Cline's formula and its generalization under A^k B^k A^k = A^(k+1),
with the forward/converse constructions checked identity by identity
over exact matrices, plus the meromorphic-transfer check on certified
diagonal pairs."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from . import regions as rg
from .drazin import DrazinCertificate, ExactMatrix, drazin, index
from .errors import (
    ConstraintViolated,
    IdentityViolated,
    UnsupportedPair,
)
from .model import (
    DiagGeometric,
    DiagHarmonic,
    DiagList,
    DiagOp,
    OperatorExpr,
    ScaleOp,
    TranslateOp,
    picture,
)
from .scalars import QQi
from .spectra import spectrum

GENERATOR_FAMILIES = ("solve_k1", "invertible_root", "nilpotent", "mixed")


@dataclass(frozen=True)
class ConstraintPair:
    """A, B with A^k B^k A^k == A^(k+1) exactly."""

    a: ExactMatrix
    b: ExactMatrix
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be a positive integer")
        if not constraint_holds(self.a, self.b, self.k):
            raise ConstraintViolated(
                f"constraint-violated: A^k B^k A^k != A^(k+1) for k={self.k}"
            )


def constraint_holds(a: ExactMatrix, b: ExactMatrix, k: int) -> bool:
    ak = a**k
    return (ak @ (b**k) @ ak) == a ** (k + 1)


@dataclass(frozen=True)
class GDInverseData:
    """Candidate inner inverse data: T commuting with A, TAT = T, and
    the residual ATA - A (nilpotency is the matrix-scale stand-in for a
    meromorphic residual)."""

    t: ExactMatrix
    commutes: bool
    inner: bool
    residual: ExactMatrix
    residual_nilpotent: bool

    @staticmethod
    def for_matrix(a: ExactMatrix, t: ExactMatrix) -> "GDInverseData":
        commutes = (t @ a) == (a @ t)
        inner = (t @ a @ t) == t
        residual = a @ t @ a - a
        return GDInverseData(t, commutes, inner, residual,
                             _is_nilpotent(residual))

    @staticmethod
    def from_drazin(a: ExactMatrix) -> "GDInverseData":
        return GDInverseData.for_matrix(a, drazin(a).inverse)


def _is_nilpotent(m: ExactMatrix) -> bool:
    return (m**m.rows).is_zero()


# ---------------------------------------------------------------------------
# Cline's formula


def cline_classic(a: ExactMatrix, b: ExactMatrix) -> ExactMatrix:
    """(BA)^D from B ((AB)^D)^2 A; asserts exact agreement with an
    independently computed Drazin inverse of BA."""
    if a.rows != b.cols or a.cols != b.rows:
        raise ValueError("need A and B with AB and BA square")
    ab = a @ b
    ba = b @ a
    ab_d = drazin(ab).inverse
    candidate = b @ ab_d @ ab_d @ a
    reference = drazin(ba).inverse
    if candidate != reference:
        raise IdentityViolated(
            "identity-violated: B((AB)^D)^2 A != (BA)^D",
            residual=candidate - reference,
        )
    return candidate


def gen_cline(p: ConstraintPair):
    """Generalized Cline identities: (B^k A^k)^D == B^k (A^D)^2 A^k and
    A^D == A^k ((B^k A^k)^D)^(k+1), both against independent Drazin
    computations."""
    ak = p.a**p.k
    bk = p.b**p.k
    m = bk @ ak
    a_d = drazin(p.a).inverse
    m_d = drazin(m).inverse
    candidate = bk @ a_d @ a_d @ ak
    if candidate != m_d:
        raise IdentityViolated(
            "identity-violated: (B^k A^k)^D != B^k (A^D)^2 A^k",
            residual=candidate - m_d,
        )
    recovered = ak @ (m_d ** (p.k + 1))
    if recovered != a_d:
        raise IdentityViolated(
            "identity-violated: A^D != A^k ((B^k A^k)^D)^(k+1)",
            residual=recovered - a_d,
        )
    return candidate, recovered


# ---------------------------------------------------------------------------
# the forward and converse generalized constructions


def gdm_forward(p: ConstraintPair, inv: GDInverseData) -> dict:
    """The forward construction S = B^k T^2 A^k, Q = I - A T; verifies
    the six identities exactly and returns {identity: bool}."""
    if not (inv.commutes and inv.inner):
        raise ValueError("inverse data must commute and be inner")
    a, b, k, t = p.a, p.b, p.k, inv.t
    n = a.rows
    ak = a**k
    bk = b**k
    m = bk @ ak
    s = bk @ t @ t @ ak
    q = ExactMatrix.identity(n) - a @ t
    qa = q @ a
    report = {}
    ms = m @ s
    report["S*(B^kA^k) == (B^kA^k)*S == B^kA^k*T"] = (
        (s @ m) == ms == (m @ t)
    )
    report["S*(B^kA^k)*S == S"] = (s @ m @ s) == s
    report["Q^2 == Q and QA == AQ"] = (q @ q) == q and qa == (a @ q)
    report["(QA)^k B^k (QA)^k == (QA)^(k+1)"] = (
        ((qa**k) @ bk @ (qa**k)) == qa ** (k + 1)
    )
    lhs_v = m - m @ m @ s
    report["B^kA^k - (B^kA^k)^2 S == B^k (QA)^k"] = lhs_v == (bk @ (qa**k))
    if inv.residual_nilpotent:
        report["residual transfer: B^kA^k - (B^kA^k)^2 S nilpotent"] = (
            _is_nilpotent(lhs_v)
        )
    failed = [name for name, ok in report.items() if not ok]
    if failed:
        raise IdentityViolated(
            f"identity-violated: forward construction {failed}"
        )
    return report


def gdm_converse(p: ConstraintPair, inv: GDInverseData) -> dict:
    """The converse construction S' = A^k T'^(k+1) for an inner inverse
    T' of B^k A^k; verifies the identity chain exactly, including
    (A - A^2 S')^n == A^n - A^(n+1) S' for n up to 2k+2."""
    a, b, k, t = p.a, p.b, p.k, inv.t
    ak = a**k
    bk = b**k
    m = bk @ ak
    if not ((t @ m) == (m @ t) and (t @ m @ t) == t):
        raise ValueError("inverse data must commute with B^kA^k and be inner")
    s = ak @ (t ** (k + 1))
    report = {}
    at_k = ak @ (t**k)
    report["S'A == AS' == A^k T'^k"] = (s @ a) == at_k and (a @ s) == at_k
    report["S' A S' == S'"] = (s @ a @ s) == s
    core = a - a @ a @ s
    ok_pow = True
    an = a
    for n in range(1, 2 * k + 3):
        if (core**n) != (an - (an @ a) @ s):
            ok_pow = False
            break
        an = an @ a
    report["(A - A^2 S')^n == A^n - A^(n+1) S' for n <= 2k+2"] = ok_pow
    report["(A-A^2S')^k B^k (A-A^2S')^k == (A-A^2S')^(k+1)"] = (
        ((core**k) @ bk @ (core**k)) == core ** (k + 1)
    )
    rhs = m - m @ m @ s
    report["B^k (A-A^2S')^k == B^kA^k - (B^kA^k)^2 S'"] = (
        (bk @ (core**k)) == rhs
    )
    if inv.residual_nilpotent:
        report["residual transfer: B^kA^k - (B^kA^k)^2 S' nilpotent"] = (
            _is_nilpotent(rhs)
        )
        report["residual transfer: A - A^2 S' nilpotent"] = _is_nilpotent(core)
    failed = [name for name, ok in report.items() if not ok]
    if failed:
        raise IdentityViolated(
            f"identity-violated: converse construction {failed}"
        )
    return report


# ---------------------------------------------------------------------------
# pair generation


def _rng_matrix(rnd: random.Random, n: int, lo=-3, hi=3) -> ExactMatrix:
    return ExactMatrix.from_rows(
        [[rnd.randint(lo, hi) for _ in range(n)] for _ in range(n)]
    )


def _unimodular(rnd: random.Random, n: int, ops: int = None) -> ExactMatrix:
    """Random integer matrix with determinant +-1 built from elementary
    row operations (keeps inverses integral and entries small)."""
    m = ExactMatrix.identity(n)
    rows = m.to_rows()
    ops = ops if ops is not None else 2 * n
    for _ in range(ops):
        i = rnd.randrange(n)
        j = rnd.randrange(n)
        if i == j:
            continue
        c = rnd.choice([-2, -1, 1, 2])
        rows[i] = [rows[i][t] + QQi.of(c) * rows[j][t] for t in range(n)]
    return ExactMatrix.from_rows(rows)


def _invertible(rnd: random.Random, n: int) -> ExactMatrix:
    return _unimodular(rnd, n)


def _nilpotent_matrix(rnd: random.Random, n: int, degree: int) -> ExactMatrix:
    """Strictly upper-triangular with nilpotency degree <= degree."""
    rows = [[QQi.of(0)] * n for _ in range(n)]
    # band of width < degree above the diagonal
    for i in range(n):
        for j in range(i + 1, min(n, i + degree)):
            if j == i + 1 or rnd.random() < 0.4:
                rows[i][j] = QQi.of(rnd.randint(-2, 2))
    for i in range(n - 1):
        if (i % degree) != degree - 1 and i + 1 < n:
            pass
    m = ExactMatrix.from_rows(rows)
    # blunt instrument: zero enough superdiagonals that m**degree == 0
    while not (m**degree).is_zero():
        rows = m.to_rows()
        # drop the lowest nonzero band
        for i in range(n):
            for j in range(i + 1, n):
                if not rows[i][j].is_zero():
                    rows[i][j] = QQi.of(0)
                    break
        m = ExactMatrix.from_rows(rows)
    return m


def generate_pair(k: int, family: str, seed: int, size: int = None) -> ConstraintPair:
    """Deterministic constrained pair for the requested generator family."""
    if family not in GENERATOR_FAMILIES:
        raise ValueError(f"unknown generator family {family!r}")
    rnd = random.Random((k, family, seed).__repr__())
    if family == "solve_k1":
        if k != 1:
            raise ValueError("solve_k1 generates pairs for k = 1 only")
        n = size or rnd.randint(2, 5)
        while True:
            a = _rng_matrix(rnd, n, -2, 2)
            # plant some rank deficiency half the time
            if rnd.random() < 0.5:
                rows = a.to_rows()
                i = rnd.randrange(n)
                j = rnd.randrange(n)
                if i != j:
                    rows[i] = list(rows[j])
                    a = ExactMatrix.from_rows(rows)
            # solve A X A = A^2 for X; X = A is always a solution, so the
            # system is consistent; take the free-variables-zero solution
            lhs = _kron_sandwich(a)
            rhs = _vec(a @ a)
            x = lhs.solve(rhs)
            if x is None:
                continue
            b = _unvec(x, n)
            return ConstraintPair(a, b, 1)
    if family == "invertible_root":
        n = size or rnd.randint(2, 5)
        nmat = _invertible(rnd, n)
        a = (nmat.inv()) ** k
        b = ExactMatrix.identity(n) if k == 1 else nmat ** (k - 1)
        return ConstraintPair(a, b, k)
    if family == "nilpotent":
        n = size or rnd.randint(max(2, k + 1), max(4, k + 2))
        n = max(n, 2)
        a = _nilpotent_matrix(rnd, n, k + 1)
        return ConstraintPair(a, a, k)
    # mixed: block diagonal of an invertible_root pair and a nilpotent pair
    inv_pair = generate_pair(k, "invertible_root", seed * 2 + 1,
                             size=(size or 4) // 2 or 2)
    nil_pair = generate_pair(k, "nilpotent", seed * 2 + 2,
                             size=max(2, (size or 4) - ((size or 4) // 2)))
    a = ExactMatrix.block_diag(inv_pair.a, nil_pair.a)
    b = ExactMatrix.block_diag(inv_pair.b, nil_pair.b)
    return ConstraintPair(a, b, k)


def _vec(m: ExactMatrix) -> ExactMatrix:
    """Column-stacked vectorization as an n^2 x 1 matrix."""
    n = m.rows
    return ExactMatrix.from_rows(
        [[m.entry(i, j)] for j in range(n) for i in range(n)]
    )


def _unvec(v: ExactMatrix, n: int) -> ExactMatrix:
    rows = [[v.entry(j * n + i, 0) for j in range(n)] for i in range(n)]
    return ExactMatrix.from_rows(rows)


def _kron_sandwich(a: ExactMatrix) -> ExactMatrix:
    """The matrix of X -> A X A acting on column-stacked vectors:
    kron(A^T, A)."""
    n = a.rows
    at = a.transpose()
    rows = []
    for jb in range(n):
        for ib in range(n):
            row = []
            for js in range(n):
                for is_ in range(n):
                    row.append(at.entry(jb, js) * a.entry(ib, is_))
            rows.append(row)
    return ExactMatrix.from_rows(rows)


# ---------------------------------------------------------------------------
# meromorphic transfer on certified diagonal pairs


def _diag_symbol(e: OperatorExpr):
    """Entrywise affine description (family, c, d) of a diagonal
    expression: entries are c*s_n + d over the family's base values, or
    a plain value list."""
    c = QQi.of(1)
    d = QQi.of(0)
    node = e
    while isinstance(node, (ScaleOp, TranslateOp)):
        if isinstance(node, ScaleOp):
            c = c * node.factor
            d = d * node.factor
            node = node.inner
        else:
            d = d + node.shift
            node = node.inner
    if not isinstance(node, DiagOp):
        raise UnsupportedPair(
            "unsupported-pair: expressions must be diagonal atoms under"
            " affine combinators"
        )
    fam = node.family
    if isinstance(fam, DiagList):
        return ("list", tuple(c * v + d for v in fam.values))
    if isinstance(fam, DiagHarmonic):
        return ("harmonic", None, c, d)
    if isinstance(fam, DiagGeometric):
        return ("geom", fam.ratio, c, d)
    raise UnsupportedPair(f"unsupported-pair: diagonal family {fam!r}")


def _poly_mul(p, q):
    out = [QQi.of(0)] * (len(p) + len(q) - 1)
    for i, x in enumerate(p):
        for j, y in enumerate(q):
            out[i + j] = out[i + j] + x * y
    return out


def _poly_pow(p, k):
    out = [QQi.of(1)]
    for _ in range(k):
        out = _poly_mul(out, p)
    return out


def _poly_is_zero(p):
    return all(v.is_zero() for v in p)


def _entry_poly(sym):
    """Entry as a polynomial in the base variable s (low-degree first)."""
    _, _, c, d = sym
    return [d, c]


def is_meromorphic(e: OperatorExpr) -> bool:
    """acc(sigma) within {0} and finite equal ascent/descent at every
    nonzero spectral point."""
    sig = spectrum(e, "sigma")
    accs = rg.acc(sig)
    if not rg.subset(accs, rg.points(0)):
        return False
    pic = picture(e)
    zero = QQi.of(0)
    for cell in pic.cells:
        klass = cell.klass
        support = cell.support
        nonzero_part = not rg.subset(support, rg.points(zero))
        if not nonzero_part:
            continue
        if not (klass.ascent.is_finite and klass.descent.is_finite):
            # the only allowed bad point is 0 itself; a cell reaching
            # beyond {0} with infinite ascent/descent breaks meromorphy
            return False
    return True


def verify_meromorphic_transfer(a_expr, b_expr, k: int) -> dict:
    """Checks A^k B^k A^k == A^(k+1) entrywise on the certified pair and
    asserts: A meromorphic iff B^k A^k meromorphic."""
    sym_a = _diag_symbol(a_expr)
    sym_b = _diag_symbol(b_expr)
    if sym_a[0] == "list" or sym_b[0] == "list":
        if not (sym_a[0] == "list" and sym_b[0] == "list"):
            raise UnsupportedPair(
                "unsupported-pair: list diagonals must be paired with list"
                " diagonals over the same index set"
            )
        va, vb = sym_a[1], sym_b[1]
        if len(va) != len(vb):
            raise UnsupportedPair(
                "unsupported-pair: diagonal lists differ in length"
            )
        for x, y in zip(va, vb):
            if (x**k) * (y**k) * (x**k) != x ** (k + 1):
                raise ConstraintViolated(
                    "constraint-violated: entrywise a^k b^k a^k != a^(k+1)"
                )
        prod_vals = tuple((y**k) * (x**k) for x, y in zip(va, vb))
        prod_expr = DiagOp(DiagList(prod_vals))
    else:
        if sym_a[0] != sym_b[0] or sym_a[1] != sym_b[1]:
            raise UnsupportedPair(
                "unsupported-pair: diagonal families must share one index"
                " sequence"
            )
        pa = _entry_poly(sym_a)
        pb = _entry_poly(sym_b)
        lhs = _poly_mul(_poly_mul(_poly_pow(pa, k), _poly_pow(pb, k)),
                        _poly_pow(pa, k))
        rhs = _poly_pow(pa, k + 1)
        width = max(len(lhs), len(rhs))
        lhs = lhs + [QQi.of(0)] * (width - len(lhs))
        rhs = rhs + [QQi.of(0)] * (width - len(rhs))
        if not _poly_is_zero([x - y for x, y in zip(lhs, rhs)]):
            raise ConstraintViolated(
                "constraint-violated: entrywise a^k b^k a^k != a^(k+1)"
            )
        prod = _poly_mul(_poly_pow(pb, k), _poly_pow(pa, k))
        while len(prod) > 1 and prod[-1].is_zero():
            prod = prod[:-1]
        if len(prod) > 2:
            raise UnsupportedPair(
                "unsupported-pair: the product diagonal leaves the certified"
                " affine families"
            )
        d0 = prod[0]
        c0 = prod[1] if len(prod) == 2 else QQi.of(0)
        base = (
            DiagOp(DiagHarmonic())
            if sym_a[0] == "harmonic"
            else DiagOp(DiagGeometric(sym_a[1]))
        )
        prod_expr = base
        if not (c0 == QQi.of(1) and d0.is_zero()):
            if c0.is_zero():
                raise UnsupportedPair(
                    "unsupported-pair: constant product diagonal collapses"
                    " the index sequence"
                )
            prod_expr = TranslateOp(d0, ScaleOp(c0, base))
    mero_a = is_meromorphic(a_expr)
    mero_prod = is_meromorphic(prod_expr)
    holds = mero_a == mero_prod
    if not holds:
        raise IdentityViolated(
            "identity-violated: meromorphic transfer biconditional failed"
        )
    return {
        "k": k,
        "a_meromorphic": mero_a,
        "product_meromorphic": mero_prod,
        "biconditional": holds,
    }
