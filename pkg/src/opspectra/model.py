"""Operator expressions and their exact spectral pictures.

An expression is a tree of certified atoms (exact matrices, diagonal
operators, weighted unilateral shifts, Jordan blocks) under adjoint,
affine, and direct-sum combinators.  picture() computes the annotated
partition of the plane from which every named spectrum derives; each
cell carries the point classification (kernel/cokernel data, ascent and
descent, stabilized quantities, SVEP flags, decomposition flags)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from sympy import factorint

from . import regions as rg
from .drazin import ExactMatrix
from .errors import UnsupportedAtom
from .regions import Points, Region, SeqPoints
from .scalars import QQi, qqi_from_json, qqi_to_json, format_fraction

# ---------------------------------------------------------------------------
# extended naturals


class ExtNat:
    """A natural number or infinity, totally ordered, with n + inf = inf."""

    __slots__ = ("v",)

    def __init__(self, v):
        if isinstance(v, ExtNat):
            v = v.v
        if v is not None and (not isinstance(v, int) or v < 0):
            raise ValueError(f"not an extended natural: {v!r}")
        self.v = v

    @property
    def is_finite(self) -> bool:
        return self.v is not None

    def __add__(self, other: "ExtNat") -> "ExtNat":
        if self.v is None or other.v is None:
            return INF
        return ExtNat(self.v + other.v)

    def __sub__(self, other: "ExtNat"):
        """Signed difference when meaningful; None for inf - inf."""
        if self.v is None and other.v is None:
            return None
        if self.v is None:
            return INF
        if other.v is None:
            return NEG_INF
        return self.v - other.v

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            return self.v == other
        return isinstance(other, ExtNat) and self.v == other.v

    def __lt__(self, other: "ExtNat") -> bool:
        if self.v is None:
            return False
        if other.v is None:
            return True
        return self.v < other.v

    def __le__(self, other):
        return self == other or self < other

    def __hash__(self):
        return hash(("extnat", self.v))

    def __repr__(self):
        return "inf" if self.v is None else str(self.v)

    def to_json(self):
        return "inf" if self.v is None else self.v

    @staticmethod
    def from_json(v) -> "ExtNat":
        return INF if v == "inf" else ExtNat(int(v))

    @staticmethod
    def max(a: "ExtNat", b: "ExtNat") -> "ExtNat":
        return b if a < b else a


INF = ExtNat(None)
NEG_INF = object()   # sentinel for index comparisons only
ZERO = ExtNat(0)
ONE_N = ExtNat(1)


# ---------------------------------------------------------------------------
# classification records


@dataclass(frozen=True)
class Classification:
    """Exact point data for lam*I - T on one cell."""

    alpha: ExtNat
    beta: ExtNat
    range_closed: bool
    ascent: ExtNat
    descent: ExtNat
    alpha_ev: ExtNat
    beta_ev: ExtNat
    powers_range_closed: bool
    svep: bool
    svep_adj: bool
    admits_gkd: bool
    admits_gkrd: bool
    admits_gkmd: bool

    def __post_init__(self):
        if self.beta.is_finite and not self.range_closed:
            raise ValueError("finite-codimensional ranges are closed")
        if self.ascent.is_finite and self.descent.is_finite:
            if self.ascent != self.descent:
                raise ValueError("finite ascent and descent must agree")
        if self.ascent.is_finite and not self.svep:
            raise ValueError("finite ascent forces SVEP")
        if self.descent.is_finite and not self.svep_adj:
            raise ValueError("finite descent forces adjoint SVEP")
        if self.admits_gkd and not self.admits_gkrd:
            raise ValueError("GKD admissibility implies GKRD")
        if self.admits_gkrd and not self.admits_gkmd:
            raise ValueError("GKRD admissibility implies GKMD")
        if not self.alpha_ev <= self.alpha:
            raise ValueError("stabilized kernel dimension exceeds alpha")
        if not self.beta_ev <= self.beta:
            raise ValueError("stabilized cokernel dimension exceeds beta")

    def direct_sum(self, other: "Classification") -> "Classification":
        return Classification(
            alpha=self.alpha + other.alpha,
            beta=self.beta + other.beta,
            range_closed=self.range_closed and other.range_closed,
            ascent=ExtNat.max(self.ascent, other.ascent),
            descent=ExtNat.max(self.descent, other.descent),
            alpha_ev=self.alpha_ev + other.alpha_ev,
            beta_ev=self.beta_ev + other.beta_ev,
            powers_range_closed=self.powers_range_closed
            and other.powers_range_closed,
            svep=self.svep and other.svep,
            svep_adj=self.svep_adj and other.svep_adj,
            admits_gkd=self.admits_gkd and other.admits_gkd,
            admits_gkrd=self.admits_gkrd and other.admits_gkrd,
            admits_gkmd=self.admits_gkmd and other.admits_gkmd,
        )

    def to_json(self) -> dict:
        return {
            "alpha": self.alpha.to_json(),
            "beta": self.beta.to_json(),
            "range_closed": self.range_closed,
            "ascent": self.ascent.to_json(),
            "descent": self.descent.to_json(),
            "alpha_ev": self.alpha_ev.to_json(),
            "beta_ev": self.beta_ev.to_json(),
            "powers_range_closed": self.powers_range_closed,
            "svep": self.svep,
            "svep_adj": self.svep_adj,
            "admits_gkd": self.admits_gkd,
            "admits_gkrd": self.admits_gkrd,
            "admits_gkmd": self.admits_gkmd,
        }


RESOLVENT = Classification(
    alpha=ZERO, beta=ZERO, range_closed=True,
    ascent=ZERO, descent=ZERO,
    alpha_ev=ZERO, beta_ev=ZERO, powers_range_closed=True,
    svep=True, svep_adj=True,
    admits_gkd=True, admits_gkrd=True, admits_gkmd=True,
)


@dataclass(frozen=True)
class Cell:
    """One piece of the partition: the stored support region, countable
    punctures carved out by refinement, and the classification."""

    support: Region
    punctures: Region
    klass: Classification

    def contains(self, z: QQi) -> bool:
        return rg.member(self.support, z) and not rg.member(self.punctures, z)


@dataclass(frozen=True)
class SpectralPicture:
    cells: tuple

    def classify(self, z: QQi) -> Classification:
        for cell in self.cells:
            if cell.contains(z):
                return cell.klass
        return RESOLVENT

    def support(self) -> Region:
        """The non-resolvent set (punctures of one cell are members of
        another, so the union of supports is exact)."""
        return rg.union_all([c.support for c in self.cells])

    def to_json(self) -> list:
        return [
            {
                "region": rg.region_to_json(c.support),
                "punctures": rg.region_to_json(c.punctures),
                "classification": c.klass.to_json(),
            }
            for c in self.cells
        ]


# ---------------------------------------------------------------------------
# operator expressions


@dataclass(frozen=True)
class MatrixOp:
    matrix: ExactMatrix


@dataclass(frozen=True)
class DiagHarmonic:
    pass


@dataclass(frozen=True)
class DiagGeometric:
    ratio: Fraction

    def __post_init__(self):
        if not 0 < abs(self.ratio) < 1:
            raise UnsupportedAtom(
                "unsupported-atom: diagonal geometric ratio must satisfy 0 < |q| < 1"
            )


@dataclass(frozen=True)
class DiagList:
    """Diagonal with each listed value of infinite multiplicity."""

    values: tuple

    def __post_init__(self):
        if not self.values:
            raise UnsupportedAtom("unsupported-atom: empty diagonal list")


@dataclass(frozen=True)
class DiagOp:
    family: object   # DiagHarmonic | DiagGeometric | DiagList


@dataclass(frozen=True)
class WConst:
    weight: Fraction

    def __post_init__(self):
        if self.weight == 0:
            raise UnsupportedAtom("unsupported-atom: zero shift weight")


@dataclass(frozen=True)
class WGeometric:
    ratio: Fraction

    def __post_init__(self):
        if not 0 < abs(self.ratio) < 1:
            raise UnsupportedAtom(
                "unsupported-atom: geometric weights need 0 < |q| < 1"
            )


@dataclass(frozen=True)
class WInvFact:
    pass


@dataclass(frozen=True)
class ShiftOp:
    """Forward weighted unilateral shift on little-l2."""

    weights: object


@dataclass(frozen=True)
class BackShiftOp:
    """Adjoint of the forward shift; produced by Adj normalization."""

    weights: object


@dataclass(frozen=True)
class JordanOp:
    eigenvalue: QQi
    size: int

    def __post_init__(self):
        if self.size < 1:
            raise UnsupportedAtom("unsupported-atom: Jordan size must be >= 1")


@dataclass(frozen=True)
class AdjOp:
    inner: object


@dataclass(frozen=True)
class ScaleOp:
    factor: QQi
    inner: object


@dataclass(frozen=True)
class TranslateOp:
    shift: QQi
    inner: object


@dataclass(frozen=True)
class DirectSumOp:
    left: object
    right: object


OperatorExpr = object


def _push_adjoints(e, flag: bool = False):
    """Rewrite Adj down to the atoms (Hilbert-space convention: spectra
    conjugate, shifts swap direction)."""
    if isinstance(e, AdjOp):
        return _push_adjoints(e.inner, not flag)
    if isinstance(e, ScaleOp):
        c = e.factor.conj() if flag else e.factor
        return ScaleOp(c, _push_adjoints(e.inner, flag))
    if isinstance(e, TranslateOp):
        d = e.shift.conj() if flag else e.shift
        return TranslateOp(d, _push_adjoints(e.inner, flag))
    if isinstance(e, DirectSumOp):
        return DirectSumOp(
            _push_adjoints(e.left, flag), _push_adjoints(e.right, flag)
        )
    if not flag:
        return e
    if isinstance(e, MatrixOp):
        return MatrixOp(e.matrix.conj_transpose())
    if isinstance(e, JordanOp):
        return JordanOp(e.eigenvalue.conj(), e.size)
    if isinstance(e, DiagOp):
        fam = e.family
        if isinstance(fam, DiagList):
            return DiagOp(DiagList(tuple(v.conj() for v in fam.values)))
        return e  # harmonic/geometric entries are real
    if isinstance(e, ShiftOp):
        return BackShiftOp(e.weights)
    if isinstance(e, BackShiftOp):
        return ShiftOp(e.weights)
    raise UnsupportedAtom(f"unsupported-atom: cannot form adjoint of {e!r}")


# ---------------------------------------------------------------------------
# atom pictures


def _classification(
    alpha, beta, range_closed, ascent, descent, alpha_ev, beta_ev,
    powers_range_closed, svep, svep_adj, admits_gkd, admits_gkrd, admits_gkmd,
) -> Classification:
    return Classification(
        alpha=ExtNat(alpha) if not isinstance(alpha, ExtNat) else alpha,
        beta=ExtNat(beta) if not isinstance(beta, ExtNat) else beta,
        range_closed=range_closed,
        ascent=ExtNat(ascent) if not isinstance(ascent, ExtNat) else ascent,
        descent=ExtNat(descent) if not isinstance(descent, ExtNat) else descent,
        alpha_ev=ExtNat(alpha_ev) if not isinstance(alpha_ev, ExtNat) else alpha_ev,
        beta_ev=ExtNat(beta_ev) if not isinstance(beta_ev, ExtNat) else beta_ev,
        powers_range_closed=powers_range_closed,
        svep=svep,
        svep_adj=svep_adj,
        admits_gkd=admits_gkd,
        admits_gkrd=admits_gkrd,
        admits_gkmd=admits_gkmd,
    )


def _cell(support: Region, klass: Classification) -> Cell:
    return Cell(support, rg.EMPTY, klass)


def _matrix_charpoly(m: ExactMatrix):
    """Monic characteristic polynomial by the trace recursion
    (Faddeev-LeVerrier); coefficients low degree first."""
    n = m.rows
    out = [QQi.of(1)]
    current = ExactMatrix.identity(n)
    for k in range(1, n + 1):
        current = m @ current
        ck = _trace(current) / QQi.of(-k)
        out.append(ck)
        current = current + ExactMatrix.identity(n).scale(ck)
    # out holds [1, c_{n-1}, ..., c_0] high to low
    return list(reversed(out))


def _trace(m: ExactMatrix) -> QQi:
    t = QQi.of(0)
    for i in range(m.rows):
        t = t + m.entry(i, i)
    return t


def _gaussian_norm(a: int, b: int) -> int:
    return a * a + b * b


def _gi_mul(x, y):
    return (x[0] * y[0] - x[1] * y[1], x[0] * y[1] + x[1] * y[0])


def _gi_divmod(x, y):
    """Exact division in Z[i]; returns quotient or None."""
    n = _gaussian_norm(*y)
    re = x[0] * y[0] + x[1] * y[1]
    im = x[1] * y[0] - x[0] * y[1]
    if re % n or im % n:
        return None
    return (re // n, im // n)


def _two_squares(p: int):
    """a, b with a^2 + b^2 == p for prime p with p % 4 == 1 (or p == 2)."""
    if p == 2:
        return 1, 1
    a = 1
    while a * a * 2 <= p:
        rest = p - a * a
        b = int(rest**0.5)
        for bb in (b - 1, b, b + 1):
            if bb > 0 and bb * bb == rest:
                return a, bb
        a += 1
    raise AssertionError(f"no two-square splitting for prime {p}")


def _gaussian_prime_power_divisors(g):
    """Gaussian prime factors of g with their exponents."""
    n = _gaussian_norm(*g)
    if n == 1:
        return []
    out = []
    for p, e in factorint(n).items():
        if p % 4 == 3:
            out.append(((p, 0), e // 2))
        else:
            a, b = _two_squares(p)
            for pi in ((a, b), (a, -b)):
                k = 0
                cur = g
                while True:
                    nxt = _gi_divmod(cur, pi)
                    if nxt is None:
                        break
                    cur = nxt
                    k += 1
                if k:
                    out.append((pi, k))
                if p == 2:
                    break   # 1+i and 1-i are associates
    return out


def _gaussian_divisors(g):
    """All divisors of Gaussian integer g up to units, then times units."""
    factors = _gaussian_prime_power_divisors(g)
    divisors = [(1, 0)]
    for pi, k in factors:
        grown = []
        for d in divisors:
            cur = d
            for _ in range(k + 1):
                grown.append(cur)
                cur = _gi_mul(cur, pi)
        divisors = grown
    units = ((1, 0), (-1, 0), (0, 1), (0, -1))
    seen = set()
    for d in divisors:
        for u in units:
            z = _gi_mul(d, u)
            if z not in seen:
                seen.add(z)
                yield z


def gaussian_rational_roots(coeffs):
    """Roots in Q(i) of a monic polynomial with Q(i) coefficients given
    low-degree first; returns {root: multiplicity}.  Raises
    UnsupportedAtom when the polynomial does not split over Q(i)."""
    n = len(coeffs) - 1
    if coeffs[-1] != QQi.of(1):
        raise ValueError("monic polynomial required")
    dens = [1]
    for c in coeffs[:-1]:
        dens.append(c.re.denominator)
        dens.append(c.im.denominator)
    scale = 1
    for d in dens:
        scale = scale * d // _gcd(scale, d)
    # substitute x = y / scale: integer monic in y
    ints = []
    for k, c in enumerate(coeffs):
        factor = scale ** (n - k)
        re = c.re * factor
        im = c.im * factor
        if re.denominator != 1 or im.denominator != 1:
            raise AssertionError("denominator clearing failed")
        ints.append((re.numerator, im.numerator))
    roots = {}
    degree = n
    poly = ints
    while degree > 0:
        # strip zero roots
        if poly[0] == (0, 0):
            roots[(0, 0)] = roots.get((0, 0), 0) + 1
            poly = poly[1:]
            degree -= 1
            continue
        found = None
        for cand in _gaussian_divisors(poly[0]):
            if _gi_poly_eval(poly, cand) == (0, 0):
                found = cand
                break
        if found is None:
            raise UnsupportedAtom(
                "unsupported-atom: characteristic polynomial does not split"
                " over the Gaussian rationals"
            )
        while True:
            quotient = _gi_deflate(poly, found)
            if quotient is None:
                break
            roots[found] = roots.get(found, 0) + 1
            poly = quotient
            degree -= 1
            if degree == 0 or _gi_poly_eval(poly, found) != (0, 0):
                break
    return {
        QQi(Fraction(a, scale), Fraction(b, scale)): mult
        for (a, b), mult in roots.items()
    }


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _gi_poly_eval(poly, z):
    acc = (0, 0)
    for c in reversed(poly):
        acc = _gi_mul(acc, z)
        acc = (acc[0] + c[0], acc[1] + c[1])
    return acc


def _gi_deflate(poly, root):
    """Divide by (y - root); None if not an exact root."""
    out = [None] * (len(poly) - 1)
    carry = poly[-1]
    for k in range(len(poly) - 2, -1, -1):
        out[k] = carry
        prod = _gi_mul(carry, root)
        carry = (poly[k][0] + prod[0], poly[k][1] + prod[1])
    if carry != (0, 0):
        return None
    return out


def _picture_matrix(m: ExactMatrix) -> SpectralPicture:
    m._require_square()
    n = m.rows
    coeffs = _matrix_charpoly(m)
    roots = gaussian_rational_roots(coeffs)
    if sum(roots.values()) != n:
        raise UnsupportedAtom(
            "unsupported-atom: characteristic polynomial does not split"
            " over the Gaussian rationals"
        )
    cells = []
    ident = ExactMatrix.identity(n)
    for lam in sorted(roots, key=QQi.sort_key):
        shifted = ident.scale(lam) - m
        rank1 = shifted.rank()
        alpha = n - rank1
        prev = rank1
        power = shifted
        asc = 1
        while True:
            power = power @ shifted
            r = power.rank()
            if r == prev:
                break
            prev = r
            asc += 1
        klass = _classification(
            alpha=alpha, beta=alpha, range_closed=True,
            ascent=asc, descent=asc, alpha_ev=0, beta_ev=0,
            powers_range_closed=True, svep=True, svep_adj=True,
            admits_gkd=True, admits_gkrd=True, admits_gkmd=True,
        )
        cells.append(_cell(rg.points(lam), klass))
    return SpectralPicture(tuple(cells))


def _picture_jordan(e: JordanOp) -> SpectralPicture:
    klass = _classification(
        alpha=1, beta=1, range_closed=True,
        ascent=e.size, descent=e.size, alpha_ev=0, beta_ev=0,
        powers_range_closed=True, svep=True, svep_adj=True,
        admits_gkd=True, admits_gkrd=True, admits_gkmd=True,
    )
    return SpectralPicture((_cell(rg.points(e.eigenvalue), klass),))


# eigenvalue cells of compact-type diagonals: simple isolated eigenvalues
_DIAG_MEMBER = _classification(
    alpha=1, beta=1, range_closed=True,
    ascent=1, descent=1, alpha_ev=0, beta_ev=0,
    powers_range_closed=True, svep=True, svep_adj=True,
    admits_gkd=True, admits_gkrd=True, admits_gkmd=True,
)

# the accumulation point 0 of an injective compact diagonal: dense
# non-closed range, no kernel, a Riesz (hence meromorphic) operator that
# admits no generalized Kato decomposition
_DIAG_LIMIT = _classification(
    alpha=0, beta=INF, range_closed=False,
    ascent=0, descent=INF, alpha_ev=0, beta_ev=INF,
    powers_range_closed=False, svep=True, svep_adj=True,
    admits_gkd=False, admits_gkrd=True, admits_gkmd=True,
)

# eigenvalue of infinite multiplicity with closed range (finite lists)
_DIAG_FLAT = _classification(
    alpha=INF, beta=INF, range_closed=True,
    ascent=1, descent=1, alpha_ev=0, beta_ev=0,
    powers_range_closed=True, svep=True, svep_adj=True,
    admits_gkd=True, admits_gkrd=True, admits_gkmd=True,
)


def _picture_diag(e: DiagOp) -> SpectralPicture:
    fam = e.family
    if isinstance(fam, DiagHarmonic):
        return SpectralPicture(
            (
                _cell(rg.seq_harmonic(), _DIAG_MEMBER),
                _cell(rg.points(0), _DIAG_LIMIT),
            )
        )
    if isinstance(fam, DiagGeometric):
        return SpectralPicture(
            (
                _cell(rg.seq_geometric(fam.ratio), _DIAG_MEMBER),
                _cell(rg.points(0), _DIAG_LIMIT),
            )
        )
    if isinstance(fam, DiagList):
        cells = tuple(
            _cell(rg.points(v), _DIAG_FLAT)
            for v in sorted(set(fam.values), key=QQi.sort_key)
        )
        return SpectralPicture(cells)
    raise UnsupportedAtom(f"unsupported-atom: diagonal family {fam!r}")


def _shift_radius2(weights) -> Optional[Fraction]:
    """Squared spectral radius of the weighted shift; None when zero
    (quasi-nilpotent families)."""
    if isinstance(weights, WConst):
        return weights.weight * weights.weight
    if isinstance(weights, (WGeometric, WInvFact)):
        return None
    raise UnsupportedAtom(f"unsupported-atom: shift weights {weights!r}")


def _picture_shift(e: ShiftOp) -> SpectralPicture:
    r2 = _shift_radius2(e.weights)
    if r2 is None:
        # quasi-nilpotent injective shift: dense non-closed range at 0
        klass = _classification(
            alpha=0, beta=INF, range_closed=False,
            ascent=0, descent=INF, alpha_ev=0, beta_ev=INF,
            powers_range_closed=False, svep=True, svep_adj=True,
            admits_gkd=True, admits_gkrd=True, admits_gkmd=True,
        )
        return SpectralPicture((_cell(rg.points(0), klass),))
    interior = _classification(
        alpha=0, beta=1, range_closed=True,
        ascent=0, descent=INF, alpha_ev=0, beta_ev=1,
        powers_range_closed=True, svep=True, svep_adj=False,
        admits_gkd=True, admits_gkrd=True, admits_gkmd=True,
    )
    boundary = _classification(
        alpha=0, beta=INF, range_closed=False,
        ascent=0, descent=INF, alpha_ev=0, beta_ev=INF,
        powers_range_closed=False, svep=True, svep_adj=True,
        admits_gkd=False, admits_gkrd=False, admits_gkmd=False,
    )
    return SpectralPicture(
        (
            _cell(rg.open_disc(0, r2), interior),
            _cell(rg.circle(0, r2), boundary),
        )
    )


def _picture_backshift(e: BackShiftOp) -> SpectralPicture:
    r2 = _shift_radius2(e.weights)
    if r2 is None:
        # adjoint of the quasi-nilpotent shift: one-dimensional kernel,
        # kernels of the powers grow forever
        klass = _classification(
            alpha=1, beta=INF, range_closed=False,
            ascent=INF, descent=INF, alpha_ev=1, beta_ev=INF,
            powers_range_closed=False, svep=True, svep_adj=True,
            admits_gkd=True, admits_gkrd=True, admits_gkmd=True,
        )
        return SpectralPicture((_cell(rg.points(0), klass),))
    interior = _classification(
        alpha=1, beta=0, range_closed=True,
        ascent=INF, descent=0, alpha_ev=1, beta_ev=0,
        powers_range_closed=True, svep=False, svep_adj=True,
        admits_gkd=True, admits_gkrd=True, admits_gkmd=True,
    )
    boundary = _classification(
        alpha=0, beta=INF, range_closed=False,
        ascent=0, descent=INF, alpha_ev=0, beta_ev=INF,
        powers_range_closed=False, svep=True, svep_adj=True,
        admits_gkd=False, admits_gkrd=False, admits_gkmd=False,
    )
    return SpectralPicture(
        (
            _cell(rg.open_disc(0, r2), interior),
            _cell(rg.circle(0, r2), boundary),
        )
    )


# ---------------------------------------------------------------------------
# combinators


def _picture_affine(p: SpectralPicture, c: QQi, d: QQi) -> SpectralPicture:
    if c.is_zero():
        raise UnsupportedAtom(
            "unsupported-atom: scaling an operator by zero leaves the"
            " certified expression language"
        )
    cells = tuple(
        Cell(
            rg.affine(cell.support, c, d),
            rg.affine(cell.punctures, c, d),
            cell.klass,
        )
        for cell in p.cells
    )
    return SpectralPicture(cells)


def _picture_direct_sum(pa: SpectralPicture, pb: SpectralPicture) -> SpectralPicture:
    support_a = pa.support()
    support_b = pb.support()
    cells = []
    for ca in pa.cells:
        for cb in pb.cells:
            base = rg.intersect(ca.support, cb.support)
            if base.is_empty:
                continue
            punct = rg.union(
                rg.countable_part(ca.punctures), rg.countable_part(cb.punctures)
            )
            cells.append(Cell(base, punct, ca.klass.direct_sum(cb.klass)))
        base, extra = rg.subtract(ca.support, support_b)
        if not base.is_empty:
            punct = rg.union(rg.countable_part(ca.punctures), extra)
            cells.append(Cell(base, punct, ca.klass))
    for cb in pb.cells:
        base, extra = rg.subtract(cb.support, support_a)
        if not base.is_empty:
            punct = rg.union(rg.countable_part(cb.punctures), extra)
            cells.append(Cell(base, punct, cb.klass))
    return SpectralPicture(tuple(cells))


_PICTURE_CACHE: dict = {}
_CACHE_ENABLED = True


def set_picture_cache(enabled: bool):
    global _CACHE_ENABLED
    _CACHE_ENABLED = enabled
    if not enabled:
        _PICTURE_CACHE.clear()


def picture(e: OperatorExpr) -> SpectralPicture:
    """The exact spectral picture of an operator expression."""
    normalized = _push_adjoints(e)
    if _CACHE_ENABLED and normalized in _PICTURE_CACHE:
        return _PICTURE_CACHE[normalized]
    result = _picture_rec(normalized)
    if _CACHE_ENABLED:
        _PICTURE_CACHE[normalized] = result
    return result


def _picture_rec(e) -> SpectralPicture:
    if isinstance(e, MatrixOp):
        return _picture_matrix(e.matrix)
    if isinstance(e, JordanOp):
        return _picture_jordan(e)
    if isinstance(e, DiagOp):
        return _picture_diag(e)
    if isinstance(e, ShiftOp):
        return _picture_shift(e)
    if isinstance(e, BackShiftOp):
        return _picture_backshift(e)
    if isinstance(e, ScaleOp):
        return _picture_affine(_picture_rec(e.inner), e.factor, QQi.of(0))
    if isinstance(e, TranslateOp):
        return _picture_affine(_picture_rec(e.inner), QQi.of(1), e.shift)
    if isinstance(e, DirectSumOp):
        return _picture_direct_sum(_picture_rec(e.left), _picture_rec(e.right))
    if isinstance(e, AdjOp):
        return _picture_rec(_push_adjoints(e))
    raise UnsupportedAtom(f"unsupported-atom: {e!r}")


def classify(e: OperatorExpr, z: QQi) -> Classification:
    """Point query into picture(e)."""
    return picture(e).classify(z)


# ---------------------------------------------------------------------------
# instance library


def instance_library():
    """Named certified instances spanning SVEP failure, index
    cancellation, meromorphic and non-meromorphic parts."""
    half = Fraction(1, 2)
    shift1 = ShiftOp(WConst(Fraction(1)))
    out = [
        ("identity_2x2", MatrixOp(ExactMatrix.identity(2))),
        ("matrix_diag_2_0", MatrixOp(ExactMatrix.diag([2, 0]))),
        ("matrix_nilpotent_mixed", MatrixOp(ExactMatrix.from_rows(
            [[0, 1, 0], [0, 0, 0], [0, 0, 1]]))),
        ("jordan_0_3", JordanOp(QQi.of(0), 3)),
        ("jordan_i_2", JordanOp(QQi.of(0, 1), 2)),
        ("diag_harmonic", DiagOp(DiagHarmonic())),
        ("diag_geometric_half", DiagOp(DiagGeometric(half))),
        ("diag_flat_2_0", DiagOp(DiagList((QQi.of(2), QQi.of(0))))),
        ("shift_unit", shift1),
        ("adj_shift_unit", AdjOp(shift1)),
        ("shift_plus_adj_shift", DirectSumOp(shift1, AdjOp(shift1))),
        ("shift_invfact", ShiftOp(WInvFact())),
        ("shift_geometric_half", ShiftOp(WGeometric(half))),
        ("adj_shift_invfact", AdjOp(ShiftOp(WInvFact()))),
        ("shift_half_plus_flat", DirectSumOp(
            ShiftOp(WConst(half)), DiagOp(DiagList((QQi.of(2),))))),
        ("diag_harmonic_plus_shift", DirectSumOp(DiagOp(DiagHarmonic()), shift1)),
        ("translated_shift", TranslateOp(QQi.of(2), shift1)),
        ("scaled_shift_1_plus_i", ScaleOp(QQi.of(1, 1), shift1)),
        ("two_shifts_nested", DirectSumOp(shift1, ShiftOp(WConst(half)))),
        ("jordan_plus_diag_harmonic", DirectSumOp(
            JordanOp(QQi.of(0), 2), DiagOp(DiagHarmonic()))),
    ]
    return out


# ---------------------------------------------------------------------------
# JSON AST


def expr_to_json(e) -> dict:
    if isinstance(e, MatrixOp):
        return {"op": "matrix", "matrix": e.matrix.to_json()}
    if isinstance(e, JordanOp):
        return {
            "op": "jordan",
            "eigenvalue": qqi_to_json(e.eigenvalue),
            "size": e.size,
        }
    if isinstance(e, DiagOp):
        fam = e.family
        if isinstance(fam, DiagHarmonic):
            return {"op": "diag", "family": "harmonic"}
        if isinstance(fam, DiagGeometric):
            return {
                "op": "diag",
                "family": "geometric",
                "ratio": format_fraction(fam.ratio),
            }
        return {
            "op": "diag",
            "family": "list",
            "values": [qqi_to_json(v) for v in fam.values],
        }
    if isinstance(e, ShiftOp) or isinstance(e, BackShiftOp):
        op = "shift" if isinstance(e, ShiftOp) else "backshift"
        w = e.weights
        if isinstance(w, WConst):
            return {"op": op, "weights": "const", "value": format_fraction(w.weight)}
        if isinstance(w, WGeometric):
            return {"op": op, "weights": "geometric", "ratio": format_fraction(w.ratio)}
        return {"op": op, "weights": "invfact"}
    if isinstance(e, AdjOp):
        return {"op": "adj", "arg": expr_to_json(e.inner)}
    if isinstance(e, ScaleOp):
        return {"op": "scale", "factor": qqi_to_json(e.factor),
                "arg": expr_to_json(e.inner)}
    if isinstance(e, TranslateOp):
        return {"op": "translate", "shift": qqi_to_json(e.shift),
                "arg": expr_to_json(e.inner)}
    if isinstance(e, DirectSumOp):
        return {"op": "dsum", "args": [expr_to_json(e.left), expr_to_json(e.right)]}
    raise TypeError(f"not an operator expression: {e!r}")


def expr_from_json(obj) -> OperatorExpr:
    op = obj["op"]
    if op == "matrix":
        return MatrixOp(ExactMatrix.from_json(obj["matrix"]))
    if op == "jordan":
        return JordanOp(qqi_from_json(obj["eigenvalue"]), int(obj["size"]))
    if op == "diag":
        fam = obj["family"]
        if fam == "harmonic":
            return DiagOp(DiagHarmonic())
        if fam == "geometric":
            return DiagOp(DiagGeometric(Fraction(obj["ratio"])))
        if fam == "list":
            return DiagOp(DiagList(tuple(qqi_from_json(v) for v in obj["values"])))
        raise ValueError(f"unknown diagonal family {fam!r}")
    if op in ("shift", "backshift"):
        w = obj["weights"]
        if w == "const":
            weights = WConst(Fraction(obj["value"]))
        elif w == "geometric":
            weights = WGeometric(Fraction(obj["ratio"]))
        elif w == "invfact":
            weights = WInvFact()
        else:
            raise ValueError(f"unknown weight family {w!r}")
        return ShiftOp(weights) if op == "shift" else BackShiftOp(weights)
    if op == "adj":
        return AdjOp(expr_from_json(obj["arg"]))
    if op == "scale":
        return ScaleOp(qqi_from_json(obj["factor"]), expr_from_json(obj["arg"]))
    if op == "translate":
        return TranslateOp(qqi_from_json(obj["shift"]), expr_from_json(obj["arg"]))
    if op == "dsum":
        args = obj["args"]
        expr = expr_from_json(args[0])
        for a in args[1:]:
            expr = DirectSumOp(expr, expr_from_json(a))
        return expr
    raise ValueError(f"unknown operator {op!r}")
