"""Exact region algebra on the complex plane.

A Region is a finite union of certified primitives: finite point sets,
convergent sequence families (members only; the limit is carried as
metadata), and circles / discs / annuli with Gaussian-rational centers
and rational squared radii.  Same-center primitives are kept as merged
radial intervals over the squared distance to the center, which makes
union, accumulation, membership, equality and subset decisions exact.
Open discs exist only to carry SVEP-failure sets; every spectrum the
engine emits is a union of closed primitives.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from sympy import factorint

from .errors import DegenerateArrangement, IncomparableSequences
from .scalars import (
    QQi,
    Radius,
    format_fraction,
    qqi_from_json,
    qqi_to_json,
)

# ---------------------------------------------------------------------------
# primitives


@dataclass(frozen=True)
class Points:
    points: frozenset

    @property
    def kind(self):
        return "points"


@dataclass(frozen=True)
class SeqPoints:
    """Members of a certified convergent sequence: coeff*s_n + offset,
    where s_n runs over 1/n (harmonic) or ratio**n (geometric), minus a
    finite excluded set.  The member set accumulates exactly at offset,
    which is not itself a member."""

    family: str                      # "harmonic" | "geom"
    ratio: Optional[Fraction]        # geom only, 0 < |ratio| < 1
    coeff: QQi
    offset: QQi
    excluded: frozenset = frozenset()

    def __post_init__(self):
        if self.family not in ("harmonic", "geom"):
            raise ValueError(f"unknown sequence family {self.family}")
        if self.coeff.is_zero():
            raise ValueError("sequence coefficient must be nonzero")
        if self.family == "geom":
            if self.ratio is None or self.ratio == 0 or abs(self.ratio) >= 1:
                raise ValueError("geometric ratio must satisfy 0 < |q| < 1")
        elif self.ratio is not None:
            raise ValueError("harmonic family takes no ratio")

    @property
    def kind(self):
        return "seq"

    @property
    def tag(self) -> str:
        if self.family == "harmonic":
            return f"harmonic[{self.coeff}, {self.offset}]"
        return f"geom({format_fraction(self.ratio)})[{self.coeff}, {self.offset}]"

    @property
    def limit(self) -> QQi:
        return self.offset

    def base_value(self, n: int) -> Fraction:
        if self.family == "harmonic":
            return Fraction(1, n)
        return self.ratio**n

    def member(self, n: int) -> QQi:
        return self.coeff * QQi.of(self.base_value(n)) + self.offset

    def member_index(self, z: QQi) -> Optional[int]:
        """Index n with member(n) == z ignoring the excluded set, else None."""
        w = (z - self.offset) / self.coeff
        if not w.is_real():
            return None
        s = w.re
        if self.family == "harmonic":
            if s > 0 and s.numerator == 1:
                return s.denominator
            return None
        if s == 0:
            return None
        p = self.ratio
        n = 1
        while abs(p) > abs(s):
            p *= self.ratio
            n += 1
        return n if p == s else None

    def contains(self, z: QQi) -> bool:
        if z in self.excluded:
            return False
        return self.member_index(z) is not None

    def members_upto(self, count: int):
        out = []
        n = 1
        while len(out) < count:
            m = self.member(n)
            if m not in self.excluded:
                out.append((n, m))
            n += 1
            if n > count + len(self.excluded) + 1:
                break
        return out

    def with_excluded(self, extra: Iterable[QQi]) -> "SeqPoints":
        new = frozenset(self.excluded) | {
            z for z in extra if self.member_index(z) is not None
        }
        return SeqPoints(self.family, self.ratio, self.coeff, self.offset, new)


@dataclass(frozen=True)
class Circle:
    center: QQi
    r: Radius

    @property
    def kind(self):
        return "circle"


@dataclass(frozen=True)
class Disc:
    center: QQi
    r: Radius
    closed: bool = True

    @property
    def kind(self):
        return "disc" if self.closed else "open-disc"


@dataclass(frozen=True)
class Annulus:
    center: QQi
    r_inner: Radius
    r_outer: Radius
    closed_inner: bool = True
    closed_outer: bool = True

    @property
    def kind(self):
        return "annulus"


Primitive = object

# ---------------------------------------------------------------------------
# radial intervals: the squared-distance view of the concentric primitives


@dataclass(frozen=True, order=True)
class RadialInterval:
    lo2: Fraction
    hi2: Fraction
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self):
        if self.lo2 < 0 or self.hi2 < self.lo2:
            raise ValueError("bad radial interval")
        if self.lo2 == self.hi2 and not (self.lo_closed and self.hi_closed):
            raise ValueError("degenerate interval must be closed (a circle)")
        if self.lo2 == 0 and not self.lo_closed and self.hi2 > 0:
            raise ValueError("punctured discs are not representable")

    def contains(self, v: Fraction) -> bool:
        if v < self.lo2 or v > self.hi2:
            return False
        if v == self.lo2 and not self.lo_closed:
            return False
        if v == self.hi2 and not self.hi_closed:
            return False
        return True

    @property
    def is_circle(self) -> bool:
        return self.lo2 == self.hi2

    def closure(self) -> "RadialInterval":
        return RadialInterval(self.lo2, self.hi2, True, True)

    def endpoints(self):
        return (self.lo2, self.hi2)


def _merge_intervals(intervals) -> tuple:
    ivs = sorted(intervals, key=lambda iv: (iv.lo2, not iv.lo_closed, iv.hi2))
    out = []
    for iv in ivs:
        if not out:
            out.append(iv)
            continue
        last = out[-1]
        joinable = iv.lo2 < last.hi2 or (
            iv.lo2 == last.hi2 and (last.hi_closed or iv.lo_closed)
        )
        if not joinable:
            out.append(iv)
            continue
        lo2, lo_c = last.lo2, last.lo_closed
        if iv.lo2 == last.lo2:
            lo_c = lo_c or iv.lo_closed
        if iv.hi2 > last.hi2:
            hi2, hi_c = iv.hi2, iv.hi_closed
        elif iv.hi2 == last.hi2:
            hi2, hi_c = last.hi2, last.hi_closed or iv.hi_closed
        else:
            hi2, hi_c = last.hi2, last.hi_closed
        out[-1] = RadialInterval(lo2, hi2, lo_c, hi_c)
    return tuple(out)


def _interval_subset(iv: RadialInterval, merged) -> bool:
    """iv contained in a union of merged (disjoint, unmergeable) intervals."""
    for j in merged:
        lo_ok = iv.lo2 > j.lo2 or (
            iv.lo2 == j.lo2 and (j.lo_closed or not iv.lo_closed)
        )
        hi_ok = iv.hi2 < j.hi2 or (
            iv.hi2 == j.hi2 and (j.hi_closed or not iv.hi_closed)
        )
        if lo_ok and hi_ok:
            return True
    return False


def _interval_intersect(a: RadialInterval, b: RadialInterval):
    lo2 = max(a.lo2, b.lo2)
    hi2 = min(a.hi2, b.hi2)
    if lo2 > hi2:
        return None
    lo_c = a.contains(lo2) and b.contains(lo2)
    hi_c = a.contains(hi2) and b.contains(hi2)
    if lo2 == hi2:
        return RadialInterval(lo2, hi2, True, True) if (lo_c and hi_c) else None
    if lo2 == 0 and not lo_c:
        # would be a punctured disc; impossible here since lo2 == 0 forces
        # both inputs to contain 0
        raise AssertionError("unreachable punctured intersection")
    return RadialInterval(lo2, hi2, lo_c, hi_c)


def _interval_subtract(a: RadialInterval, b: RadialInterval):
    """a minus b as a list of intervals (and possibly circles)."""
    inter = _interval_intersect(a, b)
    if inter is None:
        return [a]
    out = []
    if a.lo2 < inter.lo2 or (a.lo2 == inter.lo2 and a.lo_closed and not inter.lo_closed):
        if a.lo2 == inter.lo2:
            out.append(RadialInterval(a.lo2, a.lo2, True, True))
        else:
            out.append(
                RadialInterval(a.lo2, inter.lo2, a.lo_closed, not inter.lo_closed)
            )
    if a.hi2 > inter.hi2 or (a.hi2 == inter.hi2 and a.hi_closed and not inter.hi_closed):
        if a.hi2 == inter.hi2:
            out.append(RadialInterval(a.hi2, a.hi2, True, True))
        elif inter.hi2 == 0:
            raise DegenerateArrangement(
                "degenerate-arrangement: puncturing a disc at its center"
            )
        else:
            out.append(
                RadialInterval(inter.hi2, a.hi2, not inter.hi_closed, a.hi_closed)
            )
    return out


# ---------------------------------------------------------------------------
# sqrt-form comparisons: sign of (u + eps*2*sqrt(v)) - t with v >= 0


def _cmp_sqrtform(u: Fraction, v: Fraction, eps: int, t: Fraction) -> int:
    rest = t - u
    if eps > 0:
        if rest < 0:
            return 1
        return ((4 * v > rest * rest) - (4 * v < rest * rest))
    if rest > 0:
        return -1
    rest = -rest
    return ((rest * rest > 4 * v) - (rest * rest < 4 * v))


# ---------------------------------------------------------------------------
# Region


@dataclass(frozen=True)
class Region:
    pts: frozenset = frozenset()
    seqs: tuple = ()
    groups: tuple = ()   # ((center, (RadialInterval, ...)), ...)

    @property
    def is_empty(self) -> bool:
        return not self.pts and not self.seqs and not self.groups

    @property
    def is_countable(self) -> bool:
        return not self.groups

    def primitives(self):
        """The spec-facing primitive list."""
        out = []
        if self.pts:
            out.append(Points(self.pts))
        out.extend(self.seqs)
        for center, ivs in self.groups:
            for iv in ivs:
                out.append(_interval_primitive(center, iv))
        return out


def _interval_primitive(center, iv: RadialInterval):
    if iv.is_circle:
        if iv.lo2 == 0:
            return Points(frozenset({center}))
        return Circle(center, Radius(iv.lo2))
    if iv.lo2 == 0:
        return Disc(center, Radius(iv.hi2), iv.hi_closed)
    return Annulus(center, Radius(iv.lo2), Radius(iv.hi2), iv.lo_closed, iv.hi_closed)


def _primitive_interval(p):
    if isinstance(p, Circle):
        if p.r.square == 0:
            return None
        return p.center, RadialInterval(p.r.square, p.r.square, True, True)
    if isinstance(p, Disc):
        if p.r.square == 0:
            return None
        return p.center, RadialInterval(Fraction(0), p.r.square, True, p.closed)
    if isinstance(p, Annulus):
        if p.r_outer.square == 0:
            return None
        if p.r_inner.square == p.r_outer.square:
            if not (p.closed_inner or p.closed_outer):
                raise ValueError("empty annulus")
            return p.center, RadialInterval(
                p.r_inner.square, p.r_outer.square, True, True
            )
        return p.center, RadialInterval(
            p.r_inner.square, p.r_outer.square, p.closed_inner, p.closed_outer
        )
    raise TypeError(f"not a continuum primitive: {p!r}")


EMPTY = Region()


def region(primitives: Iterable[Primitive]) -> Region:
    """Normalized region from an iterable of primitives."""
    pts = set()
    seqs = []
    groups = {}
    for p in primitives:
        if isinstance(p, Points):
            pts |= set(p.points)
        elif isinstance(p, SeqPoints):
            seqs.append(p)
        elif isinstance(p, (Circle, Disc, Annulus)):
            ci = _primitive_interval(p)
            if ci is None:
                center = p.center
                if isinstance(p, Disc) and not p.closed:
                    continue  # open disc of radius 0 is empty
                pts.add(center)
                continue
            center, iv = ci
            groups.setdefault(center, []).append(iv)
        elif isinstance(p, Region):
            pts |= set(p.pts)
            seqs.extend(p.seqs)
            for center, ivs in p.groups:
                groups.setdefault(center, []).extend(ivs)
        else:
            raise TypeError(f"not a region primitive: {p!r}")
    return _normalize(pts, seqs, groups)


def _group_contains(groups, z: QQi) -> bool:
    for center, ivs in groups:
        d2 = (z - center).abs2()
        for iv in ivs:
            if iv.contains(d2):
                return True
    return False


def _normalize(pts, seqs, group_map) -> Region:
    merged = {c: _merge_intervals(ivs) for c, ivs in group_map.items() if ivs}
    merged = {c: ivs for c, ivs in merged.items() if ivs}
    # cross-center absorption of whole intervals
    changed = True
    while changed:
        changed = False
        for c in list(merged):
            kept = []
            for iv in merged[c]:
                absorbed = False
                for c2, ivs2 in merged.items():
                    if c2 == c:
                        continue
                    if any(
                        _continuum_in_continuum(c, iv, c2, iv2) for iv2 in ivs2
                    ):
                        absorbed = True
                        break
                if absorbed:
                    changed = True
                else:
                    kept.append(iv)
            if kept:
                merged[c] = tuple(kept)
            else:
                del merged[c]
    groups = tuple(
        sorted(
            ((c, ivs) for c, ivs in merged.items()),
            key=lambda g: g[0].sort_key(),
        )
    )

    # canonicalize sequences: recombine geometric parity splits, merge
    # identical families, then absorb into the continuum
    seqs = _canonicalize_seqs(seqs)
    final_seqs = []
    for sp in seqs:
        placed = _absorb_seq(sp, groups)
        if placed is None:
            final_seqs.append(sp)
        else:
            kept_seq, leftover_pts = placed
            if kept_seq is not None:
                final_seqs.append(kept_seq)
            pts |= leftover_pts

    # points: drop those covered by the continuum or by sequence members;
    # a point matching an excluded member re-enters its sequence instead
    out_pts = set()
    for z in pts:
        if _group_contains(groups, z):
            continue
        covered = False
        for i, sp in enumerate(final_seqs):
            if sp.member_index(z) is not None:
                if z in sp.excluded:
                    final_seqs[i] = SeqPoints(
                        sp.family, sp.ratio, sp.coeff, sp.offset,
                        sp.excluded - {z},
                    )
                covered = True
                break
        if not covered:
            out_pts.add(z)

    final_seqs = tuple(
        sorted(
            final_seqs,
            key=lambda s: (
                s.family,
                s.ratio if s.ratio is not None else Fraction(0),
                s.coeff.sort_key(),
                s.offset.sort_key(),
            ),
        )
    )
    return Region(frozenset(out_pts), final_seqs, groups)


def _canonicalize_seqs(seqs):
    seqs = list(seqs)
    # merge set-identical families, folding excluded sets
    changed = True
    while changed:
        changed = False
        for i in range(len(seqs)):
            for j in range(i + 1, len(seqs)):
                a, b = seqs[i], seqs[j]
                m = _merge_seq_pair(a, b)
                if m is not None:
                    seqs[i] = m
                    del seqs[j]
                    changed = True
                    break
            if changed:
                break
    # drop sequences wholly subsumed by another
    out = []
    for i, a in enumerate(seqs):
        subsumed = False
        for j, b in enumerate(seqs):
            if i == j:
                continue
            if _seq_set_subsumes(b, a) and not (
                _seq_set_subsumes(a, b) and j > i
            ):
                subsumed = True
                break
        if not subsumed:
            out.append(a)
    return out


def _same_family(a: SeqPoints, b: SeqPoints) -> bool:
    return (
        a.family == b.family
        and a.ratio == b.ratio
        and a.coeff == b.coeff
        and a.offset == b.offset
    )


def _merge_seq_pair(a: SeqPoints, b: SeqPoints):
    """Merge when the union of the two member sets is itself a family."""
    if _same_family(a, b):
        return SeqPoints(a.family, a.ratio, a.coeff, a.offset,
                         a.excluded & b.excluded)
    # geometric parity halves: ratio r == q^2, coeffs c and c*q
    if (
        a.family == "geom"
        and b.family == "geom"
        and a.ratio == b.ratio
        and a.offset == b.offset
    ):
        for x, y in ((a, b), (b, a)):
            q = y.coeff / x.coeff
            if q.is_real() and q.re * q.re == a.ratio and abs(q.re) < 1 and q.re != 0:
                # x holds the exponents 2m, y the exponents 2m+1 of q
                # relative to coefficient x.coeff; the union is the full
                # geometric family with coefficient x.coeff*q == y.coeff
                merged = SeqPoints("geom", q.re, y.coeff, a.offset, frozenset())
                return merged.with_excluded(a.excluded | b.excluded)
    return None


def _seq_set_subsumes(b: SeqPoints, a: SeqPoints) -> bool:
    """True when the member set of b contains the member set of a."""
    ok, exceptions = _seq_canonical_subset(a, b)
    if not ok:
        return False
    return all(e in a.excluded for e in exceptions)


def _seq_canonical_subset(a: SeqPoints, b: SeqPoints):
    """Family-level inclusion members(a) within members(b), ignoring a's
    exclusions.  Returns (holds, exceptions) where exceptions are members
    of a knocked out by b.excluded."""
    if a.offset != b.offset:
        return False, ()
    if a.family == "harmonic" and b.family == "harmonic":
        t = b.coeff / a.coeff
        if not (t.is_real() and t.re > 0 and t.re.denominator == 1):
            return False, ()
    elif a.family == "geom" and b.family == "geom":
        j = _log_ratio(a.ratio, b.ratio)
        if j is None or j < 1:
            return False, ()
        t = a.coeff / b.coeff
        s = _log_ratio_qqi(t, b.ratio)
        if s is None or j + s < 1:
            return False, ()
    elif a.family == "geom" and b.family == "harmonic":
        if a.ratio <= 0 or a.ratio.numerator != 1:
            return False, ()
        u = b.coeff / a.coeff
        if not (u.is_real() and u.re > 0):
            return False, ()
        if (u.re * a.ratio.denominator).denominator != 1:
            return False, ()
    else:  # harmonic members are never all inside a geometric family
        return False, ()
    exceptions = tuple(e for e in b.excluded if a.member_index(e) is not None)
    return True, exceptions


def _log_ratio(x: Fraction, base: Fraction):
    """Integer j >= 1 with base**j == x, else None (|base| < 1)."""
    p = base
    j = 1
    while abs(p) > abs(x):
        p *= base
        j += 1
        if j > 512:
            return None
    return j if p == x else None


def _log_ratio_qqi(t: QQi, base: Fraction):
    """Integer s (any sign) with base**s == t, else None."""
    if not t.is_real() or t.re == 0:
        return None
    x = t.re
    if x == 1:
        return 0
    if abs(x) < 1:
        p = base
        s = 1
        while abs(p) > abs(x):
            p *= base
            s += 1
            if s > 512:
                return None
        return s if p == x else None
    p = Fraction(1)
    s = 0
    while abs(p) < abs(x):
        p /= base
        s -= 1
        if s < -512:
            return None
    return s if p == x else None


# ---------------------------------------------------------------------------
# sequence vs. concentric group: the tail/head splitter


@dataclass(frozen=True)
class GroupSplit:
    n0: int                      # all indices >= n0 behave as the tails say
    tail_in_pos: bool            # tail side for members with s_n > 0
    tail_in_neg: bool            # tail side for members with s_n < 0 (geom q<0)
    head: dict = field(hash=False, compare=False, default_factory=dict)

    def member_in(self, sp: SeqPoints, n: int) -> bool:
        if n < self.n0:
            return self.head[n]
        if sp.family == "geom" and sp.ratio < 0 and n % 2 == 1:
            return self.tail_in_neg
        return self.tail_in_pos


def _seq_group_split(sp: SeqPoints, center: QQi, intervals) -> GroupSplit:
    a = sp.coeff
    b = sp.offset - center
    alpha = a.abs2()
    beta = 2 * (a.re * b.re + a.im * b.im)
    gamma = b.abs2()

    def d2_of(s: Fraction) -> Fraction:
        return alpha * s * s + beta * s + gamma

    def in_group(v: Fraction) -> bool:
        return any(iv.contains(v) for iv in intervals)

    endpoints = sorted({e for iv in intervals for e in iv.endpoints()})
    others = [e for e in endpoints if e != gamma]
    clearance = min((abs(e - gamma) for e in others), default=None)

    inf_above = any(iv.lo2 <= gamma < iv.hi2 for iv in intervals)
    inf_below = any(iv.lo2 < gamma <= iv.hi2 for iv in intervals)

    sign_pos = (beta > 0) - (beta < 0) or 1      # drift sign as s -> 0+
    sign_neg = (beta < 0) - (beta > 0) or 1      # drift sign as s -> 0-
    tail_pos = inf_above if sign_pos > 0 else inf_below
    tail_neg = inf_above if sign_neg > 0 else inf_below

    n = 1
    abs_beta = abs(beta)
    while True:
        s = sp.base_value(n)
        mag = abs(s)
        ok = True
        if clearance is not None and alpha * mag * mag + abs_beta * mag >= clearance:
            ok = False
        if beta != 0 and alpha * mag >= abs_beta:
            ok = False
        if ok:
            break
        n += 1
        if n > 100000:
            raise DegenerateArrangement(
                "degenerate-arrangement: sequence threshold did not stabilize"
            )
    n0 = n
    head = {k: in_group(d2_of(sp.base_value(k))) for k in range(1, n0)}
    return GroupSplit(n0, tail_pos, tail_neg, head)


# ---------------------------------------------------------------------------
# absorb a sequence into the continuum during normalization


def _absorb_seq(sp: SeqPoints, groups):
    """Drop sequence members covered by the continuum.  Returns None when
    nothing changes, else (kept_seq_or_None, leftover_points)."""
    if not groups:
        return None
    splits = [_seq_group_split(sp, c, ivs) for c, ivs in groups]
    n0 = max(s.n0 for s in splits)
    alternating = sp.family == "geom" and sp.ratio < 0
    tail_pos = any(s.tail_in_pos for s in splits)
    tail_neg = any(s.tail_in_neg for s in splits) if alternating else tail_pos

    def covered(n: int) -> bool:
        return any(s.member_in(sp, n) for s in splits)

    if alternating and tail_pos != tail_neg:
        return _keep_uncovered_parity(sp, splits, n0, tail_pos)
    if not tail_pos:
        # co-finitely many members stay; excluded grows by the covered head
        extra = [
            sp.member(n)
            for n in range(1, n0)
            if covered(n) and sp.member(n) not in sp.excluded
        ]
        if not extra:
            return None
        return sp.with_excluded(extra), set()
    # co-finitely many members are covered: leftovers become points
    leftover = {
        sp.member(n)
        for n in range(1, n0)
        if not covered(n) and sp.member(n) not in sp.excluded
    }
    return None, leftover


def _keep_uncovered_parity(sp: SeqPoints, splits, n0, tail_pos):
    """Alternating geometric family with exactly one covered parity:
    keep the uncovered parity as a ratio**2 subfamily.  Odd indices have
    s < 0 when the ratio is negative."""
    part = "neg" if tail_pos else "pos"
    kept_seq = _parity_subfamily(sp, part)
    leftover = set()
    extra_excluded = []
    for n in range(1, n0 + 1):
        m = sp.member(n)
        in_kept = kept_seq.member_index(m) is not None
        if m in sp.excluded:
            if in_kept:
                extra_excluded.append(m)
            continue
        covered = any(s.member_in(sp, n) for s in splits)
        if covered and in_kept:
            extra_excluded.append(m)
        elif not covered and not in_kept:
            leftover.add(m)
    extra_excluded.extend(sp.excluded)
    return kept_seq.with_excluded(extra_excluded), leftover


# ---------------------------------------------------------------------------
# membership


def member(r: Region, z: QQi) -> bool:
    """Exact membership; closed primitives include their boundaries."""
    if z in r.pts:
        return True
    if _group_contains(r.groups, z):
        return True
    return any(sp.contains(z) for sp in r.seqs)


# ---------------------------------------------------------------------------
# cross-center continuum tests


def _continuum_in_continuum(c1, iv1: RadialInterval, c2, iv2: RadialInterval) -> bool:
    """Every z with |z-c1|^2 in iv1 also has |z-c2|^2 in iv2 (exact)."""
    if c1 == c2:
        return _interval_subset(iv1, (iv2,))
    d2 = (c1 - c2).abs2()
    lo, hi = iv1.lo2, iv1.hi2
    # maximum squared distance from c2 over the primitive: (sqrt(d2)+sqrt(hi))^2
    u_max, v_max = d2 + hi, d2 * hi
    cmp_hi = _cmp_sqrtform(u_max, v_max, +1, iv2.hi2)
    if cmp_hi > 0:
        return False
    if cmp_hi == 0:
        attained = iv1.hi_closed
        if attained and not iv2.hi_closed:
            return False
    # minimum squared distance from c2 over the primitive
    if iv2.lo2 == 0:
        return True
    # regimes by the position of c2 relative to the radii of iv1; the
    # minimum squared distance has the form (sqrt(d2) - sqrt(x))^2
    if d2 > hi or (d2 == hi and not iv1.hi_closed and not iv1.is_circle):
        cmp_lo = _cmp_sqrtform(d2 + hi, d2 * hi, -1, iv2.lo2)
        attained = iv1.hi_closed
    elif iv1.is_circle:
        cmp_lo = _cmp_sqrtform(d2 + lo, d2 * lo, -1, iv2.lo2)
        attained = True
    elif d2 < lo or (d2 == lo and not iv1.lo_closed):
        cmp_lo = _cmp_sqrtform(d2 + lo, d2 * lo, -1, iv2.lo2)
        attained = iv1.lo_closed
    else:
        # c2 lies within the solid band of iv1: distances reach 0
        return False
    if cmp_lo < 0:
        return False
    if cmp_lo == 0 and attained and not iv2.lo_closed:
        return False
    return True


def _continuum_disjoint(c1, iv1: RadialInterval, c2, iv2: RadialInterval):
    """True / False when certifiable, else None."""
    if c1 == c2:
        return _interval_intersect(iv1, iv2) is None
    d2 = (c1 - c2).abs2()
    # far apart: sqrt(hi1) + sqrt(hi2) < sqrt(d2)
    u, v = iv1.hi2 + iv2.hi2, iv1.hi2 * iv2.hi2
    cmp_far = _cmp_sqrtform(u, v, +1, d2)
    if cmp_far < 0:
        return True
    if cmp_far == 0:
        if iv1.hi_closed and iv2.hi_closed:
            raise DegenerateArrangement(
                "degenerate-arrangement: externally tangent circles"
            )
        return True
    # one inside the other's hole: sqrt(d2) + sqrt(hi1) < sqrt(lo2)
    if iv2.lo2 > 0:
        u, v = d2 + iv1.hi2, d2 * iv1.hi2
        cmp_in = _cmp_sqrtform(u, v, +1, iv2.lo2)
        if cmp_in < 0:
            return True
        if cmp_in == 0:
            if iv1.hi_closed and iv2.lo_closed:
                raise DegenerateArrangement(
                    "degenerate-arrangement: internally tangent circles"
                )
            return True
    if iv1.lo2 > 0:
        u, v = d2 + iv2.hi2, d2 * iv2.hi2
        cmp_in = _cmp_sqrtform(u, v, +1, iv1.lo2)
        if cmp_in < 0:
            return True
        if cmp_in == 0:
            if iv2.hi_closed and iv1.lo_closed:
                raise DegenerateArrangement(
                    "degenerate-arrangement: internally tangent circles"
                )
            return True
    return None


# ---------------------------------------------------------------------------
# sequence vs. region coverage


def _seq_subset(sp: SeqPoints, reg: Region) -> bool:
    """Are all members of sp inside reg?  Exact, may raise
    IncomparableSequences when the tail coverage cannot be certified."""
    splits = [_seq_group_split(sp, c, ivs) for c, ivs in reg.groups]
    n0 = max((s.n0 for s in splits), default=1)
    alternating = sp.family == "geom" and sp.ratio < 0
    tail_pos = any(s.tail_in_pos for s in splits)
    tail_neg = any(s.tail_in_neg for s in splits) if alternating else tail_pos

    def group_covered(n: int) -> bool:
        return any(s.member_in(sp, n) for s in splits)

    def pointwise_covered(n: int, m: QQi) -> bool:
        return (
            group_covered(n)
            or m in reg.pts
            or any(bs.contains(m) for bs in reg.seqs)
        )

    # parity tails not swallowed by the continuum
    missing = []
    if alternating:
        if not tail_pos:
            missing.append("pos")
        if not tail_neg:
            missing.append("neg")
    elif not tail_pos:
        missing.append("all")

    seq_cover_excl = []
    for part in missing:
        sub = _parity_subfamily(sp, part)
        covering = None
        for bs in reg.seqs:
            ok, exceptions = _seq_canonical_subset(sub, bs)
            if ok:
                covering = exceptions
                break
        if covering is not None:
            seq_cover_excl.extend(covering)
            continue
        # no family-level cover: a finite scan must find a missing member
        n = n0
        scanned = 0
        while scanned < 256:
            if _parity_matches(sp, n, part):
                m = sp.member(n)
                if m not in sp.excluded:
                    if not pointwise_covered(n, m):
                        return False
                    scanned += 1
            n += 1
        raise IncomparableSequences(
            f"incomparable-sequences: {sp.tag} tail coverage undecidable"
        )
    for n in range(1, n0):
        m = sp.member(n)
        if m in sp.excluded:
            continue
        if not pointwise_covered(n, m):
            return False
    for e in seq_cover_excl:
        if e in sp.excluded:
            continue
        idx = sp.member_index(e)
        if idx is not None and idx < n0:
            continue  # already checked in the head loop
        if not member(reg, e):
            return False
    return True


def _parity_subfamily(sp: SeqPoints, part: str) -> SeqPoints:
    if part == "all":
        return sp
    q = sp.ratio
    q2 = q * q
    if part == "pos":       # even indices
        return SeqPoints("geom", q2, sp.coeff, sp.offset)
    return SeqPoints("geom", q2, sp.coeff / QQi.of(q), sp.offset)


def _parity_matches(sp: SeqPoints, n: int, part: str) -> bool:
    if part == "all":
        return True
    return (n % 2 == 0) == (part == "pos")


# ---------------------------------------------------------------------------
# subset / equality


def subset(a: Region, b: Region) -> bool:
    """Exact set inclusion on the supported fragment."""
    for z in a.pts:
        if not member(b, z):
            return False
    for sp in a.seqs:
        if not _seq_subset(sp, b):
            return False
    b_group_map = dict(b.groups)
    for center, ivs in a.groups:
        merged_same = b_group_map.get(center, ())
        for iv in ivs:
            if _interval_subset(iv, merged_same):
                continue
            if any(
                _continuum_in_continuum(center, iv, c2, iv2)
                for c2, ivs2 in b.groups
                if c2 != center
                for iv2 in ivs2
            ):
                continue
            if _witness_outside(center, iv, b):
                return False
            raise DegenerateArrangement(
                "degenerate-arrangement: cannot certify continuum coverage"
            )
    return True


def equal(a: Region, b: Region) -> bool:
    if a == b:
        return True
    return subset(a, b) and subset(b, a)


def _rational_between_sqrt(lo2: Fraction, hi2: Fraction) -> Fraction:
    """Rational x with lo2 < x*x < hi2 (requires lo2 < hi2)."""
    lo_f, hi_f = float(lo2), float(hi2)
    guess = Fraction((lo_f**0.5 + hi_f**0.5) / 2).limit_denominator(1 << 24)
    if lo2 < guess * guess < hi2:
        return guess
    lo_b, hi_b = Fraction(0), hi2 + 1
    while True:
        mid = (lo_b + hi_b) / 2
        m2 = mid * mid
        if m2 <= lo2:
            lo_b = mid
        elif m2 >= hi2:
            hi_b = mid
        else:
            return mid


def _rational_point_on_circle(r2: Fraction):
    """Some (x, y) rationals with x^2 + y^2 == r2, else None."""
    n, d = r2.numerator, r2.denominator
    target = n * d
    lim = int(target**0.5) + 2
    x = 0
    while x * x <= target and x <= lim + 1:
        rem = target - x * x
        y = int(rem**0.5)
        for yy in (y - 1, y, y + 1):
            if yy >= 0 and yy * yy == rem:
                return Fraction(x, d), Fraction(yy, d)
        x += 1
    return None


_ROTATIONS = (
    QQi.of(1),
    QQi.of(-1),
    QQi.of(0, 1),
    QQi.of(0, -1),
    QQi.of(Fraction(3, 5), Fraction(4, 5)),
    QQi.of(Fraction(3, 5), Fraction(-4, 5)),
    QQi.of(Fraction(-3, 5), Fraction(4, 5)),
    QQi.of(Fraction(5, 13), Fraction(12, 13)),
)


def _witness_outside(center, iv: RadialInterval, b: Region) -> bool:
    """Find a rational point of the primitive not in b (certifies
    non-containment).  False means every probe landed inside b."""
    probes = []
    if iv.is_circle:
        pt = _rational_point_on_circle(iv.lo2)
        if pt is None:
            raise DegenerateArrangement(
                "degenerate-arrangement: no rational witness on the circle"
            )
        base = QQi(pt[0], pt[1])
        probes = [center + base * rot for rot in _ROTATIONS]
    else:
        radii = []
        if iv.lo2 == 0 and iv.lo_closed:
            probes.append(center)
        if iv.lo2 < iv.hi2:
            radii.append(_rational_between_sqrt(iv.lo2, iv.hi2))
            mid = (iv.lo2 + iv.hi2) / 2
            if mid < iv.hi2:
                radii.append(_rational_between_sqrt(mid, iv.hi2))
            if iv.lo2 < mid:
                radii.append(_rational_between_sqrt(iv.lo2, mid))
        if iv.lo_closed and iv.lo2 > 0:
            pt = _rational_point_on_circle(iv.lo2)
            if pt is not None:
                probes.extend(center + QQi(*pt) * rot for rot in _ROTATIONS[:4])
        if iv.hi_closed:
            pt = _rational_point_on_circle(iv.hi2)
            if pt is not None:
                probes.extend(center + QQi(*pt) * rot for rot in _ROTATIONS[:4])
        for x in radii:
            probes.extend(center + QQi.of(x) * rot for rot in _ROTATIONS)
    for z in probes:
        d2 = (z - center).abs2()
        if not iv.contains(d2):
            continue
        if not member(b, z):
            return True
    return False


# ---------------------------------------------------------------------------
# acc / iso


def acc(r: Region) -> Region:
    """Accumulation points: limits of sequences plus the closures of the
    continuum pieces; finite point sets contribute nothing."""
    prims = []
    for sp in r.seqs:
        prims.append(Points(frozenset({sp.limit})))
    for center, ivs in r.groups:
        for iv in ivs:
            prims.append(_interval_primitive(center, iv.closure()))
    return region(prims)


def iso(r: Region) -> Region:
    """Members of r that are not accumulation points of r."""
    a = acc(r)
    prims = []
    for z in r.pts:
        if not member(a, z):
            prims.append(Points(frozenset({z})))
    for sp in r.seqs:
        kept = _seq_minus_region(sp, a)
        prims.extend(kept)
    return region(prims)


def _seq_minus_region(sp: SeqPoints, reg: Region):
    """Members of sp outside reg as primitives (sequences and points)."""
    splits = [_seq_group_split(sp, c, ivs) for c, ivs in reg.groups]
    n0 = max((s.n0 for s in splits), default=1)
    alternating = sp.family == "geom" and sp.ratio < 0
    tail_pos = any(s.tail_in_pos for s in splits)
    tail_neg = any(s.tail_in_neg for s in splits) if alternating else tail_pos

    def group_covered(n: int) -> bool:
        return any(s.member_in(sp, n) for s in splits)

    def fully_covered(n: int, m: QQi) -> bool:
        return group_covered(n) or m in reg.pts or any(
            bs.contains(m) for bs in reg.seqs
        )

    out = []
    survivors_parts = []
    if alternating:
        if not tail_pos:
            survivors_parts.append("pos")
        if not tail_neg:
            survivors_parts.append("neg")
    elif not tail_pos:
        survivors_parts.append("all")

    for part in survivors_parts:
        sub = _parity_subfamily(sp, part)
        blocker = None
        for bs in reg.seqs:
            ok, exceptions = _seq_canonical_subset(sub, bs)
            if ok:
                blocker = exceptions
                break
        if blocker is not None:
            # the parity tail is inside a sequence of reg except for that
            # sequence's excluded members
            leftovers = set()
            for e in blocker:
                if sp.member_index(e) is not None and e not in sp.excluded:
                    if not member(reg, e):
                        leftovers.add(e)
            if leftovers:
                out.append(Points(frozenset(leftovers)))
            continue
        if reg.seqs:
            # partial sequence overlap: keep the subfamily, patch by
            # explicit exclusion of the covered members when that set is
            # certifiably finite, else give up honestly
            covered_members = _finite_seq_overlap(sub, reg.seqs)
            if covered_members is None:
                raise IncomparableSequences(
                    f"incomparable-sequences: {sp.tag} minus a partially"
                    " overlapping family"
                )
            sub = sub.with_excluded(covered_members)
        sub = sub.with_excluded(reg.pts)
        start_excl = []
        for n in range(1, n0 + 1):
            if not _parity_matches(sp, n, part):
                continue
            m = sp.member(n)
            if m in sp.excluded or fully_covered(n, m):
                if sub.member_index(m) is not None:
                    start_excl.append(m)
        extra = frozenset(sp.excluded) | frozenset(start_excl)
        out.append(sub.with_excluded(extra))

    # heads of swallowed parities
    leftover_pts = set()
    all_parts = ["pos", "neg"] if alternating else ["all"]
    for part in all_parts:
        if part in survivors_parts:
            continue
        for n in range(1, n0):
            if not _parity_matches(sp, n, part):
                continue
            m = sp.member(n)
            if m in sp.excluded:
                continue
            if not fully_covered(n, m):
                leftover_pts.add(m)
    if leftover_pts:
        out.append(Points(frozenset(leftover_pts)))
    return out


def _finite_seq_overlap(sub: SeqPoints, others):
    """Members of sub covered by the sequences in others, when that set
    is certifiably finite; None when it is (or may be) infinite."""
    covered = set()
    for bs in others:
        if bs.offset != sub.offset:
            both = _offset_separated_overlap(sub, bs)
            covered |= both
            continue
        pieces = _same_limit_intersection(sub, bs)
        if pieces is None:
            return None
        finite, infinite = pieces
        if infinite:
            return None
        covered |= finite
    return covered


def _offset_separated_overlap(a: SeqPoints, b: SeqPoints):
    """Exact (finite) member intersection of two families with distinct
    limits."""
    delta2 = (a.offset - b.offset).abs2()
    out = set()
    ca2 = a.coeff.abs2()
    n = 1
    while True:
        s = a.base_value(n)
        if ca2 * s * s * 4 < delta2:
            break
        m = a.member(n)
        if m not in a.excluded and b.contains(m):
            out.add(m)
        n += 1
        if n > 100000:
            raise IncomparableSequences("incomparable-sequences: overlap scan")
    cb2 = b.coeff.abs2()
    k = 1
    while True:
        s = b.base_value(k)
        if cb2 * s * s * 4 < delta2:
            break
        m = b.member(k)
        if m not in b.excluded and a.contains(m):
            out.add(m)
        k += 1
        if k > 100000:
            raise IncomparableSequences("incomparable-sequences: overlap scan")
    return out


def _same_limit_intersection(a: SeqPoints, b: SeqPoints):
    """Member intersection of two families sharing a limit.  Returns
    (finite_points, infinite_pieces) or None when undecidable.  The
    infinite pieces are SeqPoints."""
    if _same_family(a, b):
        merged_excl = a.excluded | b.excluded
        return set(), [SeqPoints(a.family, a.ratio, a.coeff, a.offset,
                                 frozenset(merged_excl))]
    ok_ab, exc_ab = _seq_canonical_subset(a, b)
    if ok_ab:
        sub = a.with_excluded(set(exc_ab) | set(b.excluded))
        return set(), [sub]
    ok_ba, exc_ba = _seq_canonical_subset(b, a)
    if ok_ba:
        sub = b.with_excluded(set(exc_ba) | set(a.excluded))
        return set(), [sub]
    if a.family == "harmonic" and b.family == "harmonic":
        t = b.coeff / a.coeff
        if not (t.is_real() and t.re > 0):
            return set(), []
        p, q = t.re.numerator, t.re.denominator
        # common members are c_a/(q k): the coeff c_a/q harmonic family
        sub = SeqPoints(
            "harmonic", None, a.coeff / QQi.of(q), a.offset,
            frozenset(a.excluded) | frozenset(b.excluded),
        )
        return set(), [sub]
    if a.family == "geom" and b.family == "geom":
        return _geom_geom_intersection(a, b)
    if a.family == "geom":
        return _geom_harmonic_intersection(a, b)
    return _geom_harmonic_intersection(b, a)


def _prime_vector(x: Fraction) -> dict:
    out = dict(factorint(x.numerator))
    for p, e in factorint(x.denominator).items():
        out[p] = out.get(p, 0) - e
    return {p: e for p, e in out.items() if e}


def _geom_geom_intersection(a: SeqPoints, b: SeqPoints):
    """Solve c_a q_a^n == c_b q_b^m exactly via prime exponents of the
    squared moduli, then verify candidate solutions."""
    ra2 = a.ratio * a.ratio
    rb2 = b.ratio * b.ratio
    t = b.coeff / a.coeff
    if t.is_zero():
        return set(), []
    g2 = t.abs2()
    ve = _prime_vector(ra2)
    vf = _prime_vector(rb2)
    vg = _prime_vector(g2)
    primes = sorted(set(ve) | set(vf) | set(vg))
    # n*ve - m*vf = vg over every prime
    rows = [(ve.get(p, 0), vf.get(p, 0), vg.get(p, 0)) for p in primes]
    base = None
    direction = None
    for e1, f1, g1 in rows:
        for e2, f2, g2_ in rows:
            det = e1 * (-f2) - (-f1) * e2
            if det != 0:
                n_num = g1 * (-f2) - (-f1) * g2_
                m_num = e1 * g2_ - g1 * e2
                if n_num % det or m_num % det:
                    return set(), []
                base = (n_num // det, m_num // det)
                break
        if base is not None:
            break
    if base is not None:
        n, m = base
        for e, f, g in rows:
            if n * e - m * f != g:
                return set(), []
        if n < 1 or m < 1:
            return set(), []
        if a.member(n) == b.member(m):
            z = a.member(n)
            if z not in a.excluded and z not in b.excluded:
                return {z}, []
        return set(), []
    # all rows parallel: a one-parameter family of (n, m) solutions
    nz = [(e, f, g) for e, f, g in rows if e or f]
    if not nz:
        return set(), []
    e0, f0, g0 = nz[0]
    from math import gcd as _gcd

    d = _gcd(e0, f0)
    if d and g0 % d:
        return set(), []
    for e, f, g in rows:
        if e * f0 != f * e0:
            return set(), []
        consistent = (g * e0 == e * g0) if e0 else (g * f0 == f * g0)
        if not consistent:
            return set(), []
    # solutions of n e0 - m f0 = g0: stride (f0/d, e0/d)
    sn, sm = f0 // d, e0 // d
    # particular solution by scanning small n
    sols = []
    for n in range(1, 2 * abs(sn) + 64):
        num = n * e0 - g0
        if f0 and num % f0 == 0:
            m = num // f0
            if m >= 1 and a.member(n) == b.member(m):
                sols.append((n, m))
        if len(sols) >= 2:
            break
    if not sols:
        return set(), []
    n0_, m0_ = sols[0]
    if len(sols) == 1 or sn == 0:
        z = a.member(n0_)
        if z not in a.excluded and z not in b.excluded:
            return {z}, []
        return set(), []
    stride = sols[1][0] - sols[0][0]
    ratio_new = a.ratio**stride
    if abs(ratio_new) >= 1:
        return set(), []
    coeff_new = a.coeff * QQi.of(a.ratio ** (n0_ - stride))
    sub = SeqPoints(
        "geom", ratio_new, coeff_new, a.offset,
        frozenset(a.excluded) | frozenset(b.excluded),
    )
    return set(), [sub]


def _geom_harmonic_intersection(a: SeqPoints, b: SeqPoints):
    """Members shared by geometric a and harmonic b (same limit)."""
    if a.ratio < 0:
        fin = set()
        inf_pieces = []
        for part in ("pos", "neg"):
            sub = _parity_subfamily(a, part)
            res = _geom_harmonic_intersection(sub, b)
            if res is None:
                return None
            f, pieces = res
            fin |= f
            inf_pieces.extend(pieces)
        fin = {z for z in fin if z not in a.excluded}
        inf_pieces = [p.with_excluded(a.excluded) for p in inf_pieces]
        return fin, inf_pieces
    u = b.coeff / a.coeff
    if not (u.is_real() and u.re > 0):
        return set(), []
    q = a.ratio
    bden = q.denominator
    if q.numerator == 1:
        # n = u * bden**m: integral for all m past a computable threshold
        m0 = 1
        while (u.re * bden**m0).denominator != 1 and m0 < 4096:
            m0 += 1
        if (u.re * bden**m0).denominator != 1:
            return set(), []
        excl = set(a.excluded) | set(b.excluded)
        if m0 == 1:
            pieces = [a.with_excluded(b.excluded)]
            return set(), pieces
        coeff_new = a.coeff * QQi.of(q ** (m0 - 1))
        sub = SeqPoints("geom", q, coeff_new, a.offset, frozenset())
        sub = sub.with_excluded(excl)
        fin = set()
        for m in range(1, m0):
            z = a.member(m)
            if z not in a.excluded and b.contains(z):
                fin.add(z)
        return fin, [sub]
    # numerator > 1: members are harmonic values for at most finitely
    # many exponents (a prime of the numerator eventually wins)
    fin = set()
    vnum = _prime_vector(Fraction(q.numerator))
    bound = 1
    uval = u.re
    for p, e in vnum.items():
        vp_u = 0
        num, den = uval.numerator, uval.denominator
        while num % p == 0:
            vp_u += 1
            num //= p
        while den % p == 0:
            vp_u -= 1
            den //= p
        bound = max(bound, (max(vp_u, 0) // e) + 2)
    for m in range(1, bound + 2):
        z = a.member(m)
        if z not in a.excluded and b.contains(z):
            fin.add(z)
    return fin, []


# ---------------------------------------------------------------------------
# conjugate / affine


def conjugate(r: Region) -> Region:
    prims = []
    if r.pts:
        prims.append(Points(frozenset(z.conj() for z in r.pts)))
    for sp in r.seqs:
        prims.append(
            SeqPoints(
                sp.family, sp.ratio, sp.coeff.conj(), sp.offset.conj(),
                frozenset(z.conj() for z in sp.excluded),
            )
        )
    for center, ivs in r.groups:
        for iv in ivs:
            prims.append(_interval_primitive(center.conj(), iv))
    return region(prims)


def affine(r: Region, c: QQi, d: QQi) -> Region:
    """Image of r under z -> c*z + d (exact)."""
    if c.is_zero():
        if r.is_empty:
            return EMPTY
        return region([Points(frozenset({d}))])
    scale2 = c.abs2()
    prims = []
    if r.pts:
        prims.append(Points(frozenset(c * z + d for z in r.pts)))
    for sp in r.seqs:
        prims.append(
            SeqPoints(
                sp.family, sp.ratio, c * sp.coeff, c * sp.offset + d,
                frozenset(c * z + d for z in sp.excluded),
            )
        )
    for center, ivs in r.groups:
        nc = c * center + d
        for iv in ivs:
            prims.append(
                _interval_primitive(
                    nc,
                    RadialInterval(
                        iv.lo2 * scale2, iv.hi2 * scale2,
                        iv.lo_closed, iv.hi_closed,
                    ),
                )
            )
    return region(prims)


def union(a: Region, b: Region) -> Region:
    return region([a, b])


def union_all(regs: Iterable[Region]) -> Region:
    return region(list(regs))


# ---------------------------------------------------------------------------
# intersection / difference (needed by the spectral-picture refinement)


def intersect(a: Region, b: Region) -> Region:
    """Exact intersection; raises DegenerateArrangement on lens-shaped
    cross-center overlaps outside the vocabulary."""
    prims = []
    for z in a.pts:
        if member(b, z):
            prims.append(Points(frozenset({z})))
    for z in b.pts:
        if member(a, z):
            prims.append(Points(frozenset({z})))
    for sp in a.seqs:
        prims.extend(_seq_restrict_to(sp, b))
    for sp in b.seqs:
        prims.extend(_seq_restrict_continuum_only(sp, a))
    a_groups = dict(a.groups)
    for center, ivs in a.groups:
        b_same = dict(b.groups).get(center, ())
        for iv in ivs:
            for iv2 in b_same:
                got = _interval_intersect(iv, iv2)
                if got is not None:
                    prims.append(_interval_primitive(center, got))
        for c2, ivs2 in b.groups:
            if c2 == center:
                continue
            for iv2 in ivs2:
                piece = _cross_center_intersect(center, iv, c2, iv2)
                if piece is not None:
                    prims.append(piece)
    return region(prims)


def _cross_center_intersect(c1, iv1, c2, iv2):
    dis = _continuum_disjoint(c1, iv1, c2, iv2)
    if dis:
        return None
    if _continuum_in_continuum(c1, iv1, c2, iv2):
        return _interval_primitive(c1, iv1)
    if _continuum_in_continuum(c2, iv2, c1, iv1):
        return _interval_primitive(c2, iv2)
    raise DegenerateArrangement(
        "degenerate-arrangement: partially overlapping primitives with"
        " different centers"
    )


def _seq_restrict_to(sp: SeqPoints, reg: Region):
    """Members of sp inside reg, as primitives (exact)."""
    out = list(_seq_restrict_continuum_only(sp, reg))
    # members captured by points of reg
    caught = {z for z in reg.pts if sp.contains(z)}
    # members shared with sequences of reg
    fin = set()
    for bs in reg.seqs:
        if bs.offset != sp.offset:
            fin |= _offset_separated_overlap(sp, bs)
            continue
        res = _same_limit_intersection(sp, bs)
        if res is None:
            raise IncomparableSequences(
                f"incomparable-sequences: {sp.tag} vs {bs.tag}"
            )
        f, pieces = res
        fin |= f
        out.extend(pieces)
    extra = caught | fin
    if extra:
        out.append(Points(frozenset(extra)))
    return out


def _seq_restrict_continuum_only(sp: SeqPoints, reg: Region):
    """Members of sp inside the continuum part of reg."""
    if not reg.groups:
        return []
    splits = [_seq_group_split(sp, c, ivs) for c, ivs in reg.groups]
    n0 = max(s.n0 for s in splits)
    alternating = sp.family == "geom" and sp.ratio < 0
    tail_pos = any(s.tail_in_pos for s in splits)
    tail_neg = any(s.tail_in_neg for s in splits) if alternating else tail_pos

    def covered(n: int) -> bool:
        return any(s.member_in(sp, n) for s in splits)

    pieces = []
    head_pts = set()
    kept_parts = []
    if alternating:
        if tail_pos:
            kept_parts.append("pos")
        if tail_neg:
            kept_parts.append("neg")
    elif tail_pos:
        kept_parts.append("all")
    for part in kept_parts:
        sub = _parity_subfamily(sp, part)
        excl = set(sp.excluded)
        for n in range(1, n0 + 1):
            if not _parity_matches(sp, n, part):
                continue
            m = sp.member(n)
            if m in sp.excluded:
                continue
            if not covered(n) and sub.member_index(m) is not None:
                excl.add(m)
        pieces.append(sub.with_excluded(excl))
    # heads of parities whose tail is outside
    all_parts = ["pos", "neg"] if alternating else ["all"]
    for part in all_parts:
        if part in kept_parts:
            continue
        for n in range(1, n0):
            if not _parity_matches(sp, n, part):
                continue
            m = sp.member(n)
            if m not in sp.excluded and covered(n):
                head_pts.add(m)
    if head_pts:
        pieces.append(Points(frozenset(head_pts)))
    return pieces


def subtract_continuum(a: Region, b: Region) -> Region:
    """a minus the continuum part of b; countable parts of b are ignored
    (the caller tracks them as punctures)."""
    prims = []
    kept_pts = {z for z in a.pts if not _group_contains(b.groups, z)}
    if kept_pts:
        prims.append(Points(frozenset(kept_pts)))
    cont_only = Region(frozenset(), (), b.groups)
    for sp in a.seqs:
        prims.extend(_seq_minus_region(sp, cont_only))
    b_groups = dict(b.groups)
    for center, ivs in a.groups:
        same = b_groups.get(center, ())
        for iv in ivs:
            remains = [iv]
            for iv2 in same:
                remains = [
                    piece for r_ in remains for piece in _interval_subtract(r_, iv2)
                ]
            final = []
            for piece in remains:
                drop = False
                for c2, ivs2 in b.groups:
                    if c2 == center:
                        continue
                    for iv2 in ivs2:
                        if _continuum_in_continuum(center, piece, c2, iv2):
                            drop = True
                            break
                        dis = _continuum_disjoint(center, piece, c2, iv2)
                        if dis is None:
                            raise DegenerateArrangement(
                                "degenerate-arrangement: cross-center"
                                " subtraction outside the vocabulary"
                            )
                        if not dis and _continuum_in_continuum(
                            c2, iv2, center, piece
                        ):
                            raise DegenerateArrangement(
                                "degenerate-arrangement: subtraction would"
                                " punch a hole at a different center"
                            )
                    if drop:
                        break
                if not drop:
                    final.append(piece)
            prims.extend(_interval_primitive(center, p) for p in final)
    return region(prims)


def subtract(a: Region, b: Region) -> tuple[Region, Region]:
    """a minus b.  Countable parts of b removed from the continuum of a
    cannot be absorbed into the vocabulary; they are returned separately
    as punctures.  Returns (difference_base, punctures)."""
    base = subtract_continuum(a, b)
    countable_b = countable_part(b)
    if countable_b.is_empty:
        return base, EMPTY
    prims = []
    kept_pts = set()
    for z in base.pts:
        if z in countable_b.pts or any(sp.contains(z) for sp in countable_b.seqs):
            continue
        kept_pts.add(z)
    if kept_pts:
        prims.append(Points(frozenset(kept_pts)))
    for sp in base.seqs:
        prims.extend(_seq_minus_countable(sp, countable_b))
    punct = EMPTY
    if base.groups:
        for center, ivs in base.groups:
            for iv in ivs:
                prims.append(_interval_primitive(center, iv))
        punct = countable_b
    return region(prims), punct


def _seq_minus_countable(sp: SeqPoints, countable: Region):
    """Members of sp outside a countable region, as primitives."""
    out_seq = sp.with_excluded(countable.pts)
    pieces = [out_seq]
    for bs in countable.seqs:
        next_pieces = []
        for piece in pieces:
            if not isinstance(piece, SeqPoints):
                next_pieces.append(piece)
                continue
            if bs.offset != piece.offset:
                fin = _offset_separated_overlap(piece, bs)
                next_pieces.append(piece.with_excluded(fin))
                continue
            res = _same_limit_intersection(piece, bs)
            if res is None:
                raise IncomparableSequences(
                    f"incomparable-sequences: {piece.tag} minus {bs.tag}"
                )
            fin, infinite = res
            cur = piece.with_excluded(fin)
            for inf_piece in infinite:
                survivors = _subtract_subfamily(cur, inf_piece)
                if survivors is None:
                    raise IncomparableSequences(
                        f"incomparable-sequences: {piece.tag} minus {bs.tag}"
                    )
                cur = None
                next_pieces.extend(survivors)
                break
            if cur is not None:
                next_pieces.append(cur)
        pieces = next_pieces
    return pieces


def _subtract_subfamily(piece: SeqPoints, sub: SeqPoints):
    """piece minus sub when sub's family-level member set contains
    piece's (then only sub.excluded members survive), or when the two
    family-level sets coincide.  None when not representable."""
    ok, _ = _seq_canonical_subset(piece, sub)
    if ok:
        survivors = {
            e
            for e in sub.excluded
            if piece.member_index(e) is not None and e not in piece.excluded
        }
        return [Points(frozenset(survivors))] if survivors else []
    return None


def countable_part(r: Region) -> Region:
    return Region(r.pts, r.seqs, ())


def countable_meets_groups(countable: Region, target: Region) -> bool:
    """Any point or sequence member of `countable` inside the continuum
    part of `target`?"""
    for z in countable.pts:
        if _group_contains(target.groups, z):
            return True
    cont_only = Region(frozenset(), (), target.groups)
    for sp in countable.seqs:
        if _seq_restrict_continuum_only(sp, cont_only):
            return True
    return False


# ---------------------------------------------------------------------------
# convenience constructors


def points(*zs) -> Region:
    return region([Points(frozenset(QQi.of(z) if not isinstance(z, QQi) else z
                                    for z in zs))])


def seq_harmonic(coeff=1, offset=0, excluded=()) -> Region:
    sp = SeqPoints(
        "harmonic", None, _as_qqi(coeff), _as_qqi(offset),
        frozenset(_as_qqi(z) for z in excluded),
    )
    return region([sp])


def seq_geometric(ratio, coeff=1, offset=0, excluded=()) -> Region:
    sp = SeqPoints(
        "geom", Fraction(ratio), _as_qqi(coeff), _as_qqi(offset),
        frozenset(_as_qqi(z) for z in excluded),
    )
    return region([sp])


def circle(center, r2) -> Region:
    return region([Circle(_as_qqi(center), Radius(Fraction(r2)))])


def closed_disc(center, r2) -> Region:
    return region([Disc(_as_qqi(center), Radius(Fraction(r2)), True)])


def open_disc(center, r2) -> Region:
    return region([Disc(_as_qqi(center), Radius(Fraction(r2)), False)])


def closed_annulus(center, lo2, hi2) -> Region:
    return region(
        [Annulus(_as_qqi(center), Radius(Fraction(lo2)), Radius(Fraction(hi2)))]
    )


def _as_qqi(v) -> QQi:
    return v if isinstance(v, QQi) else QQi.of(v)


# ---------------------------------------------------------------------------
# JSON


def region_to_json(r: Region) -> list:
    out = []
    for p in r.primitives():
        if isinstance(p, Points):
            out.append(
                {
                    "kind": "points",
                    "points": [
                        qqi_to_json(z)
                        for z in sorted(p.points, key=QQi.sort_key)
                    ],
                }
            )
        elif isinstance(p, SeqPoints):
            item = {
                "kind": "seq",
                "family": p.family,
                "coeff": qqi_to_json(p.coeff),
                "offset": qqi_to_json(p.offset),
                "limits": [qqi_to_json(p.limit)],
                "excluded": [
                    qqi_to_json(z) for z in sorted(p.excluded, key=QQi.sort_key)
                ],
                "tag": p.tag,
            }
            if p.family == "geom":
                item["ratio"] = format_fraction(p.ratio)
            out.append(item)
        elif isinstance(p, Circle):
            out.append(
                {
                    "kind": "circle",
                    "center": qqi_to_json(p.center),
                    "r2": format_fraction(p.r.square),
                }
            )
        elif isinstance(p, Disc):
            out.append(
                {
                    "kind": "disc" if p.closed else "open-disc",
                    "center": qqi_to_json(p.center),
                    "r2": format_fraction(p.r.square),
                }
            )
        elif isinstance(p, Annulus):
            out.append(
                {
                    "kind": "annulus",
                    "center": qqi_to_json(p.center),
                    "r2_inner": format_fraction(p.r_inner.square),
                    "r2_outer": format_fraction(p.r_outer.square),
                    "closed_inner": p.closed_inner,
                    "closed_outer": p.closed_outer,
                }
            )
    return out


def region_from_json(items) -> Region:
    prims = []
    for item in items:
        kind = item["kind"]
        if kind == "points":
            prims.append(
                Points(frozenset(qqi_from_json(z) for z in item["points"]))
            )
        elif kind == "seq":
            prims.append(
                SeqPoints(
                    item["family"],
                    Fraction(item["ratio"]) if item["family"] == "geom" else None,
                    qqi_from_json(item["coeff"]),
                    qqi_from_json(item["offset"]),
                    frozenset(qqi_from_json(z) for z in item.get("excluded", [])),
                )
            )
        elif kind == "circle":
            prims.append(
                Circle(qqi_from_json(item["center"]), Radius(Fraction(item["r2"])))
            )
        elif kind in ("disc", "open-disc"):
            prims.append(
                Disc(
                    qqi_from_json(item["center"]),
                    Radius(Fraction(item["r2"])),
                    kind == "disc",
                )
            )
        elif kind == "annulus":
            prims.append(
                Annulus(
                    qqi_from_json(item["center"]),
                    Radius(Fraction(item["r2_inner"])),
                    Radius(Fraction(item["r2_outer"])),
                    item.get("closed_inner", True),
                    item.get("closed_outer", True),
                )
            )
        else:
            raise ValueError(f"unknown region primitive kind {kind!r}")
    return region(prims)
