"""Derivation of every named spectrum from a spectral picture.

Predicate spectra collect the cells whose classification fails the
membership class; the generalized Drazin-type spectra add accumulation
conditions on base spectra.  Everything is exact region arithmetic.
"""

from __future__ import annotations

from .errors import OpspectraError
from .model import (
    Cell,
    Classification,
    ExtNat,
    INF,
    SpectralPicture,
    picture,
)
from . import regions as rg
from .regions import Region

# closed vocabulary of spectrum names
PREDICATE_NAMES = (
    "sigma", "ap", "su",
    "uf", "lf", "f", "uw", "lw", "w", "ub", "lb", "b",
    "usbf", "lsbf", "bf", "usbw", "lsbw", "bw", "usbb", "lsbb", "bb",
    "gK", "gKR", "gKM",
    "svep_fail", "svep_adj_fail", "svep_both_fail",
)

TOPOLOGICAL_NAMES = (
    "gD", "pBf", "pBw",
    "gDR", "gDRJ", "gDRQ", "gDRphi_p", "gDRphi_m", "gDRphi",
    "gDRW_p", "gDRW_m", "gDRW",
    "gDM", "gDMJ", "gDMQ", "gDMphi_p", "gDMphi_m", "gDMphi",
    "gDMW_p", "gDMW_m", "gDMW",
)

SPECTRUM_NAMES = PREDICATE_NAMES + TOPOLOGICAL_NAMES


def _ind_leq_zero(alpha: ExtNat, beta: ExtNat) -> bool:
    """Index alpha - beta <= 0 with the semi-Fredholm conventions."""
    if alpha.is_finite and beta.is_finite:
        return alpha.v <= beta.v
    return not beta.is_finite   # beta infinite: index -inf-ish <= 0


def _ind_geq_zero(alpha: ExtNat, beta: ExtNat) -> bool:
    if alpha.is_finite and beta.is_finite:
        return alpha.v >= beta.v
    return not alpha.is_finite


def _ind_zero(alpha: ExtNat, beta: ExtNat) -> bool:
    return alpha.is_finite and beta.is_finite and alpha.v == beta.v


def _passes(c: Classification, name: str) -> bool:
    """Does the point class at this cell belong to the named class
    (i.e. lie OUTSIDE the named spectrum)?"""
    if name == "sigma":
        return c.alpha == 0 and c.beta == 0
    if name == "ap":     # bounded below
        return c.alpha == 0 and c.range_closed
    if name == "su":     # surjective
        return c.beta == 0
    if name == "uf":
        return c.alpha.is_finite and c.range_closed
    if name == "lf":
        return c.beta.is_finite
    if name == "f":
        return c.alpha.is_finite and c.beta.is_finite and c.range_closed
    if name == "uw":
        return _passes(c, "uf") and _ind_leq_zero(c.alpha, c.beta)
    if name == "lw":
        return _passes(c, "lf") and _ind_geq_zero(c.alpha, c.beta)
    if name == "w":
        return _passes(c, "f") and _ind_zero(c.alpha, c.beta)
    if name == "ub":
        return _passes(c, "uf") and c.ascent.is_finite
    if name == "lb":
        return _passes(c, "lf") and c.descent.is_finite
    if name == "b":
        return (
            _passes(c, "f") and c.ascent.is_finite and c.descent.is_finite
        )
    if name == "usbf":
        return c.alpha_ev.is_finite and c.powers_range_closed
    if name == "lsbf":
        return c.beta_ev.is_finite and c.powers_range_closed
    if name == "bf":
        return _passes(c, "usbf") and _passes(c, "lsbf")
    if name == "usbw":
        return _passes(c, "usbf") and _ind_leq_zero(c.alpha_ev, c.beta_ev)
    if name == "lsbw":
        return _passes(c, "lsbf") and _ind_geq_zero(c.alpha_ev, c.beta_ev)
    if name == "bw":
        return _passes(c, "bf") and _ind_zero(c.alpha_ev, c.beta_ev)
    if name == "usbb":   # left Drazin invertible
        return c.ascent.is_finite and c.powers_range_closed
    if name == "lsbb":   # right Drazin invertible
        return c.descent.is_finite and c.powers_range_closed
    if name == "bb":     # Drazin invertible
        return c.ascent.is_finite and c.descent.is_finite
    if name == "gK":
        return c.admits_gkd
    if name == "gKR":
        return c.admits_gkrd
    if name == "gKM":
        return c.admits_gkmd
    if name == "svep_fail":
        return c.svep
    if name == "svep_adj_fail":
        return c.svep_adj
    if name == "svep_both_fail":
        return c.svep or c.svep_adj
    raise ValueError(f"unknown spectrum name {name!r}")


# generalized Drazin-type spectra: admissibility flag plus the
# accumulation of a base spectrum
_GD_TABLE = {
    "pBf": ("gK", "bf"),
    "pBw": ("gK", "bw"),
    "gDR": ("gKR", "bb"),
    "gDRJ": ("gKR", "usbb"),
    "gDRQ": ("gKR", "lsbb"),
    "gDRphi_p": ("gKR", "usbf"),
    "gDRphi_m": ("gKR", "lsbf"),
    "gDRW_p": ("gKR", "usbw"),
    "gDRW_m": ("gKR", "lsbw"),
    "gDRW": ("gKR", "bw"),
    "gDM": ("gKM", "bb"),
    "gDMJ": ("gKM", "usbb"),
    "gDMQ": ("gKM", "lsbb"),
    "gDMphi_p": ("gKM", "usbf"),
    "gDMphi_m": ("gKM", "lsbf"),
    "gDMW_p": ("gKM", "usbw"),
    "gDMW_m": ("gKM", "lsbw"),
    "gDMW": ("gKM", "bw"),
}


def _failure_region(pic: SpectralPicture, name: str) -> Region:
    """Union of the cells whose classification fails the class;
    passing countable cells punched out of failing continuum cells would
    break closedness and indicate an engine bug."""
    failing = []
    passing_countable = []
    for cell in pic.cells:
        if _passes(cell.klass, name):
            if cell.support.is_countable:
                passing_countable.append(cell)
        else:
            failing.append(cell)
    out = rg.union_all([c.support for c in failing]) if failing else rg.EMPTY
    for cell in passing_countable:
        if rg.countable_meets_groups(cell.support, out):
            raise AssertionError(
                f"spectrum {name}: passing countable cell inside a failing"
                " continuum cell; the failure set is not representable"
            )
    return out


_SPECTRUM_CACHE: dict = {}


def spectrum(e, name: str) -> Region:
    """The named spectrum of the expression, as an exact region."""
    if name not in SPECTRUM_NAMES and name != "gD":
        raise ValueError(f"unknown spectrum name {name!r}")
    key = (_expr_key(e), name)
    if key in _SPECTRUM_CACHE:
        return _SPECTRUM_CACHE[key]
    result = _spectrum_uncached(e, name)
    _SPECTRUM_CACHE[key] = result
    return result


def _expr_key(e):
    return e


def _spectrum_uncached(e, name: str) -> Region:
    pic = picture(e)
    if name in PREDICATE_NAMES:
        return _failure_region(pic, name)
    if name == "gD":
        return rg.acc(_failure_region(pic, "sigma"))
    if name in _GD_TABLE:
        flag, base = _GD_TABLE[name]
        return rg.union(
            _failure_region(pic, flag), rg.acc(_failure_region(pic, base))
        )
    if name == "gDRphi":
        return rg.union(spectrum(e, "gDRphi_p"), spectrum(e, "gDRphi_m"))
    if name == "gDMphi":
        return rg.union(spectrum(e, "gDMphi_p"), spectrum(e, "gDMphi_m"))
    raise ValueError(f"unknown spectrum name {name!r}")


def gdr_browder_variant(e, name: str) -> Region:
    """The alternative gDR-family reading with Browder-type base spectra
    (accumulation over ub/lb/b instead of the B-Browder chain); computed
    for comparison only."""
    base_map = {
        "gDR": "b", "gDRJ": "ub", "gDRQ": "lb",
        "gDRW_p": "uw", "gDRW_m": "lw", "gDRW": "w",
        "gDRphi_p": "uf", "gDRphi_m": "lf",
    }
    if name not in base_map:
        raise ValueError(f"no Browder-type variant for {name!r}")
    pic = picture(e)
    return rg.union(
        _failure_region(pic, "gKR"),
        rg.acc(_failure_region(pic, base_map[name])),
    )


# ---------------------------------------------------------------------------
# inclusion chains


def _gd_rows(star: str):
    g = "gDR" if star == "R" else "gDM"
    k = "gKR" if star == "R" else "gKM"
    return [
        (k, f"{g}phi_p", f"{g}W_p", f"{g}J"),
        (k, f"{g}phi_m", f"{g}W_m", f"{g}Q"),
        (k, f"{g}phi", f"{g}W", g),
    ]


INCLUSION_CHAINS = (
    [("uf", "uw", "ub", "sigma"), ("lf", "lw", "lb", "sigma"),
     ("f", "w", "b", "sigma")]
    + [("usbf", "usbw", "usbb", "ub"), ("lsbf", "lsbw", "lsbb", "lb"),
       ("bf", "bw", "bb", "b")]
    + _gd_rows("R")
    + _gd_rows("M")
    + [
        ("gKM", "gKR", "gK"),
        ("gDM", "gDR", "gD", "bb"),
        ("usbf", "uf"), ("lsbf", "lf"), ("bf", "f"),
        ("usbw", "uw"), ("lsbw", "lw"), ("bw", "w"),
        ("usbb", "ub"), ("lsbb", "lb"), ("bb", "b"),
        ("gK", "usbf"), ("gK", "lsbf"),
        ("pBf", "bf"), ("pBw", "bw"),
        ("gDMW", "gDRW", "pBw"),
        ("gDMphi_p", "gDRphi_p"), ("gDMJ", "gDRJ"),
        ("gD", "sigma"),
    ]
)


def inclusion_audit(e) -> list:
    """Check every inclusion chain; returns [{'chain': 'a ⊆ b ⊆ …',
    'holds': bool}, ...]."""
    out = []
    for chain in INCLUSION_CHAINS:
        holds = True
        for small, big in zip(chain, chain[1:]):
            if not rg.subset(spectrum(e, small), spectrum(e, big)):
                holds = False
                break
        out.append({"chain": " <= ".join(chain), "holds": holds})
    return out


def spectrum_to_json(r: Region) -> list:
    return rg.region_to_json(r)


def clear_spectrum_cache():
    _SPECTRUM_CACHE.clear()
