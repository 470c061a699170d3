"""Machine-checkable Browder-type theorems.

Each theorem is a family of statements proved equivalent; check()
evaluates every side exactly on one operator instance and reports
whether the truth values agree as the theorem requires.  A single
INCONSISTENT verdict is an engine bug, never a counterexample.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import regions as rg
from .errors import OpspectraError, UncomputableSpectrum
from .model import AdjOp, instance_library
from .spectra import spectrum

THEOREM_IDS = (
    "browder",
    "gen_browder",
    "a_browder",
    "gen_a_browder",
    "prop_gdmj",
    "prop_gdmq",
    "cor_gdm",
    "thm_gdm_or",
    "thm_equiv_parts",
    "chain_browder_11",
    "chain_abrowder_6",
    "lemma_uf_ub",
    "thm_usbf_4way",
    "thm_lsbf_4way",
    "cor_f_b_10way",
)


@dataclass(frozen=True)
class TheoremReport:
    theorem: str
    instance: str
    sides: tuple            # ((label, bool), ...)
    verdict: str            # "consistent" | "INCONSISTENT"
    groups: tuple = ()      # index groups that must each be internally equal

    @property
    def consistent(self) -> bool:
        return self.verdict == "consistent"

    def to_json(self) -> dict:
        return {
            "theorem": self.theorem,
            "instance": self.instance,
            "sides": [{"label": l, "value": v} for l, v in self.sides],
            "verdict": self.verdict,
        }


def _sp(e, name, instance):
    try:
        return spectrum(e, name)
    except OpspectraError as exc:
        raise UncomputableSpectrum(name, instance, exc) from exc


def _eq(e, a, b, instance):
    return rg.equal(_sp(e, a, instance), _sp(e, b, instance))


def _svep_subset(e, which, name, instance):
    """"T (resp. T*) has SVEP at every lam outside sigma_name":
    the failure set must sit inside the spectrum."""
    return rg.subset(_sp(e, which, instance), _sp(e, name, instance))


def _svep_union_subset(e, name, instance):
    """T and T* both have SVEP off sigma_name."""
    fails = rg.union(
        _sp(e, "svep_fail", instance), _sp(e, "svep_adj_fail", instance)
    )
    return rg.subset(fails, _sp(e, name, instance))


def _sides_for(tid: str, e, instance: str):
    """Returns (sides, groups): groups are tuples of side indices that
    must carry identical truth values."""
    if tid == "browder":
        sides = [
            ("sigma_b == sigma_w", _eq(e, "b", "w", instance)),
            ("SVEP off sigma_w", _svep_subset(e, "svep_fail", "w", instance)),
        ]
        return sides, (tuple(range(len(sides))),)
    if tid == "gen_browder":
        sides = [
            ("sigma_bb == sigma_bw", _eq(e, "bb", "bw", instance)),
            ("SVEP off sigma_bw", _svep_subset(e, "svep_fail", "bw", instance)),
        ]
        return sides, (tuple(range(len(sides))),)
    if tid == "a_browder":
        sides = [
            ("sigma_ub == sigma_uw", _eq(e, "ub", "uw", instance)),
            ("SVEP off sigma_uw", _svep_subset(e, "svep_fail", "uw", instance)),
        ]
        return sides, (tuple(range(len(sides))),)
    if tid == "gen_a_browder":
        sides = [
            ("sigma_usbb == sigma_usbw", _eq(e, "usbb", "usbw", instance)),
            ("SVEP off sigma_usbw",
             _svep_subset(e, "svep_fail", "usbw", instance)),
            ("sigma_ub == sigma_uw", _eq(e, "ub", "uw", instance)),
        ]
        return sides, (tuple(range(len(sides))),)
    if tid == "prop_gdmj":
        sides = [
            ("sigma_gDMJ == sigma_gDMW_p", _eq(e, "gDMJ", "gDMW_p", instance)),
            ("SVEP off sigma_gDMW_p",
             _svep_subset(e, "svep_fail", "gDMW_p", instance)),
        ]
        return sides, (tuple(range(len(sides))),)
    if tid == "prop_gdmq":
        sides = [
            ("sigma_gDMQ == sigma_gDMW_m", _eq(e, "gDMQ", "gDMW_m", instance)),
            ("adjoint SVEP off sigma_gDMW_m",
             _svep_subset(e, "svep_adj_fail", "gDMW_m", instance)),
        ]
        return sides, (tuple(range(len(sides))),)
    if tid == "cor_gdm":
        sides = [
            ("sigma_gDM == sigma_gDMW", _eq(e, "gDM", "gDMW", instance)),
            ("both SVEP off sigma_gDMW",
             _svep_union_subset(e, "gDMW", instance)),
        ]
        return sides, (tuple(range(len(sides))),)
    if tid == "thm_gdm_or":
        sides = [
            ("sigma_gDM == sigma_gDMW", _eq(e, "gDM", "gDMW", instance)),
            ("T or T* SVEP off sigma_gDMW",
             _svep_subset(e, "svep_both_fail", "gDMW", instance)),
        ]
        return sides, (tuple(range(len(sides))),)
    if tid == "thm_equiv_parts":
        sides = [
            ("gen a-Browder for T", _eq(e, "usbb", "usbw", instance)),
            ("sigma_gDMJ == sigma_gDMW_p", _eq(e, "gDMJ", "gDMW_p", instance)),
            ("gen a-Browder for T*", _eq(e, "lsbb", "lsbw", instance)),
            ("sigma_gDMQ == sigma_gDMW_m", _eq(e, "gDMQ", "gDMW_m", instance)),
            ("gen Browder for T", _eq(e, "bb", "bw", instance)),
            ("sigma_gDM == sigma_gDMW", _eq(e, "gDM", "gDMW", instance)),
        ]
        return sides, ((0, 1), (2, 3), (4, 5))
    if tid == "chain_browder_11":
        adj = AdjOp(e)
        sides = [
            ("(i) Browder for T", _eq(e, "b", "w", instance)),
            ("(ii) Browder for T*", _eq(adj, "b", "w", instance)),
            ("(iii) SVEP off sigma_w",
             _svep_subset(e, "svep_fail", "w", instance)),
            ("(iv) adjoint SVEP off sigma_w",
             _svep_subset(e, "svep_adj_fail", "w", instance)),
            ("(v) SVEP off sigma_bw",
             _svep_subset(e, "svep_fail", "bw", instance)),
            ("(vi) gen Browder for T", _eq(e, "bb", "bw", instance)),
            ("(vii) T or T* SVEP off sigma_gDRW",
             _svep_subset(e, "svep_both_fail", "gDRW", instance)),
            ("(viii) sigma_gDR == sigma_gDRW", _eq(e, "gDR", "gDRW", instance)),
            ("(ix) T or T* SVEP off sigma_gDMW",
             _svep_subset(e, "svep_both_fail", "gDMW", instance)),
            ("(x) sigma_gDM == sigma_gDMW", _eq(e, "gDM", "gDMW", instance)),
            ("(xi) sigma_gD == sigma_pBw", _eq(e, "gD", "pBw", instance)),
        ]
        return sides, (tuple(range(len(sides))),)
    if tid == "chain_abrowder_6":
        sides = [
            ("(i) a-Browder", _eq(e, "ub", "uw", instance)),
            ("(ii) gen a-Browder", _eq(e, "usbb", "usbw", instance)),
            ("(iii) SVEP off sigma_gDRW_p",
             _svep_subset(e, "svep_fail", "gDRW_p", instance)),
            ("(iv) sigma_gDRJ == sigma_gDRW_p",
             _eq(e, "gDRJ", "gDRW_p", instance)),
            ("(v) SVEP off sigma_gDMW_p",
             _svep_subset(e, "svep_fail", "gDMW_p", instance)),
            ("(vi) sigma_gDMJ == sigma_gDMW_p",
             _eq(e, "gDMJ", "gDMW_p", instance)),
        ]
        return sides, (tuple(range(len(sides))),)
    if tid == "lemma_uf_ub":
        sides = [
            ("sigma_uf == sigma_ub", _eq(e, "uf", "ub", instance)),
            ("sigma_usbf == sigma_usbb", _eq(e, "usbf", "usbb", instance)),
            ("sigma_lf == sigma_lb", _eq(e, "lf", "lb", instance)),
            ("sigma_lsbf == sigma_lsbb", _eq(e, "lsbf", "lsbb", instance)),
        ]
        return sides, ((0, 1), (2, 3))
    if tid == "thm_usbf_4way":
        sides = [
            ("(i) sigma_usbf == sigma_usbb", _eq(e, "usbf", "usbb", instance)),
            ("(ii) SVEP off sigma_usbf",
             _svep_subset(e, "svep_fail", "usbf", instance)),
            ("(iii) SVEP off sigma_gDMphi_p",
             _svep_subset(e, "svep_fail", "gDMphi_p", instance)),
            ("(iv) sigma_gDMJ == sigma_gDMphi_p",
             _eq(e, "gDMJ", "gDMphi_p", instance)),
        ]
        return sides, (tuple(range(len(sides))),)
    if tid == "thm_lsbf_4way":
        sides = [
            ("(i) sigma_lsbf == sigma_lsbb", _eq(e, "lsbf", "lsbb", instance)),
            ("(ii) adjoint SVEP off sigma_lsbf",
             _svep_subset(e, "svep_adj_fail", "lsbf", instance)),
            ("(iii) adjoint SVEP off sigma_gDMphi_m",
             _svep_subset(e, "svep_adj_fail", "gDMphi_m", instance)),
            ("(iv) sigma_gDMQ == sigma_gDMphi_m",
             _eq(e, "gDMQ", "gDMphi_m", instance)),
        ]
        return sides, (tuple(range(len(sides))),)
    if tid == "cor_f_b_10way":
        sides = [
            ("(i) sigma_f == sigma_b", _eq(e, "f", "b", instance)),
            ("(ii) both SVEP off sigma_f",
             _svep_union_subset(e, "f", instance)),
            ("(iii) sigma_bf == sigma_bb", _eq(e, "bf", "bb", instance)),
            ("(iv) both SVEP off sigma_bf",
             _svep_union_subset(e, "bf", instance)),
            ("(v) sigma_gD == sigma_pBf", _eq(e, "gD", "pBf", instance)),
            ("(vi) both SVEP off sigma_pBf",
             _svep_union_subset(e, "pBf", instance)),
            ("(vii) sigma_gDR == sigma_gDRphi",
             _eq(e, "gDR", "gDRphi", instance)),
            ("(viii) both SVEP off sigma_gDRphi",
             _svep_union_subset(e, "gDRphi", instance)),
            ("(ix) sigma_gDM == sigma_gDMphi",
             _eq(e, "gDM", "gDMphi", instance)),
            ("(x) both SVEP off sigma_gDMphi",
             _svep_union_subset(e, "gDMphi", instance)),
        ]
        return sides, (tuple(range(len(sides))),)
    raise ValueError(f"unknown theorem id {tid!r}")


def check(tid: str, e, instance: str = "<anonymous>") -> TheoremReport:
    """Evaluate one theorem on one instance."""
    sides, groups = _sides_for(tid, e, instance)
    ok = all(
        len({sides[i][1] for i in group}) == 1 for group in groups
    )
    return TheoremReport(
        theorem=tid,
        instance=instance,
        sides=tuple(sides),
        verdict="consistent" if ok else "INCONSISTENT",
        groups=groups,
    )


def sweep(ids=None, instances=None) -> list:
    """Run theorem ids over the instance library (or a custom list of
    (name, expr) pairs); reports in library order."""
    ids = list(ids) if ids else list(THEOREM_IDS)
    instances = list(instances) if instances is not None else instance_library()
    reports = []
    for name, e in instances:
        for tid in ids:
            reports.append(check(tid, e, name))
    return reports
