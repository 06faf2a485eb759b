"""Sufficient conditions for an energy minimum, per branch and per k.

All three predicates use strict inequalities; a boundary case counts as
"not a minimum". Only the sign of ``n_c - n_v`` enters.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .band import BandSample, Branch, ChainParams, OccupationState, band_sample
from .errors import DomainError, IndeterminatePopulationError, SSHRabiError


@dataclass(frozen=True)
class ConditionReport:
    k: float
    branch: Branch
    cond1: bool
    cond2: bool
    cond3: bool
    population_sign: int
    error: str | None = None

    @property
    def all_satisfied(self) -> bool:
        return self.error is None and self.cond1 and self.cond2 and self.cond3


def _population_sign(occ: OccupationState) -> int:
    diff = occ.imbalance
    if diff == 0:
        raise IndeterminatePopulationError(
            f"n_c == n_v == {occ.n_c!r}: conditions require a population imbalance")
    return 1 if diff > 0 else -1


def _scalar_sample(sample: BandSample):
    eps, gap, E = (np.asarray(v, dtype=float) for v in (sample.eps, sample.gap, sample.E))
    if np.any(E <= 0):
        raise DomainError("conditions require E_k > 0")
    return eps, gap, E


def condition_first(sample: BandSample, occ: OccupationState):
    sign = _population_sign(occ)
    eps, gap, E = _scalar_sample(sample)
    factor = 1.0 - eps / E if sample.branch is Branch.SSH else 1.0 + eps / E
    lhs = eps * factor
    rhs = gap**2 / E
    result = lhs < rhs if sign < 0 else lhs > rhs
    return bool(result) if np.ndim(result) == 0 else result


def condition_second(sample: BandSample):
    eps, gap, E = _scalar_sample(sample)
    value = (eps**2 / E - 2.0 * gap**2 / E) ** 2 - E**2 + 0.75 * gap**2
    result = value > 0
    return bool(result) if np.ndim(result) == 0 else result


def condition_third(sample: BandSample, occ: OccupationState):
    sign = _population_sign(occ)
    eps, gap, E = _scalar_sample(sample)
    if sample.branch is Branch.SSH:
        prefactor = 3.0 * gap**2 / E + 4.0 * eps**2 / E
    else:
        prefactor = 3.0 * gap**2 / E - 4.0 * eps**2 / E
    result = prefactor * sign > 0
    return bool(result) if np.ndim(result) == 0 else result


OccupationProfile = OccupationState | Sequence[OccupationState] | Callable[[float], OccupationState]


def _occupation_at(profile, index: int, k: float) -> OccupationState:
    if isinstance(profile, OccupationState):
        return profile
    if callable(profile):
        return profile(k)
    return profile[index]


def stability_scan(p: ChainParams, occ_profile: OccupationProfile, branch: Branch | str,
                   grid: Iterable[float]) -> list[ConditionReport]:
    """Evaluate the three conditions at every grid point, sorted by k.

    ``occ_profile`` may be a single :class:`OccupationState`, a sequence
    aligned with ``grid`` or a callable ``k -> OccupationState``. Errors at
    individual points are recorded in the report instead of aborting.
    """
    branch = Branch.parse(branch)
    grid = np.asarray(list(grid), dtype=float)
    if np.any(np.abs(grid) > p.zone_edge * (1 + 1e-12)):
        raise DomainError("scan grid leaves the reduced zone")
    order = np.argsort(grid, kind="stable")
    reports = []
    for index in order:
        k = float(grid[index])
        occ = _occupation_at(occ_profile, int(index), k)
        diff = occ.imbalance
        pop_sign = int(np.sign(diff))
        try:
            sample = band_sample(p, k, branch)
            reports.append(ConditionReport(
                k=k, branch=branch,
                cond1=condition_first(sample, occ),
                cond2=condition_second(sample),
                cond3=condition_third(sample, occ),
                population_sign=pop_sign))
        except SSHRabiError as exc:
            reports.append(ConditionReport(k=k, branch=branch, cond1=False, cond2=False,
                                           cond3=False, population_sign=pop_sign,
                                           error=f"{type(exc).__name__}: {exc}"))
    return reports


def all_k_satisfied(reports: Sequence[ConditionReport]) -> bool:
    return bool(reports) and all(r.all_satisfied for r in reports)


SCAN_COLUMNS = ("k_per_angstrom", "branch", "cond1", "cond2", "cond3", "all_satisfied")


def scan_to_csv(reports: Sequence[ConditionReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SCAN_COLUMNS)
    for r in reports:
        writer.writerow([repr(r.k), r.branch.value, int(r.cond1), int(r.cond2), int(r.cond3),
                         int(r.all_satisfied)])
    return buf.getvalue()


def scan_to_records(reports: Sequence[ConditionReport]) -> list[dict]:
    return [{"k_per_angstrom": r.k, "branch": r.branch.value, "cond1": r.cond1,
             "cond2": r.cond2, "cond3": r.cond3, "all_satisfied": r.all_satisfied,
             "population_sign": r.population_sign, "error": r.error} for r in reports]
