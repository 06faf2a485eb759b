"""Raman peak tables and the regularity checks run against them.

Peak positions come from a plain-text fixture (``data/raman_peaks.txt``)
whose schema is documented in the file header. Everything here is
arithmetic on tabulated positions; there is no raw-spectrum fitting.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import asdict, dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from importlib import resources
from pathlib import Path
from typing import Sequence

from scipy import constants

from .errors import DomainError, FixtureParseError

FIXTURE_SHA256 = "6042194933152d8d4317264fda3b01f1dbca973f11ee6c55b0486b656a555dd0"


@dataclass(frozen=True)
class Peak:
    position: float
    uncertainty: float
    label: str = ""


@dataclass(frozen=True)
class BroadLine:
    center: float
    center_uncertainty: float
    width: float
    width_uncertainty: float


@dataclass(frozen=True)
class PeakTable:
    sample_id: str
    peaks: tuple[Peak, ...] = ()
    broad_line: BroadLine | None = None
    diamond: Peak | None = None

    def __post_init__(self):
        positions = [p.position for p in self.peaks]
        if any(b <= a for a, b in zip(positions, positions[1:])):
            raise DomainError(f"{self.sample_id}: peak positions must be strictly increasing")
        if any(p.uncertainty <= 0 for p in self.peaks):
            raise DomainError(f"{self.sample_id}: peak uncertainties must be positive")

    @property
    def positions(self) -> list[float]:
        return [p.position for p in self.peaks]

    def index_of(self, position: float) -> int:
        for i, p in enumerate(self.peaks):
            if p.position == position:
                return i
        raise KeyError(f"{self.sample_id}: no peak at {position}")


def default_fixture_path() -> Path:
    return Path(str(resources.files("ssh_rabi").joinpath("data", "raman_peaks.txt")))


def fixture_checksum(path: str | Path | None = None) -> str:
    data = Path(path or default_fixture_path()).read_bytes()
    return hashlib.sha256(data).hexdigest()


def _number(token: str, line: int, name: str) -> float:
    try:
        value = float(token)
    except ValueError:
        raise FixtureParseError(f"expected a number, got {token!r}", line=line, field=name) from None
    if not math.isfinite(value):
        raise FixtureParseError("value must be finite", line=line, field=name)
    return value


def parse_fixtures(text: str) -> list[PeakTable]:
    tables: list[PeakTable] = []
    current: dict | None = None

    def close():
        if current is not None:
            try:
                tables.append(PeakTable(current["id"], tuple(current["peaks"]),
                                        current["broad"], current["diamond"]))
            except DomainError as exc:
                raise FixtureParseError(str(exc), line=current["line"]) from None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        keyword, *rest = line.split()
        if keyword == "sample":
            if len(rest) != 1:
                raise FixtureParseError("'sample' takes exactly one identifier", line=lineno,
                                        field="sample_id")
            close()
            current = {"id": rest[0], "peaks": [], "broad": None, "diamond": None, "line": lineno}
            continue
        if current is None:
            raise FixtureParseError(f"{keyword!r} record before any 'sample' line", line=lineno)
        if keyword == "peak":
            if len(rest) < 2:
                raise FixtureParseError("'peak' needs position and uncertainty", line=lineno)
            pos = _number(rest[0], lineno, "position")
            unc = _number(rest[1], lineno, "uncertainty")
            if unc <= 0:
                raise FixtureParseError("uncertainty must be positive", line=lineno,
                                        field="uncertainty")
            current["peaks"].append(Peak(pos, unc, " ".join(rest[2:])))
        elif keyword == "broad":
            if len(rest) != 4:
                raise FixtureParseError("'broad' needs center, center uncertainty, width, "
                                        "width uncertainty", line=lineno)
            names = ("center", "center_uncertainty", "width", "width_uncertainty")
            current["broad"] = BroadLine(*(_number(t, lineno, n) for t, n in zip(rest, names)))
        elif keyword == "diamond":
            if len(rest) not in (1, 2):
                raise FixtureParseError("'diamond' needs position and optional uncertainty",
                                        line=lineno)
            pos = _number(rest[0], lineno, "position")
            unc = _number(rest[1], lineno, "uncertainty") if len(rest) == 2 else math.nan
            current["diamond"] = Peak(pos, unc, "diamond")
        else:
            raise FixtureParseError(f"unknown record type {keyword!r}", line=lineno, field="record")
    close()
    return tables


def load_fixtures(source: str | Path | None = None) -> list[PeakTable]:
    """Read peak tables from ``source`` (default: the shipped fixture)."""
    path = Path(source) if source is not None else default_fixture_path()
    return parse_fixtures(path.read_text(encoding="utf-8"))


def tables_by_id(tables: Sequence[PeakTable]) -> dict[str, PeakTable]:
    return {t.sample_id: t for t in tables}


Pairing = Sequence[tuple[int, int]]


def _pairs(a: PeakTable, b: PeakTable, pairing: Pairing):
    out = []
    for i, j in pairing:
        if not (0 <= i < len(a.peaks) and 0 <= j < len(b.peaks)):
            raise DomainError(f"pairing ({i}, {j}) out of range for {a.sample_id}/{b.sample_id}")
        out.append((a.peaks[i], b.peaks[j]))
    return out


def peak_shifts(a: PeakTable, b: PeakTable, pairing: Pairing) -> list[tuple[float, float]]:
    """Differences a - b with root-sum-square uncertainties."""
    return [(pa.position - pb.position, math.hypot(pa.uncertainty, pb.uncertainty))
            for pa, pb in _pairs(a, b, pairing)]


def shifts_increase(shifts: Sequence[tuple[float, float]]) -> bool:
    values = [s for s, _ in shifts]
    return all(y > x for x, y in zip(values, values[1:]))


def peak_ratios(a: PeakTable, b: PeakTable, pairing: Pairing) -> list[tuple[float, float]]:
    """Ratios a / b with first-order propagated uncertainties."""
    out = []
    for pa, pb in _pairs(a, b, pairing):
        if pb.position == 0:
            raise DomainError("zero denominator in peak ratio")
        r = pa.position / pb.position
        out.append((r, abs(r) * math.hypot(pa.uncertainty / pa.position,
                                           pb.uncertainty / pb.position)))
    return out


def afeswr_splittings(table: PeakTable, main_mode_index: int,
                      satellite_indices: Sequence[int]) -> tuple[list[float], float]:
    """Absolute offsets of satellite modes from the main mode, and their mean."""
    if not 0 <= main_mode_index < len(table.peaks):
        raise DomainError(f"main mode index {main_mode_index} out of range")
    sats = [i for i in satellite_indices if i != main_mode_index]
    if not sats:
        raise DomainError("need at least one satellite mode")
    if any(not 0 <= i < len(table.peaks) for i in sats):
        raise DomainError("satellite index out of range")
    main = table.peaks[main_mode_index].position
    offsets = [abs(table.peaks[i].position - main) for i in sats]
    return offsets, sum(offsets) / len(offsets)


def window_check(value: float, window: tuple[float, float]) -> bool:
    """Closed-interval membership ``lo <= value <= hi``."""
    lo, hi = window
    if not lo < hi:
        raise DomainError(f"window must satisfy lo < hi, got {window}")
    return lo <= value <= hi


def round_half_up(value: float, digits: int) -> float:
    """Round as printed tables do (311.25 -> 311.3), not banker's rounding."""
    q = Decimal(1).scaleb(-digits)
    return float(Decimal(repr(value)).quantize(q, rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class CoherenceInput:
    fermi_velocity: float  # m/s
    gap: float  # eV

    def __post_init__(self):
        if not self.fermi_velocity > 0:
            raise DomainError("Fermi velocity must be positive")
        if not self.gap > 0:
            raise DomainError("gap must be positive")


def coherence_length(inp: CoherenceInput) -> float:
    """xi = hbar v_F / gap, in angstrom (gap converted from eV to J)."""
    return constants.hbar * inp.fermi_velocity / (inp.gap * constants.e) / constants.angstrom


# --- regularity report -------------------------------------------------------

CU_IMPLANTED = "cu-implanted"
CU_UNIMPLANTED = "cu-unimplanted"
B_IMPLANTED = "b-implanted"

# (implanted-side peak, boron-sample peak, published shift)
PUBLISHED_SHIFTS = ((1215.0, 1212.3, 2.8), (1779.5, 1772.5, 7.0), (2022.3, 2011.0, 11.3))
# (implanted-side peak, unimplanted-side peak, published ratio)
PUBLISHED_RATIOS = ((2022.3, 1757.0, 1.151), (1779.5, 1569.0, 1.134))
RATIO_TOLERANCE = 0.003
AFESWR_MAIN = 641.8
AFESWR_SATELLITES = ((354.6, 287.2), (977.1, 335.3))
AFESWR_MEAN = 311.3
AFESWR_EXPECTED_SPLITTING = 300.0
AFR_LINE = 656.8
RS_WINDOW = (402.5, 673.7)
IR_MODE = 540.0
IR_WINDOW = (386.7, 603.0)


@dataclass(frozen=True)
class CheckResult:
    name: str
    expected: object
    reference: str
    computed: object
    tolerance: object
    passed: bool | None  # None marks an informational entry

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class RegularityReport:
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(c.passed is not False for c in self.checks)

    @property
    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if c.passed is False]

    def to_dict(self) -> dict:
        return {"all_passed": self.all_passed, "checks": [c.to_dict() for c in self.checks]}


def regularity_report(tables: Sequence[PeakTable]) -> RegularityReport:
    """Run every tabulated regularity check on the loaded peak tables."""
    by_id = tables_by_id(tables)
    missing = {CU_IMPLANTED, CU_UNIMPLANTED, B_IMPLANTED} - set(by_id)
    if missing:
        raise DomainError(f"fixture lacks samples: {sorted(missing)}")
    cu, cu_back, boron = by_id[CU_IMPLANTED], by_id[CU_UNIMPLANTED], by_id[B_IMPLANTED]
    report = RegularityReport()
    add = report.checks.append

    pairing = [(cu.index_of(a), boron.index_of(b)) for a, b, _ in PUBLISHED_SHIFTS]
    shifts = peak_shifts(cu, boron, pairing)
    for (a, b, published), (shift, unc) in zip(PUBLISHED_SHIFTS, shifts):
        add(CheckResult(f"shift {a:g}-{b:g}", published,
                        "published Cu/B peak shift", shift, unc,
                        abs(shift - published) <= unc))
    add(CheckResult("shifts increase with frequency", True,
                    "published Cu/B shift trend", shifts_increase(shifts), None,
                    shifts_increase(shifts)))

    pairing = [(cu.index_of(a), cu_back.index_of(b)) for a, b, _ in PUBLISHED_RATIOS]
    for (a, b, published), (ratio, unc) in zip(PUBLISHED_RATIOS,
                                               peak_ratios(cu, cu_back, pairing)):
        add(CheckResult(f"ratio {a:g}/{b:g}", published,
                        "published implanted/unimplanted frequency ratio", ratio,
                        RATIO_TOLERANCE, abs(ratio - published) <= RATIO_TOLERANCE))

    main = cu_back.index_of(AFESWR_MAIN)
    sats = [cu_back.index_of(pos) for pos, _ in AFESWR_SATELLITES]
    offsets, mean = afeswr_splittings(cu_back, main, sats)
    for (pos, published), offset in zip(AFESWR_SATELLITES, offsets):
        add(CheckResult(f"AFESWR offset {pos:g}", published,
                        "published satellite distance from the 641.8 mode", offset, 0.05,
                        round_half_up(offset, 1) == published))
    add(CheckResult("AFESWR mean splitting", AFESWR_MEAN, "published average splitting",
                    mean, 0.05, round_half_up(mean, 1) == AFESWR_MEAN))
    add(CheckResult("AFESWR mean vs expected splitting", AFESWR_EXPECTED_SPLITTING,
                    "expected RS splitting; reported as a distance only",
                    abs(mean - AFESWR_EXPECTED_SPLITTING), None, None))

    afr = cu.peaks[cu.index_of(AFR_LINE)].position
    add(CheckResult(f"{afr:g} in RS window", list(RS_WINDOW),
                    "RS-active AFR window", afr, None, window_check(afr, RS_WINDOW)))
    add(CheckResult(f"{IR_MODE:g} in IR window", list(IR_WINDOW),
                    "t-PA IR polaron window", IR_MODE, None, window_check(IR_MODE, IR_WINDOW)))
    return report
