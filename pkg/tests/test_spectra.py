import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ssh_rabi.errors import DomainError, FixtureParseError
from ssh_rabi.spectra import (FIXTURE_SHA256, CoherenceInput, Peak, PeakTable, afeswr_splittings,
                              coherence_length, default_fixture_path,
                              fixture_checksum, load_fixtures, parse_fixtures,
                              peak_ratios, peak_shifts, regularity_report, round_half_up,
                              shifts_increase, tables_by_id, window_check)


@pytest.fixture(scope="module")
def tables():
    return tables_by_id(load_fixtures())


def test_fixture_checksum():
    assert fixture_checksum() == FIXTURE_SHA256


def test_fixture_contents(tables):
    cu, back, boron = tables["cu-implanted"], tables["cu-unimplanted"], tables["b-implanted"]
    assert [(p.position, p.uncertainty) for p in cu.peaks] == \
        [(656.8, 0.2), (1215, 1), (1779.5, 1), (2022.3, 0.5)]
    assert [(p.position, p.uncertainty) for p in back.peaks] == \
        [(354.6, 1), (641.8, 1), (977.1, 1), (1274.1, 2), (1569, 3), (1757, 5)]
    assert (back.broad_line.center, back.broad_line.center_uncertainty) == (1160, 10)
    assert (back.broad_line.width, back.broad_line.width_uncertainty) == (1720, 20)
    assert back.diamond.position == 1328.7
    assert [(p.position, p.uncertainty) for p in boron.peaks] == \
        [(1212.3, 1), (1772.5, 1), (2011, 0.5)]
    assert (boron.diamond.position, boron.diamond.uncertainty) == (1331.95, 0.1)


def test_empty_fixture():
    assert parse_fixtures("") == []
    assert parse_fixtures("# only a comment\n\n") == []


@pytest.mark.parametrize("text, line, field", [
    ("sample a\npeak 100 x\n", 2, "uncertainty"),
    ("sample a\npeak 100 -1\n", 2, "uncertainty"),
    ("peak 100 1\n", 1, None),
    ("sample a\nwiggle 1\n", 2, "record"),
    ("sample a\npeak 200 1\npeak 100 1\n", 1, None),
    ("sample a\nbroad 1 2 3\n", 2, None),
])
def test_parse_errors(text, line, field):
    with pytest.raises(FixtureParseError) as info:
        parse_fixtures(text)
    assert info.value.line == line
    assert info.value.field == field


def test_table_invariants():
    with pytest.raises(DomainError):
        PeakTable("x", (Peak(2, 1), Peak(1, 1)))
    with pytest.raises(DomainError):
        PeakTable("x", (Peak(1, 0),))


def test_cu_b_shifts(tables):
    cu, boron = tables["cu-implanted"], tables["b-implanted"]
    shifts = peak_shifts(cu, boron, [(1, 0), (2, 1), (3, 2)])
    for (shift, unc), expected, published in zip(shifts, (2.7, 7.0, 11.3), (2.8, 7.0, 11.3)):
        assert shift == pytest.approx(expected, abs=1e-9)
        assert abs(shift - published) <= unc
    assert shifts[0][1] == pytest.approx(math.sqrt(2))
    assert shifts_increase(shifts)


def test_shift_identity_and_antisymmetry(tables):
    cu, boron = tables["cu-implanted"], tables["b-implanted"]
    assert all(s == 0 for s, _ in peak_shifts(cu, cu, [(i, i) for i in range(4)]))
    fwd = peak_shifts(cu, boron, [(1, 0), (2, 1)])
    back = peak_shifts(boron, cu, [(0, 1), (1, 2)])
    assert [s for s, _ in fwd] == [-s for s, _ in back]
    with pytest.raises(DomainError):
        peak_shifts(cu, boron, [(9, 0)])


def test_ratios(tables):
    cu, back = tables["cu-implanted"], tables["cu-unimplanted"]
    (r1, u1), (r2, u2) = peak_ratios(cu, back, [(3, 5), (2, 4)])
    assert abs(r1 - 1.151) <= 0.003 and abs(r2 - 1.134) <= 0.003
    assert peak_ratios(cu, cu, [(0, 0)])[0][0] == 1.0
    zero = PeakTable("z", (Peak(0.0, 1.0),))
    with pytest.raises(DomainError):
        peak_ratios(cu, zero, [(0, 0)])


def test_ratio_shift_first_order_consistency(tables):
    cu, back = tables["cu-implanted"], tables["cu-unimplanted"]
    pairing = [(3, 5), (2, 4)]
    ratios = peak_ratios(cu, back, pairing)
    shifts = peak_shifts(cu, back, pairing)
    for (_, j), (ratio, unc), (shift, _) in zip(pairing, ratios, shifts):
        assert abs(ratio - (1 + shift / back.peaks[j].position)) <= unc


def test_afeswr(tables):
    back = tables["cu-unimplanted"]
    offsets, mean = afeswr_splittings(back, 1, [0, 2])
    assert offsets == pytest.approx([287.2, 335.3], abs=1e-9)
    assert mean == pytest.approx(311.25, abs=1e-9)
    assert round_half_up(mean, 1) == 311.3
    single = PeakTable("s", (Peak(500, 1), Peak(600, 1)))
    assert afeswr_splittings(single, 0, [1]) == ([100.0], 100.0)
    with pytest.raises(DomainError):
        afeswr_splittings(single, 0, [])


def test_round_half_up():
    assert round_half_up(311.25, 1) == 311.3
    assert round(311.25, 1) == 311.2  # banker's rounding would disagree with the table
    assert round_half_up(2.45, 1) == 2.5


def test_windows():
    assert window_check(656.8, (402.5, 673.7))
    assert window_check(540, (386.7, 603))
    assert window_check(673.7, (402.5, 673.7))
    assert not window_check(700, (402.5, 673.7))
    with pytest.raises(DomainError):
        window_check(1, (2, 1))


def test_coherence_length():
    xi = coherence_length(CoherenceInput(1e6, 1.0))
    assert xi == pytest.approx(6.582119569, rel=1e-9)
    assert coherence_length(CoherenceInput(1e6, 2.0)) == xi / 2
    assert coherence_length(CoherenceInput(2e6, 1.0)) == 2 * xi
    with pytest.raises(DomainError):
        CoherenceInput(1e6, 0.0)


@given(v=st.floats(1e3, 1e7), gap=st.floats(1e-3, 10))
def test_coherence_scaling(v, gap):
    xi = coherence_length(CoherenceInput(v, gap))
    assert coherence_length(CoherenceInput(v, 2 * gap)) == pytest.approx(xi / 2, rel=1e-15)


def test_regularity_report_passes(tables):
    report = regularity_report(list(tables.values()))
    assert report.all_passed, report.failures
    names = [c.name for c in report.checks]
    assert "AFESWR mean vs expected splitting" in names
    info = [c for c in report.checks if c.passed is None]
    assert len(info) == 1 and info[0].computed == pytest.approx(11.25)
    first_shift = report.checks[0]
    assert first_shift.expected == 2.8 and first_shift.computed == pytest.approx(2.7)
    json.dumps(report.to_dict())


def test_regularity_report_flags_offending_pair():
    text = default_fixture_path().read_text()
    tight = text.replace("peak    1215    1 ", "peak    1215    0.01 ") \
                .replace("peak    1212.3  1 ", "peak    1212.3  0.01 ")
    report = regularity_report(parse_fixtures(tight))
    assert not report.all_passed
    assert [c.name for c in report.failures] == ["shift 1215-1212.3"]


def test_regularity_report_needs_all_samples(tables):
    with pytest.raises(DomainError, match="lacks samples"):
        regularity_report([tables["cu-implanted"]])
