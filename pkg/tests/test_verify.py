import pytest

from agodd import AgOdd, AgOddError, Binding, BoundaryKind, Scenario, Verdict, coverage, detect_violations, find_gaps, parse_odd, verify_iteration
from agodd.model import Range
from agodd.verify import decide, gap_fraction, permissive_crossings

SLOPE_ODD = parse_odd('odd "s" { dimension slope unit % range [0, 10] scenery { attr "Fields" { constraint slope <= 10 % } } }')


def slope_scenario(lo, hi, name="s"):
    return Scenario(name, bindings=(Binding(1, ("scenery", "Fields"), Range(lo, hi, "%")),))


def test_half_coverage():
    report = coverage(SLOPE_ODD, [slope_scenario(0, 5)], 100)
    assert report.overall == 0.5 and report.per_dimension == {"slope": 0.5}


def test_no_scenarios():
    assert coverage(SLOPE_ODD, [], 100).overall == 0.0


def test_one_gap_after_half():
    (gap,) = find_gaps(SLOPE_ODD, [slope_scenario(0, 5)], 100)
    assert gap.box()["slope"] == (5.0, 10.0) and gap.cells == 50


def test_full_coverage_no_gaps():
    assert find_gaps(SLOPE_ODD, [slope_scenario(0, 10)], 100) == []


def test_unbounded_dimension():
    odd = parse_odd('odd "u" { dimension speed unit km/h scenery { attr "Road" } }')
    with pytest.raises(AgOddError) as exc:
        coverage(odd, [], 10)
    assert exc.value.code == "unbounded-dimension"


@pytest.mark.parametrize("grid", [0, -3, 2.5, True])
def test_invalid_grid(grid):
    with pytest.raises(AgOddError):
        coverage(SLOPE_ODD, [], grid)


def test_fig5_iteration1(fig5):
    odd, scs = fig5[0]
    (v,) = detect_violations(odd, scs)
    assert v.scenario == "scenario 1" and v.kind is BoundaryKind.RESTRICTIVE_HARD
    report = verify_iteration(odd, scs, grid=100)
    assert report.verdict is Verdict.NEEDS_ODD_REVISION
    assert report.coverage.overall == pytest.approx(0.375)
    assert gap_fraction(report.gaps, report.coverage) > 0.5


def test_fig5_iteration2(fig5):
    odd, scs = fig5[1]
    assert [v.scenario for v in detect_violations(odd, scs)] == ["scenario 6"]


def test_fig5_final(fig5):
    odd, scs = fig5[3]
    report = verify_iteration(odd, scs, 1.0, 100, iteration=4)
    assert report.verdict is Verdict.VERIFIED and report.coverage.overall == 1.0 and not report.violations and not report.gaps


def test_permissive_crossing_is_note_only(fig5):
    odd, scs = fig5[0]
    notes = permissive_crossings(odd, scs)
    assert [n.scenario for n in notes] == ["scenario 3"]
    assert all(n.kind is BoundaryKind.PERMISSIVE_OPEN for n in notes)
    assert all(v.kind is BoundaryKind.RESTRICTIVE_HARD for v in detect_violations(odd, scs))


def test_scenarios_inside_odd_have_no_violations():
    assert detect_violations(SLOPE_ODD, [slope_scenario(1, 9), Scenario("empty")]) == []


def test_needs_scenarios_at_sixty_percent():
    report = verify_iteration(SLOPE_ODD, [slope_scenario(0, 6)], grid=100)
    assert report.coverage.overall == pytest.approx(0.6)
    assert report.verdict is Verdict.NEEDS_SCENARIOS
    assert verify_iteration(SLOPE_ODD, [slope_scenario(0, 6)], coverage_threshold=0.5, grid=100).verdict is Verdict.VERIFIED


def test_decide_is_pure():
    assert decide(["v"], 1.0, 0.0) is Verdict.NEEDS_ODD_REVISION
    assert decide([], 0.99, 1.0) is Verdict.NEEDS_SCENARIOS
    assert decide([], 1.0, 1.0) is Verdict.VERIFIED


def test_violations_sorted_and_deterministic(cultivation):
    from conftest import load_scenarios

    scs = load_scenarios("cultivation_iter1.agsc")
    vs = detect_violations(cultivation[2], scs)
    assert vs == sorted(vs, key=lambda v: v.sort_key())
    assert vs == detect_violations(cultivation[2], list(reversed(scs)))


def test_cultivation_iteration3_flags_tall_human_and_dust(cultivation):
    from conftest import load_scenarios

    vs = detect_violations(cultivation[2], load_scenarios("cultivation_iter1.agsc"))
    s3 = {v.dimension for v in vs if v.scenario == "scenario 3"}
    assert s3 == {"human_height", "visibility"}


def test_shrinking_scenario_never_adds_violations(fig5):
    odd, scs = fig5[1]
    wide = scs[5]
    narrow = Scenario(wide.name, bindings=tuple(
        Binding(b.layer, b.path, Range(b.value.lo, min(b.value.hi, 8), b.value.unit)) for b in wide.bindings
    ))
    assert {v.facet for v in detect_violations(odd, [narrow])} <= {v.facet for v in detect_violations(odd, [wide])}
    assert detect_violations(odd, [narrow]) == []


def test_categorical_coverage():
    odd = parse_odd(
        'odd "c" { dimension weather unit none values { "dry" "rain" "snow" } environment { attr "W" permissive } }'
    )
    s = Scenario("s", bindings=(Binding(5, ("environment", "W"), "dry"),))
    report = coverage(odd, [s], 10)
    assert report.overall == pytest.approx(1 / 3)
    gaps = find_gaps(odd, [s], 10)
    assert [g.box()["weather"] for g in gaps] == [("rain", "snow")]


def test_empty_odd_coverage():
    report = coverage(AgOdd("e"), [], 10)
    assert report.total_cells == 1 and report.overall == 0.0
    assert coverage(AgOdd("e"), [Scenario("s")], 10).overall == 1.0


def test_report_json_fields(fig5):
    odd, scs = fig5[0]
    data = verify_iteration(odd, scs, grid=10).to_json()
    assert list(data)[:6] == ["schema", "iteration", "verdict", "violations", "coverage", "gaps"]
    assert set(data["coverage"]) == {"overall", "per_dimension", "grid"}
