from agodd import AgOdd, Binding, ProcessRef, Scenario, parse_scenarios, scenario_region, validate_scenario
from agodd.model import Range

from conftest import load_odd, load_scenarios


def codes(diags):
    return [(d.severity, d.code) for d in diags]


def test_slope_binding_is_clean(cultivation):
    (s,) = parse_scenarios('scenario "scenario 2" { layer 1: bind "scenery"/"Fields in Europe"/"Slope ≤ 10 %" in [0, 10] % }')
    assert validate_scenario(s, cultivation[2]) == []


def test_unknown_process(cultivation):
    s = Scenario("s", processes=(ProcessRef(7, "nonexistent"),))
    assert codes(validate_scenario(s, cultivation[2])) == [("error", "unknown-process")]


def test_process_on_wrong_layer(cultivation):
    s = Scenario("s", processes=(ProcessRef(3, "24/7 autonomous cultivation (depth limit 15 cm)"),))
    assert codes(validate_scenario(s, cultivation[2])) == [("error", "layer-misuse")]


def test_layer7_binding_needs_tagged_node(cultivation):
    ok = Scenario("s", bindings=(Binding(7, ("scenery", "Crop stubbles (≤ 15 cm)")),))
    bad = Scenario("s", bindings=(Binding(7, ("scenery", "Fields in Europe")),))
    assert validate_scenario(ok, cultivation[2]) == []
    assert codes(validate_scenario(bad, cultivation[2])) == [("error", "layer-misuse")]


def test_unresolved_path_is_info(cultivation):
    s = Scenario("s", bindings=(Binding(2, ("scenery", "Forest")),))
    assert codes(validate_scenario(s, cultivation[2])) == [("info", "unresolved-path")]


def test_out_of_domain_and_unbindable(cultivation):
    s = Scenario(
        "s",
        bindings=(
            Binding(1, ("scenery", "Fields in Europe", "Slope ≤ 10 %"), Range(50, 150, "%")),
            Binding(4, ("dynamic_objects", "Ego-vehicle"), Range(1, 2, "m")),
        ),
    )
    assert sorted(codes(validate_scenario(s, cultivation[2]))) == [("warning", "out-of-domain"), ("warning", "unbindable-value")]


def test_explicit_dimension_checks(cultivation):
    unknown = Scenario("s", bindings=(Binding(4, ("dynamic_objects", "Humans"), Range(1, 2, "m"), "height"),))
    wrong_unit = Scenario("s", bindings=(Binding(4, ("dynamic_objects", "Humans"), Range(1, 2, "cm"), "human_height"),))
    assert codes(validate_scenario(unknown, cultivation[2])) == [("error", "unknown-dimension")]
    assert codes(validate_scenario(wrong_unit, cultivation[2])) == [("error", "unit-mismatch")]


def test_corpus_scenarios_have_no_errors():
    pairs = [("cultivation_iter1.agodd", "cultivation_iter1.agsc"), ("wheat_iter1.agodd", "wheat_iter1.agsc")]
    pairs += [(f"fig5_iter{i}.agodd", f"fig5_iter{i}.agsc") for i in (1, 2, 3, 4)]
    for odd_name, sc_name in pairs:
        odd = load_odd(odd_name)
        for s in load_scenarios(sc_name):
            assert all(d.severity == "info" for d in validate_scenario(s, odd)), (sc_name, s.name)


def test_region_of_one_binding():
    odd = load_odd("cultivation_iter3.agodd")
    s = Scenario("s", bindings=(Binding(1, ("scenery", "Fields in Europe", "Slope ≤ 10 %"), Range(0, 5, "%")),))
    region = scenario_region(s, odd)
    (p,) = region["slope"].parts
    assert (p.lo, p.hi) == (0, 5)
    for d in odd.dimensions:
        if d.name != "slope":
            assert region[d.name].issubset(region[d.name]) and not region[d.name].is_empty
            full = scenario_region(Scenario("empty"), odd)[d.name]
            assert region[d.name] == full


def test_empty_scenario_is_universal(cultivation):
    from agodd.regions import Region1D

    region = scenario_region(Scenario("empty"), cultivation[2])
    assert all(region[d.name] == Region1D.full(d) for d in cultivation[2].dimensions)
    assert region.paths == frozenset()


def test_unlisted_path_recorded():
    odd = load_odd("wheat_iter1.agodd")
    s1 = load_scenarios("wheat_iter1.agsc")[0]
    region = scenario_region(s1, odd)
    other = ("dynamic_objects", "Vehicle", "Other vehicle")
    assert other in region.paths and odd.lookup(other) is None


def test_adding_binding_never_enlarges(cultivation):
    odd = cultivation[2]
    base = Scenario("s", bindings=(Binding(1, ("scenery", "Fields in Europe", "Slope ≤ 10 %"), Range(0, 8, "%")),))
    more = Scenario("s", bindings=base.bindings + (Binding(1, ("scenery", "Fields in Europe", "Slope ≤ 10 %"), Range(4, 20, "%")),))
    a, b = scenario_region(base, odd), scenario_region(more, odd)
    assert all(b[d.name].issubset(a[d.name]) for d in odd.dimensions)


def test_empty_odd_region():
    assert scenario_region(Scenario("s"), AgOdd("e")).dims == {}
