import pytest

from agodd import AgOddError, ProcessEvent, WorldState, check_processes, fire_trigger, parse_odd, simulate
from agodd.model import CdvTag, Quantity
from agodd.process import NoFire, seconds

from conftest import load_events

CM = "cm"


def h(v):
    return Quantity(float(v), CM)


CUTTER = parse_odd(
    """odd "cutter" {
      dimension crop_height unit cm range [0, 150]
      dimension grain_moisture unit % range [0, 40]
      scenery {
        attr "Standing crop" tag SA1 { constraint crop_height >= 30 cm }
        attr "Cut crop" tag EA1 { constraint crop_height = 20 cm }
      }
      dynamic_objects { attr "Cutter bar" tag C1 }
      process "cut" { start SA1 trigger interaction(C1) end EA1 }
      process "dry" { start SA1 trigger after 2 h end EA1 }
      process "moist" { start SA1 trigger state(grain_moisture <= 14 %) end EA1 }
    }"""
)


def test_cutter_bar_sets_end_value():
    new = fire_trigger(WorldState.of({"crop_height": h(70)}), CUTTER.process("cut"), ProcessEvent.interaction("C1"), CUTTER)
    assert new.get("crop_height") == h(20)


def test_harvesting_projects_into_ea1(wheat):
    new = fire_trigger(WorldState.of({"crop_height": h(50)}), wheat.process("24/7 autonomous harvesting"), ProcessEvent.interaction("C1"), wheat)
    assert new.get("crop_height") == h(25)


def test_start_unsatisfied(wheat):
    r = fire_trigger(WorldState.of({"crop_height": h(80)}), wheat.process("24/7 autonomous harvesting"), ProcessEvent.interaction("C1"), wheat)
    assert isinstance(r, NoFire) and r.reason == "start-unsatisfied" and not r


def test_trigger_mismatch(wheat):
    r = fire_trigger(WorldState.of({"crop_height": h(50)}), wheat.process("24/7 autonomous harvesting"), ProcessEvent.interaction("C2"), wheat)
    assert r.reason == "trigger-mismatch"
    r = fire_trigger(WorldState.of(), wheat.process("24/7 crop transport"), ProcessEvent.interaction("C1"), wheat)
    assert r.reason == "trigger-mismatch"


def test_missing_value_is_unsatisfied(wheat):
    r = fire_trigger(WorldState.of(), wheat.process("24/7 autonomous harvesting"), ProcessEvent.interaction("C1"), wheat)
    assert r.reason == "start-unsatisfied"


def test_measured_unit_mismatch():
    with pytest.raises(AgOddError) as exc:
        fire_trigger(WorldState.of(), CUTTER.process("moist"), ProcessEvent.measured("grain_moisture", Quantity(12.0, "kg")), CUTTER)
    assert exc.value.code == "unit-mismatch"


def test_wheat_chain(wheat):
    events = load_events("wheat_chain.agev")
    trace = simulate(WorldState.of({"crop_height": h(50)}), wheat, events)
    assert trace.firings == [(0, "24/7 autonomous harvesting"), (1, "24/7 cultivation")]
    after1 = trace.steps[0].state
    assert 5 <= after1.get("crop_height").value <= 25
    assert CdvTag.parse("SA2") in after1.satisfied_tags(wheat)
    assert trace.final.satisfies(wheat, ("scenery", "Crop"))


def test_post_fire_satisfies_end_nodes(wheat):
    from agodd import resolve_tag

    for start in (40, 47.5, 60):
        new = fire_trigger(WorldState.of({"crop_height": h(start), "slope": Quantity(3.0, "%")}), wheat.process("24/7 autonomous harvesting"), ProcessEvent.interaction("C1"), wheat)
        assert new.satisfies(wheat, resolve_tag(wheat, "EA1"))
        assert new.get("slope") == Quantity(3.0, "%")  # untouched by the end tag


def test_empty_events_and_unmatched_event(wheat):
    init = WorldState.of({"crop_height": h(50)})
    assert simulate(init, wheat, []).final == init
    trace = simulate(init, wheat, [ProcessEvent.interaction("C9")])
    assert trace.firings == [] and trace.steps[0].fired == () and trace.final == init


def test_relative_time_accumulates():
    init = WorldState.of({"crop_height": h(70)})
    events = [ProcessEvent.elapsed(Quantity(60.0, "min")), ProcessEvent.elapsed(Quantity(3600.0, "s"))]
    trace = simulate(init, CUTTER, events)
    assert trace.firings == [(1, "dry")]
    assert seconds(Quantity(1.0, "d")) == 86400.0


def test_state_change_trigger():
    init = WorldState.of({"crop_height": h(70)})
    trace = simulate(init, CUTTER, [ProcessEvent.measured("grain_moisture", Quantity(16.0, "%")), ProcessEvent.measured("grain_moisture", Quantity(13.0, "%"))])
    assert trace.firings == [(1, "moist")]
    assert trace.final.get("grain_moisture") == Quantity(13.0, "%")


def test_simulation_is_deterministic(wheat):
    import json

    events = load_events("wheat_chain.agev")
    runs = [json.dumps(simulate(WorldState.of({"crop_height": h(50)}), wheat, events).to_json()) for _ in range(2)]
    assert runs[0] == runs[1]


def test_check_processes_clean(wheat, cultivation):
    assert check_processes(wheat) == []
    assert check_processes(cultivation[2]) == []
    assert check_processes(CUTTER) == []


def test_condition_in_scenery_is_flagged():
    odd = parse_odd(
        'odd "x" { scenery { attr "A" tag SA1 attr "B" tag EA1 attr "Cutter" tag C1 } process "p" { start SA1 trigger interaction(C1) end EA1 } }'
    )
    assert "condition-not-dynamic-object" in [d.code for d in check_processes(odd)]


def test_incompatible_start_end():
    odd = parse_odd(
        """odd "x" {
          dimension a unit cm range [0, 10]
          dimension b unit kg range [0, 10]
          scenery { attr "A" tag SA1 { constraint a <= 5 cm } attr "B" tag EA1 { constraint b <= 5 kg } }
          dynamic_objects { attr "M" tag C1 }
          process "p" { start SA1 trigger interaction(C1) end EA1 }
        }"""
    )
    assert [d.code for d in check_processes(odd)] == ["incompatible-start-end"]


def test_end_value_override_and_check():
    text = """odd "x" {
      dimension a unit cm range [0, 100]
      scenery { attr "A" tag SA1 { constraint a >= 50 cm } attr "B" tag EA1 { constraint a <= 30 cm } }
      dynamic_objects { attr "M" tag C1 }
      process "p" { start SA1 trigger interaction(C1) end EA1 endvalue a VALUE }
    }"""
    good = parse_odd(text.replace("VALUE", "10 cm"))
    assert check_processes(good) == []
    new = fire_trigger(WorldState.of({"a": Quantity(60.0, "cm")}), good.process("p"), ProcessEvent.interaction("C1"), good)
    assert new.get("a") == Quantity(10.0, "cm")
    bad = parse_odd(text.replace("VALUE", "40 cm"))
    assert [d.code for d in check_processes(bad)] == ["end-value-outside-end-domain"]
