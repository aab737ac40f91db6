from agodd.diff import apply_diff, diff_odds, iteration_marker, render_diff

BLUE = {"Slope ≤ 10 %", "No lying snow", "No humans ≥ 2 m", "Traktor X", "Width ≤ 50 m"}
RED = {"Fields in GER", "No fog (visibility ≤ 50 m)", "No dust (visibility ≤ 50 m)", "Implement Y"}


def test_blue_additions(cultivation):
    d = diff_odds(cultivation[0], cultivation[1])
    assert set(d.added_names()) == BLUE and len(d.added_names()) == 5
    assert not d.removed_attributes and not d.mode_changes
    assert {c.iteration for c in d.added_attributes} == {2}


def test_red_additions(cultivation):
    d = diff_odds(cultivation[1], cultivation[2])
    assert set(d.added_names()) == RED and len(d.added_names()) == 4
    assert {c.iteration for c in d.added_attributes} == {3}


def test_self_diff_is_empty(cultivation, wheat):
    for odd in (*cultivation, wheat):
        d = diff_odds(odd, odd)
        assert d.is_empty and render_diff(d) == "no changes\n"


def test_patch_property(cultivation, wheat):
    from conftest import load_odd

    pairs = [(cultivation[0], cultivation[1]), (cultivation[1], cultivation[2]), (cultivation[2], cultivation[0])]
    pairs += [(load_odd("wheat_iter1.agodd"), wheat), (wheat, load_odd("wheat_iter1.agodd"))]
    pairs += [(load_odd("fig5_iter2.agodd"), load_odd("fig5_iter3.agodd"))]
    for old, new in pairs:
        assert apply_diff(old, diff_odds(old, new)) == new


def test_render_markers(cultivation):
    text = render_diff(diff_odds(cultivation[1], cultivation[2]))
    assert '+ [red] scenery/"Fields in Europe"/"Fields in GER" (∪)' in text
    assert iteration_marker(2) == "blue" and iteration_marker(None) == "-" and iteration_marker(7) == "iter7"


def test_constraint_and_mode_changes():
    from conftest import load_odd

    d = diff_odds(load_odd("fig5_iter2.agodd"), load_odd("fig5_iter3.agodd"))
    assert [c.path[-1] for c in d.constraint_changes] == ["Depth"]
    assert [c.path[-1] for c in d.iteration_changes] == ["Depth"]
    assert "constraints y ≤ 8 m -> y ≤ 7 m" in render_diff(d)
