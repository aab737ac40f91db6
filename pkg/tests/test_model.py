import pytest

from agodd import (
    AgOdd,
    AgOddError,
    AttributeNode,
    AutomationBand,
    CategoryKind,
    CdvTag,
    Mode,
    ProcessDef,
    Trigger,
    TriggerKind,
    classify_automation,
    parse_odd,
    resolve_tag,
    validate_model,
)
from agodd.model import CategoryNode, format_path


def test_final_cultivation_has_no_diagnostics(cultivation):
    assert validate_model(cultivation[2]) == []


def test_empty_model_is_valid():
    assert validate_model(AgOdd("empty")) == []


def test_missing_categories_default_to_empty_restrictive():
    odd = AgOdd("x", categories={})
    assert set(odd.categories) == set(CategoryKind)
    assert all(c.mode is Mode.RESTRICTIVE and not c.children for c in odd.categories.values())


def test_duplicate_tag_is_one_error(cultivation):
    text = """odd "dup" {
      dimension stubble_height unit cm range [0, 100]
      scenery {
        attr "Crop stubbles (≤ 15 cm)" restrictive tag SA1 { constraint stubble_height <= 15 cm }
        attr "Copy" restrictive tag SA1
      }
    }"""
    diags = validate_model(parse_odd(text))
    assert [d.code for d in diags] == ["duplicate-cdv-tag"]
    assert diags[0].severity == "error"


def test_validate_is_idempotent(wheat):
    assert validate_model(wheat) == validate_model(wheat)


def test_lod_mismatch_and_duplicate_sibling():
    bad = AttributeNode("A", lod=3)
    odd = AgOdd("x", categories={CategoryKind.SCENERY: CategoryNode(CategoryKind.SCENERY, children=(bad, AttributeNode("A")))})
    codes = sorted(d.code for d in validate_model(odd))
    assert codes == ["duplicate-sibling", "lod-mismatch"]


def test_partial_process_and_wrong_role():
    odd = AgOdd("x", processes=(ProcessDef("p", start_tags=(CdvTag.parse("EA1"),)),))
    codes = sorted(d.code for d in validate_model(odd))
    assert "partial-process" in codes and "wrong-tag-role" in codes


def test_condition_tag_outside_dynamic_objects():
    odd = parse_odd('odd "x" { scenery { attr "A" tag C1 } }')
    assert [d.code for d in validate_model(odd)] == ["condition-not-dynamic-object"]


def test_ambiguous_permissive_is_a_warning():
    odd = parse_odd(
        'odd "x" { dimension w unit m range [0, 9] scenery { attr "A" permissive { attr "B" { constraint w = 3 m } } } }'
    )
    diags = validate_model(odd)
    assert [(d.severity, d.code) for d in diags] == [("warning", "ambiguous-permissive")]


def test_resolve_tag_shared_node(wheat):
    expected = ("scenery", "Crop", "Crop height harvested (5 cm – 25 cm)")
    assert resolve_tag(wheat, "EA1") == expected
    assert resolve_tag(wheat, CdvTag.parse("SA2")) == expected
    assert format_path(expected) == 'scenery/"Crop"/"Crop height harvested (5 cm – 25 cm)"'


def test_resolve_tag_unknown():
    with pytest.raises(AgOddError) as exc:
        resolve_tag(AgOdd("empty"), "SA1")
    assert exc.value.code == "unknown-tag"


def test_every_process_tag_resolves(wheat, cultivation):
    for odd in (wheat, *cultivation):
        for p in odd.processes:
            tags = list(p.start_tags) + list(p.end_tags)
            if p.trigger is not None and p.trigger.kind is TriggerKind.INTERACTION:
                tags += list(p.trigger.tags)
            for t in tags:
                assert resolve_tag(odd, t)


@pytest.mark.parametrize(
    "levels, band",
    [
        ((0, 0), AutomationBand.MANUAL),
        ((5, 5), AutomationBand.AUTONOMOUS),
        ((3, 5), AutomationBand.SEMI_AUTONOMOUS),
        ((1, 1), AutomationBand.PARTIALLY_AUTOMATED),
        ((2, 2), AutomationBand.PARTIALLY_AUTOMATED),
        ((4, 4), AutomationBand.SEMI_AUTONOMOUS),
    ],
)
def test_classify_automation(levels, band):
    assert classify_automation(*levels) is band


@pytest.mark.parametrize("levels", [(-1, 0), (0, 6), (2.5, 1), (True, 1)])
def test_classify_out_of_range(levels):
    with pytest.raises(AgOddError) as exc:
        classify_automation(*levels)
    assert exc.value.code == "out-of-range-level"


def test_cdv_tag_parse():
    t = CdvTag.parse("C2.1")
    assert str(t) == "C2.1"
    with pytest.raises(AgOddError):
        CdvTag.parse("X1")


def test_trigger_describe():
    assert Trigger(TriggerKind.INTERACTION, tags=(CdvTag.parse("C2"), CdvTag.parse("C2.1"))).describe() == "Interaction with C2 C2.1"
