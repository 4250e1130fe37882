from __future__ import annotations

import json
import random
from importlib import resources

import pytest

from genface import (
    PHASE_EXPRESSION,
    PHASE_FACE,
    Circle,
    SemanticTag,
    TemplateElement,
    default_rule_text,
    new_project,
    parse_targets,
    placeholder_for,
    preset_tag,
    resolve_rules,
)
from genface.errors import DuplicateFactor, EmptyRuleText, TagCollision, TagInUse, UnknownElement, UnknownFactorReference
from genface.rulebook import (
    PRESET_FACTORS,
    PRESET_TAG_NAMES,
    PRESET_TAGS,
    SOURCE_DESIGNER,
    SOURCE_SYSTEM,
    parse_factor_refs,
)

from .generators import random_project


def shipped_rules() -> dict:
    raw = resources.files("genface.data").joinpath("default_rules.json").read_text("utf-8")
    return json.loads(raw)


def test_preset_taxonomy():
    assert PRESET_TAGS["organ"] == ("face", "left-eye", "right-eye", "nose", "mouth", "left-ear", "right-ear")
    assert PRESET_TAGS["context"] == ("scene", "scene-item", "emoji", "text")
    assert PRESET_TAGS["decoration"] == ("clothing", "hat", "jewellery", "color")
    assert len(PRESET_TAG_NAMES) == 15


def test_every_preset_has_both_phase_texts_matching_data_file():
    data = shipped_rules()
    for name in PRESET_TAG_NAMES:
        for phase in (PHASE_FACE, PHASE_EXPRESSION):
            assert default_rule_text(name, phase) == data[phase][name]


def test_known_rule_fragments():
    assert "keeping detailed structures such as eye socket, eyeball, pupil" in default_rule_text("left-eye", PHASE_FACE)
    assert "keeping it invisible during character generation" in default_rule_text("emoji", PHASE_FACE)
    assert "Do not use pure white (#ffffff)" in default_rule_text("face", PHASE_FACE)


def test_custom_tag_rule_synthesized():
    text = default_rule_text("flag", PHASE_FACE)
    assert "[template-flag]" in text
    assert "Keep contour and position unchanged." in text


@pytest.mark.parametrize("tag,expected", [
    ("left-eye", "template-lefteye"),
    ("scene-item", "template-sceneitem"),
    ("flag", "template-flag"),
])
def test_placeholder_for(tag, expected):
    assert placeholder_for(tag) == expected


def test_custom_tag_cannot_shadow_preset():
    with pytest.raises(TagCollision):
        SemanticTag("mouth", "custom")


def test_preset_category_must_match():
    with pytest.raises(TagCollision):
        SemanticTag("hat", "organ")


# --- parse_targets ------------------------------------------------------------------

def test_parse_targets_two_eyes():
    targets, warnings = parse_targets(
        "@left-eye and @right-eye show white sclera and pupils", {"left-eye", "right-eye", "nose"}
    )
    assert targets == ["left-eye", "right-eye"]
    assert warnings == []


def test_parse_targets_global_rule():
    targets, warnings = parse_targets("Keep a consistent overall color scheme.", {"left-eye"})
    assert targets == []
    assert warnings == []


def test_parse_targets_unknown_longest_token():
    targets, warnings = parse_targets("@hat-trick looks great", {"hat"})
    assert targets == []
    assert warnings == ["hat-trick unknown"]


def test_parse_targets_prefers_longest_known_tag():
    targets, _ = parse_targets("@left-eye sparkles", {"left", "left-eye"})
    assert targets == ["left-eye"]


def test_parse_targets_deduplicates_in_first_appearance_order():
    targets, _ = parse_targets("@nose then @mouth then @nose again", {"nose", "mouth"})
    assert targets == ["nose", "mouth"]


def test_parse_targets_never_returns_unknown(seed=3):
    rng = random.Random(seed)
    known = {"face", "left-eye", "right-eye", "hat", "flag"}
    vocabulary = list(known) + ["hat-trick", "noseish", "x", "left"]
    for _ in range(200):
        text = " ".join("@" + rng.choice(vocabulary) for _ in range(rng.randint(0, 6)))
        targets, _ = parse_targets(text, known)
        assert set(targets) <= known


def test_factor_refs_with_spaces():
    refs, warnings = parse_factor_refs(
        "@User Emotion changes the emoji density", ["User Emotion", "Atmosphere"]
    )
    assert refs == ["User Emotion"]
    assert warnings == []


def test_factor_refs_score():
    refs, _ = parse_factor_refs("@Score controls flag state: 80-100 bright red", ["Score"])
    assert refs == ["Score"]


def test_factor_refs_prose_only_warns_but_passes():
    refs, warnings = parse_factor_refs("the hat's style/color varies with hobbies", ["Hobbies"])
    assert refs == []
    assert warnings == []


def test_factor_refs_strict_mode_rejects_unknown_only():
    with pytest.raises(UnknownFactorReference):
        parse_factor_refs("@Weather drives the scene", ["Score"], strict=True)
    # strict mode still allows pure prose with no mentions
    refs, _ = parse_factor_refs("colors vary with mood", ["Score"], strict=True)
    assert refs == []


# --- tagging on a project ----------------------------------------------------------

@pytest.fixture
def project():
    p = new_project("tagging")
    p.add_element(TemplateElement("left-eye", "shape", Circle(150, 180, 30), "#bdbdbd"))
    p.add_element(TemplateElement("right-eye", "shape", Circle(250, 180, 30), "#bdbdbd"))
    return p


def test_apply_tag_injects_both_phase_defaults(project):
    injected = project.apply_tag("left-eye", preset_tag("left-eye"))
    assert {r.phase for r in injected} == {PHASE_FACE, PHASE_EXPRESSION}
    assert all(r.source == SOURCE_SYSTEM for r in injected)
    assert "keeping detailed structures such as eye socket, eyeball, pupil" in injected[0].text


def test_apply_tag_unknown_element(project):
    with pytest.raises(UnknownElement):
        project.apply_tag("chin", preset_tag("face"))


def test_apply_custom_tag(project):
    injected = project.apply_tag("left-eye", SemanticTag("flag", "custom"))
    assert "[template-flag]" in injected[0].text


def test_tag_unique_per_element(project):
    project.apply_tag("left-eye", preset_tag("left-eye"))
    with pytest.raises(TagInUse):
        project.apply_tag("right-eye", preset_tag("left-eye"))


def test_retag_replaces_defaults(project):
    project.apply_tag("left-eye", preset_tag("left-eye"))
    project.apply_tag("left-eye", preset_tag("right-eye"))
    texts = [r.text for r in project.rules]
    assert all("template-lefteye" not in t for t in texts)
    assert len(project.rules) == 2  # one per phase


def test_apply_then_remove_restores_rule_set(project):
    before = [r.to_dict() for r in project.rules]
    project.apply_tag("left-eye", preset_tag("left-eye"))
    project.remove_tag("left-eye")
    assert [r.to_dict() for r in project.rules] == before
    assert project.template.element("left-eye").tag is None


# --- resolve_rules -------------------------------------------------------------------

def test_resolve_rules_precedence_shape(project):
    project.apply_tag("left-eye", preset_tag("left-eye"))
    project.apply_tag("right-eye", preset_tag("right-eye"))
    project.add_rule(PHASE_FACE, "@left-eye gets a monocle")
    project.add_rule(PHASE_FACE, "Keep the palette warm.")
    ordered = resolve_rules(project, PHASE_FACE)
    kinds = [(r.source, r.scope) for r in ordered]
    assert kinds == [
        (SOURCE_DESIGNER, "targeted"),
        (SOURCE_DESIGNER, "global"),
        (SOURCE_SYSTEM, "targeted"),
        (SOURCE_SYSTEM, "targeted"),
    ]
    # defaults follow template element order
    assert ordered[2].targets == ("left-eye",)
    assert ordered[3].targets == ("right-eye",)


def test_resolve_rules_defaults_only(project):
    project.apply_tag("left-eye", preset_tag("left-eye"))
    ordered = resolve_rules(project, PHASE_FACE)
    assert [r.source for r in ordered] == [SOURCE_SYSTEM]


def test_resolve_rules_stable_creation_order(project):
    project.apply_tag("left-eye", preset_tag("left-eye"))
    first, _ = project.add_rule(PHASE_FACE, "@left-eye rule one")
    second, _ = project.add_rule(PHASE_FACE, "@left-eye rule two")
    for _ in range(3):
        ordered = resolve_rules(project, PHASE_FACE)
        designer = [r.id for r in ordered if r.source == SOURCE_DESIGNER]
        assert designer == [first.id, second.id]


def test_resolve_rules_is_permutation_for_random_projects():
    for seed in range(60):
        project = random_project(random.Random(seed))
        for phase in (PHASE_FACE, PHASE_EXPRESSION):
            stored = sorted(r.id for r in project.rules if r.phase == phase)
            ordered = resolve_rules(project, phase)
            assert sorted(r.id for r in ordered) == stored
            ranks = [_rank(r) for r in ordered]
            assert ranks == sorted(ranks)


def _rank(rule) -> int:
    if rule.source == SOURCE_DESIGNER and rule.scope == "targeted":
        return 0
    if rule.source == SOURCE_DESIGNER:
        return 1
    return 2


# --- factors and mappings --------------------------------------------------------------

def test_preset_factor_list():
    assert PRESET_FACTORS == (
        "Hobbies", "Occupation", "Personality", "Atmosphere", "User Emotion", "MBTI", "Age",
    )


def test_define_factor_marks_origin(project):
    hobbies = project.define_context_factor(PHASE_FACE, "Hobbies")
    score = project.define_context_factor(PHASE_EXPRESSION, "Score")
    assert hobbies.origin == "preset"
    assert score.origin == "custom"


def test_factor_names_unique_per_phase(project):
    project.define_context_factor(PHASE_FACE, "Hobbies")
    with pytest.raises(DuplicateFactor):
        project.define_context_factor(PHASE_FACE, "Hobbies")
    # same name on the other phase is a separate namespace
    project.define_context_factor(PHASE_EXPRESSION, "Hobbies")


def test_mapping_rule_parses_factor_refs(project):
    project.define_context_factor(PHASE_EXPRESSION, "Score")
    mapping, warnings = project.add_mapping_rule(
        PHASE_EXPRESSION, "@Score controls flag state: 80-100 bright red"
    )
    assert mapping.referenced_factors == ("Score",)
    assert warnings == []


def test_mapping_rule_prose_mention_warns(project):
    project.define_context_factor(PHASE_FACE, "Hobbies")
    project.define_context_factor(PHASE_FACE, "Occupation")
    mapping, _ = project.add_mapping_rule(
        PHASE_FACE, "the hat's style/color varies with hobbies"
    )
    assert mapping.referenced_factors == ()


def test_empty_mapping_text_rejected(project):
    with pytest.raises(EmptyRuleText):
        project.add_mapping_rule(PHASE_FACE, "   ")
