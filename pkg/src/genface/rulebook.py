"""Semantic tags, default rules, designer rules, context factors, mappings.

The built-in default rule texts ship as a versioned data file
(``data/default_rules.json``, key = tag x phase) so they stay auditable
without reading code. Applying a tag to a template element injects the
matching default rule for both phases; designer rules are authored free-form
and may target tags with ``@tag`` mentions.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from typing import TYPE_CHECKING

from .errors import EmptyRuleText, TagCollision, UnknownFactorReference, UnknownPhase

if TYPE_CHECKING:
    from .project import Project

PHASE_FACE = "face-gen"
PHASE_EXPRESSION = "expression-gen"
PHASES = (PHASE_FACE, PHASE_EXPRESSION)

TAG_CATEGORIES = ("organ", "decoration", "context", "custom")

PRESET_TAGS: dict[str, tuple[str, ...]] = {
    "organ": ("face", "left-eye", "right-eye", "nose", "mouth", "left-ear", "right-ear"),
    "context": ("scene", "scene-item", "emoji", "text"),
    "decoration": ("clothing", "hat", "jewellery", "color"),
}

PRESET_TAG_NAMES: frozenset[str] = frozenset(
    name for names in PRESET_TAGS.values() for name in names
)

# Preset context factors offered for quick selection; projects may add customs.
PRESET_FACTORS = (
    "Hobbies", "Occupation", "Personality", "Atmosphere", "User Emotion", "MBTI", "Age",
)

_TAG_NAME_RE = re.compile(r"^[a-z0-9-]+$")


@dataclass(frozen=True)
class SemanticTag:
    name: str
    category: str

    def __post_init__(self) -> None:
        if self.category not in TAG_CATEGORIES:
            raise ValueError("unknown tag category %r" % self.category)
        if not _TAG_NAME_RE.match(self.name):
            raise ValueError("tag name %r must match [a-z0-9-]+" % self.name)
        if self.category == "custom" and self.name in PRESET_TAG_NAMES:
            raise TagCollision("custom tag %r collides with a preset tag" % self.name)
        if self.category != "custom" and self.name not in PRESET_TAGS[self.category]:
            raise TagCollision(
                "%r is not a preset %s tag; use category 'custom'" % (self.name, self.category)
            )


def preset_tag(name: str) -> SemanticTag:
    for category, names in PRESET_TAGS.items():
        if name in names:
            return SemanticTag(name, category)
    raise KeyError(name)


def placeholder_for(tag_name: str) -> str:
    """Prompt placeholder for a tag: ``left-eye`` -> ``template-lefteye``."""
    if not tag_name:
        raise ValueError("empty tag name")
    return "template-" + tag_name.replace("-", "").lower()


CUSTOM_DEFAULT_RULE = (
    "Draw content for [{placeholder}] according to the designer's rules and "
    "the character's traits. Keep contour and position unchanged."
)


@dataclass(frozen=True)
class DefaultRule:
    tag: str
    phase: str
    text: str


def _load_builtin_rules() -> dict[str, dict[str, str]]:
    raw = resources.files("genface.data").joinpath("default_rules.json").read_text("utf-8")
    data = json.loads(raw)
    return {phase: dict(data[phase]) for phase in PHASES}


_BUILTIN_RULES = _load_builtin_rules()


def default_rule_text(tag_name: str, phase: str) -> str:
    """Built-in text for preset tags; synthesized text for custom tags."""
    if phase not in PHASES:
        raise UnknownPhase("unknown phase %r" % phase)
    builtin = _BUILTIN_RULES[phase].get(tag_name)
    if builtin is not None:
        return builtin
    return CUSTOM_DEFAULT_RULE.format(placeholder=placeholder_for(tag_name))


def default_rule(tag_name: str, phase: str) -> DefaultRule:
    return DefaultRule(tag_name, phase, default_rule_text(tag_name, phase))


SOURCE_DESIGNER = "designer"
SOURCE_SYSTEM = "system-default"

SCOPE_GLOBAL = "global"
SCOPE_TARGETED = "targeted"


@dataclass
class Rule:
    id: str
    phase: str
    scope: str
    targets: tuple[str, ...]
    text: str
    source: str
    created_at: str
    seq: int
    category: str | None = None  # style / detail / associated-features, advisory only

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise EmptyRuleText("rule text must be non-empty")

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "phase": self.phase,
            "scope": self.scope,
            "targets": list(self.targets),
            "text": self.text,
            "source": self.source,
            "created_at": self.created_at,
            "seq": self.seq,
            "category": self.category,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Rule":
        return cls(
            id=data["id"],
            phase=data["phase"],
            scope=data["scope"],
            targets=tuple(data.get("targets", ())),
            text=data["text"],
            source=data["source"],
            created_at=data["created_at"],
            seq=int(data.get("seq", 0)),
            category=data.get("category"),
        )


@dataclass
class ContextFactor:
    name: str
    origin: str  # preset | custom
    description: str = ""
    sample_values: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "origin": self.origin,
            "description": self.description,
            "sample_values": list(self.sample_values),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ContextFactor":
        return cls(
            name=data["name"],
            origin=data.get("origin", "custom"),
            description=data.get("description", ""),
            sample_values=tuple(data.get("sample_values", ())),
        )


@dataclass
class MappingRule:
    id: str
    phase: str
    text: str
    referenced_factors: tuple[str, ...]
    created_at: str
    seq: int

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "phase": self.phase,
            "text": self.text,
            "referenced_factors": list(self.referenced_factors),
            "created_at": self.created_at,
            "seq": self.seq,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MappingRule":
        return cls(
            id=data["id"],
            phase=data["phase"],
            text=data["text"],
            referenced_factors=tuple(data.get("referenced_factors", ())),
            created_at=data["created_at"],
            seq=int(data.get("seq", 0)),
        )


_MENTION_WORD_RE = re.compile(r"[A-Za-z0-9-]+")


def parse_mentions(text: str, known_names: set[str] | frozenset[str] | list[str]) -> tuple[list[str], list[str]]:
    """Resolve ``@name`` mentions against a known-name set.

    At each ``@`` the longest known name that is a literal prefix of the
    remaining text wins, provided it ends at a word boundary (so ``@hat-trick``
    does not resolve against a known ``hat``). Matches are returned in order
    of first appearance, deduplicated; unresolved mentions come back as
    warnings, never failures. Names may contain spaces (context factors).
    """
    names = sorted(known_names, key=len, reverse=True)
    found: list[str] = []
    warnings: list[str] = []
    for match in re.finditer(r"@", text):
        rest = text[match.end():]
        hit = None
        for name in names:
            if rest.startswith(name):
                following = rest[len(name):len(name) + 1]
                if not following or not _MENTION_WORD_RE.match(following):
                    hit = name
                    break
        if hit is not None:
            if hit not in found:
                found.append(hit)
        else:
            word = _MENTION_WORD_RE.match(rest)
            if word:
                warnings.append("%s unknown" % word.group(0))
    return found, warnings


def parse_targets(rule_text: str, known_tags: set[str] | frozenset[str] | list[str]) -> tuple[list[str], list[str]]:
    """Tags targeted by a rule via ``@tag`` mentions, plus unknown-mention warnings."""
    return parse_mentions(rule_text, known_tags)


def parse_factor_refs(text: str, factors: list[str], strict: bool = False) -> tuple[list[str], list[str]]:
    """Factor names referenced by a mapping rule via ``@Factor`` mentions."""
    found, warnings = parse_mentions(text, factors)
    if strict and warnings and not found:
        raise UnknownFactorReference(
            "mapping references no known factor: %s" % "; ".join(warnings)
        )
    return found, warnings


def resolve_rules(project: "Project", phase: str) -> list[Rule]:
    """Deterministic prompt order for one phase's stored rules.

    Designer element-targeted rules come first (by creation), then designer
    global rules (by creation), then the system defaults in template element
    order. The assembled prompt's own overall-rules block states that
    designer rules outrank the defaults, so contradicted defaults are kept,
    never suppressed.
    """
    phase_rules = [r for r in project.rules if r.phase == phase]
    targeted = [r for r in phase_rules if r.source == SOURCE_DESIGNER and r.scope == SCOPE_TARGETED]
    global_rules = [r for r in phase_rules if r.source == SOURCE_DESIGNER and r.scope == SCOPE_GLOBAL]
    defaults = {r.targets[0]: r for r in phase_rules if r.source == SOURCE_SYSTEM and r.targets}

    by_creation = lambda r: (r.created_at, r.seq)
    ordered = sorted(targeted, key=by_creation) + sorted(global_rules, key=by_creation)
    for el in project.template.elements:
        if el.tag and el.tag in defaults:
            ordered.append(defaults.pop(el.tag))
    # defaults whose tag is no longer on any element keep their stored order at the end
    ordered.extend(sorted(defaults.values(), key=by_creation))
    return ordered
