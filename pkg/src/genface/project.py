"""Project state: template, tags, rules, factors, mappings, history, base face.

All edits go through methods here so the rule bookkeeping stays consistent:
tagging an element injects its default rule for both phases, re-tagging or
untagging removes the old defaults, deleting an element drops its tag state.
Identifiers are deterministic per-project counters so that an identical edit
sequence produces an identical project document.
"""

from __future__ import annotations

import datetime as dt
import re
from dataclasses import dataclass, field, replace

from . import rulebook, svg_model
from .errors import (
    DuplicateFactor,
    DuplicateId,
    EmptyRuleText,
    ImmutableRule,
    NotFound,
    TagInUse,
    UnknownElement,
    UnknownPhase,
)
from .rulebook import (
    PHASES,
    SCOPE_GLOBAL,
    SCOPE_TARGETED,
    SOURCE_DESIGNER,
    SOURCE_SYSTEM,
    ContextFactor,
    MappingRule,
    Rule,
    SemanticTag,
)
from .svg_model import FaceTemplate, TemplateElement

SCHEMA_VERSION = 1

HISTORY_CAP = 500


def utc_now() -> str:
    return dt.datetime.now(dt.timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ")


def slugify(name: str) -> str:
    slug = re.sub(r"[^a-z0-9-]+", "-", name.lower()).strip("-")
    return slug or "project"


@dataclass
class BaseFace:
    svg: str
    source_result_id: str

    def to_dict(self) -> dict:
        return {"svg": self.svg, "source_result_id": self.source_result_id}


@dataclass
class Project:
    id: str
    name: str
    template: FaceTemplate = field(default_factory=FaceTemplate)
    rules: list[Rule] = field(default_factory=list)
    factors: dict[str, list[ContextFactor]] = field(default_factory=lambda: {p: [] for p in PHASES})
    mapping_rules: dict[str, list[MappingRule]] = field(default_factory=lambda: {p: [] for p in PHASES})
    history: list = field(default_factory=list)  # list[GenerationResult]
    base_face: BaseFace | None = None
    schema_version: int = SCHEMA_VERSION
    revision: int = 1
    counters: dict[str, int] = field(default_factory=dict)
    extra: dict = field(default_factory=dict)  # unknown future fields, kept opaque

    # -- identifiers ---------------------------------------------------------

    def next_id(self, kind: str) -> str:
        n = self.counters.get(kind, 0) + 1
        self.counters[kind] = n
        return "%s-%d" % (kind, n)

    # -- template editing ------------------------------------------------------

    def _require_element(self, element_id: str) -> TemplateElement:
        el = self.template.element(element_id)
        if el is None:
            raise UnknownElement("no element with id %r" % element_id)
        return el

    def _set_elements(self, elements: tuple[TemplateElement, ...]) -> None:
        candidate = replace(self.template, elements=elements)
        candidate.validate()
        self.template = candidate

    def add_element(self, element: TemplateElement) -> TemplateElement:
        if self.template.element(element.id) is not None:
            raise DuplicateId("duplicate element id %r" % element.id)
        self._set_elements(self.template.elements + (element,))
        return element

    def update_element(self, element: TemplateElement) -> TemplateElement:
        self._require_element(element.id)
        self._set_elements(tuple(
            element if el.id == element.id else el for el in self.template.elements
        ))
        return element

    def remove_element(self, element_id: str) -> None:
        el = self._require_element(element_id)
        if el.tag:
            self.remove_tag(element_id)
        self._set_elements(tuple(e for e in self.template.elements if e.id != element_id))

    def reorder_elements(self, ordered_ids: list[str]) -> None:
        current = {el.id: el for el in self.template.elements}
        if sorted(ordered_ids) != sorted(current):
            raise UnknownElement("reorder list must contain exactly the element ids")
        self._set_elements(tuple(current[i] for i in ordered_ids))

    # -- tagging ---------------------------------------------------------------

    def apply_tag(self, element_id: str, tag: SemanticTag) -> list[Rule]:
        """Tag an element and inject its default rule for both phases.

        Returns the injected rules. Re-tagging an element first removes the
        prior default rules; a tag can be carried by at most one element so
        the derived prompt placeholder stays unique.
        """
        el = self._require_element(element_id)
        holder = self.element_with_tag(tag.name)
        if holder is not None and holder.id != element_id:
            raise TagInUse("tag %r is already applied to element %r" % (tag.name, holder.id))
        if el.tag:
            self._drop_default_rules(el.tag)
        self._set_elements(tuple(
            e.with_tag(tag.name) if e.id == element_id else e for e in self.template.elements
        ))
        now = utc_now()
        injected = []
        for phase in PHASES:
            rule = Rule(
                id=self.next_id("rule"),
                phase=phase,
                scope=SCOPE_TARGETED,
                targets=(tag.name,),
                text=rulebook.default_rule_text(tag.name, phase),
                source=SOURCE_SYSTEM,
                created_at=now,
                seq=self.next_seq(),
            )
            self.rules.append(rule)
            injected.append(rule)
        return injected

    def remove_tag(self, element_id: str) -> None:
        el = self._require_element(element_id)
        if not el.tag:
            return
        self._drop_default_rules(el.tag)
        self._set_elements(tuple(
            e.with_tag(None) if e.id == element_id else e for e in self.template.elements
        ))

    def _drop_default_rules(self, tag_name: str) -> None:
        self.rules = [
            r for r in self.rules
            if not (r.source == SOURCE_SYSTEM and r.targets == (tag_name,))
        ]

    def element_with_tag(self, tag_name: str) -> TemplateElement | None:
        for el in self.template.elements:
            if el.tag == tag_name:
                return el
        return None

    # -- designer rules ----------------------------------------------------------

    def next_seq(self) -> int:
        n = self.counters.get("seq", 0) + 1
        self.counters["seq"] = n
        return n

    def add_rule(self, phase: str, text: str, category: str | None = None) -> tuple[Rule, list[str]]:
        """Store a designer rule; scope is inferred from its ``@tag`` mentions."""
        if phase not in PHASES:
            raise UnknownPhase("unknown phase %r" % phase)
        targets, warnings = rulebook.parse_targets(text, set(self.template.tags()))
        rule = Rule(
            id=self.next_id("rule"),
            phase=phase,
            scope=SCOPE_TARGETED if targets else SCOPE_GLOBAL,
            targets=tuple(targets),
            text=text,
            source=SOURCE_DESIGNER,
            created_at=utc_now(),
            seq=self.next_seq(),
            category=category,
        )
        self.rules.append(rule)
        return rule, warnings

    def remove_rule(self, rule_id: str) -> None:
        before = len(self.rules)
        self.rules = [r for r in self.rules if r.id != rule_id]
        if len(self.rules) == before:
            raise NotFound("no rule with id %r" % rule_id)

    def update_rule(self, rule_id: str, text: str, category: str | None = None) -> tuple[Rule, list[str]]:
        """Rewrite a designer rule's text in place; id and creation order stay."""
        for i, rule in enumerate(self.rules):
            if rule.id != rule_id:
                continue
            if rule.source != SOURCE_DESIGNER:
                raise ImmutableRule("system default rules cannot be edited")
            targets, warnings = rulebook.parse_targets(text, set(self.template.tags()))
            updated = Rule(
                id=rule.id,
                phase=rule.phase,
                scope=SCOPE_TARGETED if targets else SCOPE_GLOBAL,
                targets=tuple(targets),
                text=text,
                source=rule.source,
                created_at=rule.created_at,
                seq=rule.seq,
                category=category if category is not None else rule.category,
            )
            self.rules[i] = updated
            return updated, warnings
        raise NotFound("no rule with id %r" % rule_id)

    # -- context factors and mapping rules ------------------------------------------

    def define_context_factor(self, phase: str, name: str, description: str = "",
                              sample_values: tuple[str, ...] = ()) -> ContextFactor:
        if phase not in PHASES:
            raise UnknownPhase("unknown phase %r" % phase)
        if not name.strip():
            raise DuplicateFactor("factor name must be non-empty")
        if any(f.name == name for f in self.factors[phase]):
            raise DuplicateFactor("factor %r already defined for %s" % (name, phase))
        origin = "preset" if name in rulebook.PRESET_FACTORS else "custom"
        factor = ContextFactor(name, origin, description, sample_values)
        self.factors[phase].append(factor)
        return factor

    def remove_context_factor(self, phase: str, name: str) -> None:
        factors = self.factors[phase]
        if not any(f.name == name for f in factors):
            raise NotFound("no factor %r for %s" % (name, phase))
        self.factors[phase] = [f for f in factors if f.name != name]

    def update_context_factor(self, phase: str, name: str, description: str,
                              sample_values: tuple[str, ...]) -> ContextFactor:
        for i, factor in enumerate(self.factors[phase]):
            if factor.name == name:
                updated = ContextFactor(factor.name, factor.origin, description, sample_values)
                self.factors[phase][i] = updated
                return updated
        raise NotFound("no factor %r for %s" % (name, phase))

    def factor_names(self, phase: str) -> list[str]:
        return [f.name for f in self.factors[phase]]

    def add_mapping_rule(self, phase: str, text: str, strict: bool = False) -> tuple[MappingRule, list[str]]:
        if phase not in PHASES:
            raise UnknownPhase("unknown phase %r" % phase)
        if not text.strip():
            raise EmptyRuleText("mapping rule text must be non-empty")
        refs, warnings = rulebook.parse_factor_refs(text, self.factor_names(phase), strict=strict)
        mapping = MappingRule(
            id=self.next_id("mapping"),
            phase=phase,
            text=text,
            referenced_factors=tuple(refs),
            created_at=utc_now(),
            seq=self.next_seq(),
        )
        self.mapping_rules[phase].append(mapping)
        return mapping, warnings

    def remove_mapping_rule(self, phase: str, mapping_id: str) -> None:
        mappings = self.mapping_rules[phase]
        if not any(m.id == mapping_id for m in mappings):
            raise NotFound("no mapping rule %r for %s" % (mapping_id, phase))
        self.mapping_rules[phase] = [m for m in mappings if m.id != mapping_id]

    def update_mapping_rule(self, phase: str, mapping_id: str, text: str,
                            strict: bool = False) -> tuple[MappingRule, list[str]]:
        if not text.strip():
            raise EmptyRuleText("mapping rule text must be non-empty")
        for i, mapping in enumerate(self.mapping_rules[phase]):
            if mapping.id == mapping_id:
                refs, warnings = rulebook.parse_factor_refs(
                    text, self.factor_names(phase), strict=strict)
                updated = MappingRule(
                    id=mapping.id,
                    phase=mapping.phase,
                    text=text,
                    referenced_factors=tuple(refs),
                    created_at=mapping.created_at,
                    seq=mapping.seq,
                )
                self.mapping_rules[phase][i] = updated
                return updated, warnings
        raise NotFound("no mapping rule %r for %s" % (mapping_id, phase))

    # -- history -------------------------------------------------------------------

    def append_history(self, results: list) -> None:
        self.history.extend(results)
        if len(self.history) > HISTORY_CAP:
            self.history = self.history[-HISTORY_CAP:]

    def find_result(self, result_id: str):
        for result in self.history:
            if result.id == result_id:
                return result
        return None

    # -- serialization ---------------------------------------------------------------

    def to_dict(self) -> dict:
        data = {
            "schema_version": self.schema_version,
            "id": self.id,
            "name": self.name,
            "revision": self.revision,
            "template_svg": svg_model.serialize_template(self.template),
            "rules": [r.to_dict() for r in self.rules],
            "factors": {p: [f.to_dict() for f in fs] for p, fs in self.factors.items()},
            "mapping_rules": {p: [m.to_dict() for m in ms] for p, ms in self.mapping_rules.items()},
            "history": [r.to_dict() for r in self.history],
            "base_face": self.base_face.to_dict() if self.base_face else None,
            "counters": dict(self.counters),
        }
        data.update(self.extra)
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "Project":
        from .pipeline import GenerationResult

        known = {
            "schema_version", "id", "name", "revision", "template_svg", "rules",
            "factors", "mapping_rules", "history", "base_face", "counters",
        }
        base = data.get("base_face")
        return cls(
            id=data["id"],
            name=data["name"],
            template=svg_model.parse_template(data["template_svg"]),
            rules=[Rule.from_dict(r) for r in data.get("rules", [])],
            factors={
                p: [ContextFactor.from_dict(f) for f in data.get("factors", {}).get(p, [])]
                for p in PHASES
            },
            mapping_rules={
                p: [MappingRule.from_dict(m) for m in data.get("mapping_rules", {}).get(p, [])]
                for p in PHASES
            },
            history=[GenerationResult.from_dict(r) for r in data.get("history", [])],
            base_face=BaseFace(base["svg"], base["source_result_id"]) if base else None,
            schema_version=int(data.get("schema_version", SCHEMA_VERSION)),
            revision=int(data.get("revision", 1)),
            counters={k: int(v) for k, v in data.get("counters", {}).items()},
            extra={k: v for k, v in data.items() if k not in known},
        )


def new_project(name: str, project_id: str | None = None) -> Project:
    return Project(id=project_id or slugify(name), name=name)
