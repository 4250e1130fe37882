"""Deterministic prompt assembly for both generation phases.

The two prompt skeletons ship as versioned data files with named slots
({{template}}, {{rules}}, {{mapping_rules}}, {{context}}). Assembly renders
each slot from project state and splits the finished text back into its
bracketed sections; ``full_text`` is always the concatenation of the
sections with single blank-line separators, byte-stable for identical
inputs.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from typing import TYPE_CHECKING

from . import svg_model
from .errors import EmptyTemplate, NoBaseSelected, UnknownFactor, UntaggedElement
from .rulebook import PHASE_EXPRESSION, PHASE_FACE, Rule, SOURCE_DESIGNER, resolve_rules

if TYPE_CHECKING:
    from .project import Project

EMPTY_SECTION = "(none specified)"

_SKELETON_FILES = {
    PHASE_FACE: "prompt_face.txt",
    PHASE_EXPRESSION: "prompt_expression.txt",
}

FACE_HEADERS = (
    "[Role]", "[SVG Template]", "[Design Rules]", "[Character Description]",
    "[Workflow]", "[Overall Rules]",
)
EXPRESSION_HEADERS = (
    "[Role]", "[Basic Character]", "[Design Specifications]", "[Expression Description]",
    "[Workflow]", "[Overall Rules]",
)

_HEADERS = {PHASE_FACE: FACE_HEADERS, PHASE_EXPRESSION: EXPRESSION_HEADERS}


def load_skeleton(phase: str) -> str:
    name = _SKELETON_FILES[phase]
    text = resources.files("genface.data").joinpath(name).read_text("utf-8")
    return text.rstrip("\n")


def split_sections(full_text: str, phase: str) -> list[tuple[str, str]]:
    """Split assembled text into (header, body) pairs at the bracketed headers."""
    headers = _HEADERS[phase]
    lines = full_text.split("\n")
    positions: list[int] = []
    cursor = 0
    for header in headers:
        while cursor < len(lines) and lines[cursor] != header:
            cursor += 1
        if cursor == len(lines):
            raise ValueError("section header %s missing from prompt" % header)
        positions.append(cursor)
        cursor += 1
    sections: list[tuple[str, str]] = []
    for idx, start in enumerate(positions):
        end = positions[idx + 1] if idx + 1 < len(positions) else len(lines)
        body = "\n".join(lines[start + 1:end]).strip("\n")
        sections.append((headers[idx], body))
    return sections


@dataclass(frozen=True)
class PromptBundle:
    phase: str
    sections: tuple[tuple[str, str], ...]
    full_text: str

    def section(self, header: str) -> str:
        for name, body in self.sections:
            if name == header:
                return body
        raise KeyError(header)

    def to_dict(self) -> dict:
        return {
            "phase": self.phase,
            "sections": [list(s) for s in self.sections],
            "full_text": self.full_text,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PromptBundle":
        return cls(
            phase=data["phase"],
            sections=tuple((s[0], s[1]) for s in data.get("sections", [])),
            full_text=data["full_text"],
        )


def render_rules_section(rules: list[Rule]) -> str:
    """One line per rule, labeled by who authored it."""
    if not rules:
        return EMPTY_SECTION
    lines = []
    for rule in rules:
        label = "Designer" if rule.source == SOURCE_DESIGNER else "Default"
        lines.append("%s: %s" % (label, rule.text))
    return "\n".join(lines)


def render_mapping_section(mappings: list) -> str:
    if not mappings:
        return EMPTY_SECTION
    return "\n".join(m.text for m in mappings)


def render_context_section(inputs: dict[str, str]) -> str:
    if not inputs:
        return EMPTY_SECTION
    return "\n".join("%s: %s" % (k, v) for k, v in inputs.items())


def _check_inputs(project: "Project", phase: str, inputs: dict[str, str],
                  allow_reserved: tuple[str, ...] = ()) -> None:
    declared = set(project.factor_names(phase)) | set(allow_reserved)
    for key in inputs:
        if key not in declared:
            raise UnknownFactor(
                "factor %r is not declared for %s (allowed: %s)"
                % (key, phase, ", ".join(sorted(declared)) or "none")
            )


_SLOT_RE = re.compile(r"\{\{(\w+)\}\}")


def _assemble(phase: str, slots: dict[str, str]) -> PromptBundle:
    skeleton = load_skeleton(phase)
    unfilled: set[str] = set()

    def fill(match: re.Match) -> str:
        name = match.group(1)
        if name not in slots:
            unfilled.add(name)
            return match.group(0)
        return slots[name]

    # single pass: substituted values are never rescanned for slots
    text = _SLOT_RE.sub(fill, skeleton)
    if unfilled:
        raise ValueError("unfilled skeleton slots: %s" % ", ".join(sorted(unfilled)))
    return PromptBundle(phase, tuple(split_sections(text, phase)), text)


def assemble_face_prompt(project: "Project", inputs: dict[str, str],
                         allow_reserved: tuple[str, ...] = ()) -> PromptBundle:
    """Phase-1 prompt: template with placeholder ids, resolved rules, context."""
    if not project.template.elements:
        raise EmptyTemplate("cannot assemble a prompt for an empty template")
    for el in project.template.elements:
        if not el.tag:
            raise UntaggedElement("element %r has no semantic tag" % el.id)
    _check_inputs(project, PHASE_FACE, inputs, allow_reserved)
    return _assemble(PHASE_FACE, {
        "template": svg_model.serialize_template(project.template, placeholder_ids=True),
        "rules": render_rules_section(resolve_rules(project, PHASE_FACE)),
        "mapping_rules": render_mapping_section(project.mapping_rules[PHASE_FACE]),
        "context": render_context_section(inputs),
    })


def assemble_expression_prompt(project: "Project", inputs: dict[str, str]) -> PromptBundle:
    """Phase-2 prompt: the selected base face verbatim, expression rules, context."""
    if project.base_face is None:
        raise NoBaseSelected("no base face selected; run a face test and select one")
    _check_inputs(project, PHASE_EXPRESSION, inputs)
    return _assemble(PHASE_EXPRESSION, {
        "template": project.base_face.svg,
        "rules": render_rules_section(resolve_rules(project, PHASE_EXPRESSION)),
        "mapping_rules": render_mapping_section(project.mapping_rules[PHASE_EXPRESSION]),
        "context": render_context_section(inputs),
    })


def assemble(project: "Project", phase: str, inputs: dict[str, str]) -> PromptBundle:
    if phase == PHASE_FACE:
        return assemble_face_prompt(project, inputs)
    if phase == PHASE_EXPRESSION:
        return assemble_expression_prompt(project, inputs)
    raise ValueError("unknown phase %r" % phase)
