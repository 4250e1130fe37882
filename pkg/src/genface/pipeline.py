"""Generation pipeline: drive a provider, sanitize, validate, hand off.

The mock provider is fully deterministic so the whole pipeline can be tested
and demonstrated offline: it echoes the prompt's template document,
recoloring each group through a stable hash of (group id, context values)
into a fixed non-grayscale palette, and in the expression phase it
additionally bends the mouth group with a hash-seeded curvature offset.
"""

from __future__ import annotations

import hashlib
import os
import re
from dataclasses import dataclass, field
from typing import TYPE_CHECKING
from xml.etree import ElementTree as ET

import httpx

from . import prompts, svg_model
from .errors import (
    GenfaceError,
    InvalidBase,
    MalformedSvg,
    NoSvgFound,
    ProviderError,
    ProviderRefusal,
    ProviderTimeout,
    TransportError,
    UnknownResult,
    UnsupportedGeometry,
)
from .prompts import PromptBundle
from .project import utc_now
from .rulebook import PHASE_EXPRESSION, PHASE_FACE
from .svg_model import Bounds, FaceTemplate, contains, element_bounds, format_number

if TYPE_CHECKING:
    from .project import Project

API_KEY_ENV = "GENFACE_API_KEY"
API_URL_ENV = "GENFACE_API_URL"

# fraction of the canvas min-dimension allowed as containment slack
DEFAULT_TOLERANCE_FRACTION = 0.02

MAX_INVALID_RETRIES = 2


@dataclass
class ProviderConfig:
    provider_kind: str = "mock"  # mock | remote-llm
    model_name: str = "mock-faces-1"
    temperature: float = 0.0
    endpoint: str = ""
    credentials_env: str = API_KEY_ENV
    timeout_s: float = 60.0
    candidates_per_test: int = 3
    retry_on_invalid: int = 0  # capped at MAX_INVALID_RETRIES

    def __post_init__(self) -> None:
        if self.candidates_per_test < 1:
            raise ValueError("candidates_per_test must be >= 1")
        self.retry_on_invalid = max(0, min(int(self.retry_on_invalid), MAX_INVALID_RETRIES))

    @classmethod
    def from_env(cls, environ=os.environ) -> "ProviderConfig":
        kind = environ.get("GENFACE_PROVIDER", "mock")
        return cls(
            provider_kind="remote-llm" if kind == "remote" else kind,
            endpoint=environ.get(API_URL_ENV, ""),
        )


# --- validation ---------------------------------------------------------------

E_MISSING_ID = "E_MISSING_ID"
E_DELETED_ELEMENT = "E_DELETED_ELEMENT"
E_EXTRA_ELEMENT = "E_EXTRA_ELEMENT"
E_OUT_OF_BOUNDS = "E_OUT_OF_BOUNDS"
E_TEMPLATE_COLOR_REUSE = "E_TEMPLATE_COLOR_REUSE"
E_WHITE_FACE = "E_WHITE_FACE"
E_NOT_SVG = "E_NOT_SVG"

VIOLATION_CODES = (
    E_MISSING_ID, E_DELETED_ELEMENT, E_EXTRA_ELEMENT,
    E_OUT_OF_BOUNDS, E_TEMPLATE_COLOR_REUSE, E_WHITE_FACE, E_NOT_SVG,
)


@dataclass(frozen=True)
class Violation:
    code: str
    element_id: str | None
    detail: str

    def to_dict(self) -> dict:
        return {"code": self.code, "element_id": self.element_id, "detail": self.detail}


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    violations: tuple[Violation, ...]

    def to_dict(self) -> dict:
        return {"valid": self.valid, "violations": [v.to_dict() for v in self.violations]}

    @classmethod
    def from_dict(cls, data: dict) -> "ValidationReport":
        return cls(
            valid=bool(data["valid"]),
            violations=tuple(
                Violation(v["code"], v.get("element_id"), v.get("detail", ""))
                for v in data.get("violations", [])
            ),
        )


def default_tolerance(template: FaceTemplate) -> float:
    return DEFAULT_TOLERANCE_FRACTION * min(template.canvas_width, template.canvas_height)


def _dominant_fill(primitives) -> str | None:
    """Fill of the largest-area primitive carrying an explicit fill paint."""
    best_area = -1.0
    best_fill: str | None = None
    stack = list(primitives)
    while stack:
        prim = stack.pop(0)
        stack.extend(prim.children)
        fill = prim.get("fill")
        if not fill or fill == "none":
            continue
        box = svg_model.primitive_bounds(prim)
        area = box.area() if box is not None else 0.0
        if area > best_area:
            best_area = area
            best_fill = svg_model.normalize_color(fill)
    return best_fill


def validate(svg_text: str, template: FaceTemplate, phase: str,
             tolerance_px: float | None = None) -> ValidationReport:
    """Check a generated face against the template's structural constraints."""
    if tolerance_px is None:
        tolerance_px = default_tolerance(template)
    doc = svg_model.parse_face_document(svg_text, template)
    violations: list[Violation] = []

    missing_code = E_DELETED_ELEMENT if phase == PHASE_EXPRESSION else E_MISSING_ID
    for el in template.elements:
        if el.id not in doc.groups:
            violations.append(Violation(
                missing_code, el.id, "no group for template element %r" % el.id,
            ))

    for foreign_id in doc.foreign:
        violations.append(Violation(
            E_EXTRA_ELEMENT, foreign_id,
            "element %r is not defined in the template" % foreign_id,
        ))

    for el in template.elements:
        group = doc.groups.get(el.id)
        if group is None:
            continue
        if el.tag == "face":
            continue  # face detail (eyelashes, eyebrows) may extend beyond the contour
        box = svg_model.group_bounds(group)
        if box is None:
            continue
        region = element_bounds(el)
        if not contains(region, box, tolerance_px):
            violations.append(Violation(
                E_OUT_OF_BOUNDS, el.id,
                "content box (%.1f, %.1f, %.1f, %.1f) exceeds element region "
                "(%.1f, %.1f, %.1f, %.1f) at tolerance %.1f"
                % (box.x, box.y, box.width, box.height,
                   region.x, region.y, region.width, region.height, tolerance_px),
            ))

    if phase == PHASE_FACE:
        palette = {svg_model.normalize_color(c) for c in template.palette}
        for el in template.elements:
            group = doc.groups.get(el.id)
            if group is None:
                continue
            reused = sorted({
                c for prim in group for c in svg_model.paint_colors(prim) if c in palette
            })
            if reused:
                violations.append(Violation(
                    E_TEMPLATE_COLOR_REUSE, el.id,
                    "template palette color(s) reused: %s" % ", ".join(reused),
                ))
        face_el = next((el for el in template.elements if el.tag == "face"), None)
        if face_el is not None and face_el.id in doc.groups:
            dominant = _dominant_fill(doc.groups[face_el.id])
            if dominant == "#ffffff":
                violations.append(Violation(
                    E_WHITE_FACE, face_el.id, "face dominant fill is pure white",
                ))

    return ValidationReport(valid=not violations, violations=tuple(violations))


# --- response sanitation --------------------------------------------------------

def sanitize(raw: str) -> str:
    """Strip code fences and prose around the SVG payload."""
    start = raw.find("<svg")
    if start < 0:
        raise NoSvgFound("response contains no <svg element")
    end_tag = raw.rfind("</svg>")
    if end_tag >= start:
        return raw[start:end_tag + len("</svg>")]
    self_close = raw.rfind("/>")
    if self_close > start:
        return raw[start:self_close + 2]
    raise NoSvgFound("response <svg element is never closed")


# --- providers -------------------------------------------------------------------

MOCK_PALETTE = (
    "#e74c3c", "#e67e22", "#f1c40f", "#2ecc71", "#1abc9c", "#3498db",
    "#9b59b6", "#fd79a8", "#6c5ce7", "#00b894", "#d63031", "#0984e3",
)

_CONTEXT_SUBSECTION = {
    PHASE_FACE: ("[Character Description]", "##Character Design Context"),
    PHASE_EXPRESSION: ("[Expression Description]", "Expression Shaping Context"),
}

_SVG_SECTION = {PHASE_FACE: "[SVG Template]", PHASE_EXPRESSION: "[Basic Character]"}

_PAINTABLE = {"circle", "ellipse", "rect", "path", "polygon", "polyline", "text"}


def _context_values(prompt: PromptBundle) -> list[str]:
    section, marker = _CONTEXT_SUBSECTION[prompt.phase]
    body = prompt.section(section)
    idx = body.find(marker)
    tail = body[idx + len(marker):].strip("\n") if idx >= 0 else ""
    values = []
    for line in tail.split("\n"):
        line = line.strip()
        if not line or line == prompts.EMPTY_SECTION:
            continue
        values.append(line.split(": ", 1)[1] if ": " in line else line)
    return values


def _mock_color(group_id: str, context_concat: str) -> tuple[str, bytes]:
    digest = hashlib.sha256(("%s|%s" % (group_id, context_concat)).encode("utf-8")).digest()
    return MOCK_PALETTE[digest[0] % len(MOCK_PALETTE)], digest


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


_GEOM_ORDER = ("cx", "cy", "r", "rx", "ry", "x", "y", "width", "height", "d",
               "x1", "y1", "x2", "y2", "points")


def _echo_attrs(node: ET.Element, color: str) -> str:
    parts = []
    for name in _GEOM_ORDER:
        if name in node.attrib:
            parts.append('%s="%s"' % (name, node.attrib[name]))
    for name in sorted(node.attrib):
        if name in _GEOM_ORDER or name in ("id", "fill", "stroke"):
            continue
        if name.startswith("data-") or name == "display":
            continue
        parts.append('%s="%s"' % (name, node.attrib[name]))
    if _local(node.tag) == "line":
        parts.append('stroke="%s"' % color)
    else:
        parts.append('fill="%s"' % color)
    return " ".join(parts)


def _mouth_path(nodes: list[ET.Element], digest: bytes) -> str | None:
    boxes = [svg_model.primitive_bounds(svg_model.primitive_from_node(n)) for n in nodes]
    boxes = [b for b in boxes if b is not None]
    if not boxes:
        return None
    box = boxes[0]
    for b in boxes[1:]:
        box = box.union(b)
    mid_y = box.y + box.height / 2
    offset = round((digest[1] - 127.5) / 127.5 * (box.height / 2), 2)
    return "M%s %s Q%s %s %s %s" % (
        format_number(round(box.x, 2)), format_number(round(mid_y, 2)),
        format_number(round(box.x + box.width / 2, 2)), format_number(round(mid_y + offset, 2)),
        format_number(round(box.x + box.width, 2)), format_number(round(mid_y, 2)),
    )


class MockProvider:
    """Deterministic offline stand-in for the generative backbone."""

    def generate(self, prompt: PromptBundle, cfg: ProviderConfig) -> str:
        source_svg = prompt.section(_SVG_SECTION[prompt.phase])
        context_concat = "|".join(_context_values(prompt))
        try:
            root = ET.fromstring(source_svg)
        except ET.ParseError as exc:
            raise ProviderRefusal("prompt template section is not SVG: %s" % exc) from exc

        width = root.get("width", "400")
        height = root.get("height", "400")
        lines = ['<svg xmlns="%s" width="%s" height="%s">' % (svg_model.SVG_NS, width, height)]
        for node in root:
            gid = node.get("id")
            if gid is None:
                continue
            color, digest = _mock_color(gid, context_concat)
            children = list(node) if _local(node.tag) == "g" else [node]
            lines.append('  <g id="%s">' % gid)
            if prompt.phase == PHASE_EXPRESSION and "mouth" in gid:
                d = _mouth_path(children, digest)
                if d is not None:
                    lines.append('    <path d="%s" fill="none" stroke="%s" stroke-width="4"/>' % (d, color))
                    lines.append("  </g>")
                    continue
            for child in children:
                name = _local(child.tag)
                if name in _PAINTABLE or name == "line":
                    lines.append("    <%s %s/>" % (name, _echo_attrs(child, color)))
                    continue
                # flatten nested containers conservatively
                for grandchild in child.iter():
                    if grandchild is child:
                        continue
                    sub = _local(grandchild.tag)
                    if sub in _PAINTABLE or sub == "line":
                        lines.append("    <%s %s/>" % (sub, _echo_attrs(grandchild, color)))
            lines.append("  </g>")
        lines.append("</svg>")
        return "\n".join(lines)


class RemoteProvider:
    """HTTPS JSON chat-completion client; credentials come from the environment."""

    def __init__(self, cfg: ProviderConfig, client: httpx.Client | None = None):
        self.cfg = cfg
        endpoint = cfg.endpoint or os.environ.get(API_URL_ENV, "")
        if not endpoint:
            raise TransportError("no provider endpoint configured (set %s)" % API_URL_ENV)
        self.endpoint = endpoint
        self._client = client

    def generate(self, prompt: PromptBundle, cfg: ProviderConfig) -> str:
        api_key = os.environ.get(cfg.credentials_env, "")
        headers = {"content-type": "application/json"}
        if api_key:
            headers["authorization"] = "Bearer %s" % api_key
        payload = {
            "model": cfg.model_name,
            "temperature": cfg.temperature,
            "messages": [{"role": "user", "content": prompt.full_text}],
        }
        client = self._client or httpx.Client(timeout=cfg.timeout_s)
        try:
            response = client.post(self.endpoint, json=payload, headers=headers)
        except httpx.TimeoutException as exc:
            raise ProviderTimeout("provider timed out after %ss" % cfg.timeout_s) from exc
        except httpx.HTTPError as exc:
            raise TransportError("provider transport failure: %s" % exc) from exc
        finally:
            if self._client is None:
                client.close()
        if response.status_code != 200:
            raise TransportError("provider returned HTTP %d" % response.status_code)
        try:
            text = response.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, ValueError) as exc:
            raise TransportError("malformed provider response") from exc
        if not text or not text.strip():
            raise ProviderRefusal("provider returned an empty response")
        return text


def make_provider(cfg: ProviderConfig):
    if cfg.provider_kind == "mock":
        return MockProvider()
    if cfg.provider_kind == "remote-llm":
        return RemoteProvider(cfg)
    raise ValueError("unknown provider kind %r" % cfg.provider_kind)


# --- results ----------------------------------------------------------------------

@dataclass
class GenerationResult:
    id: str
    phase: str
    prompt: PromptBundle
    raw_response: str
    svg: str | None
    report: ValidationReport | None
    created_at: str
    inputs: dict[str, str] = field(default_factory=dict)
    error: str | None = None

    @property
    def valid(self) -> bool:
        return self.report is not None and self.report.valid

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "phase": self.phase,
            "prompt": self.prompt.to_dict(),
            "raw_response": self.raw_response,
            "svg": self.svg,
            "report": self.report.to_dict() if self.report else None,
            "created_at": self.created_at,
            "inputs": dict(self.inputs),
            "error": self.error,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GenerationResult":
        return cls(
            id=data["id"],
            phase=data["phase"],
            prompt=PromptBundle.from_dict(data["prompt"]),
            raw_response=data.get("raw_response", ""),
            svg=data.get("svg"),
            report=ValidationReport.from_dict(data["report"]) if data.get("report") else None,
            created_at=data["created_at"],
            inputs=dict(data.get("inputs", {})),
            error=data.get("error"),
        )


def _one_candidate(project: "Project", bundle: PromptBundle, inputs: dict[str, str],
                   cfg: ProviderConfig, provider, tolerance_px: float | None) -> GenerationResult:
    raw = ""
    svg = None
    report = None
    error = None
    attempts = cfg.retry_on_invalid + 1
    try:
        for attempt in range(attempts):
            raw = provider.generate(bundle, cfg)
            svg = sanitize(raw)
            report = validate(svg, project.template, bundle.phase, tolerance_px)
            if report.valid or attempt + 1 == attempts:
                break
    except GenfaceError as exc:
        svg = None
        report = None
        error = "%s: %s" % (exc.code, exc)
    return GenerationResult(
        id=project.next_id("result"),
        phase=bundle.phase,
        prompt=bundle,
        raw_response=raw,
        svg=svg,
        report=report,
        created_at=utc_now(),
        inputs=dict(inputs),
        error=error,
    )


def run_test(project: "Project", phase: str, inputs: dict[str, str], cfg: ProviderConfig,
             provider=None, tolerance_px: float | None = None) -> list[GenerationResult]:
    """Assemble once, generate N candidates, validate each, persist all.

    Candidate failures (provider errors, unusable responses) are recorded on
    their result and never abort sibling candidates; invalid outputs are kept
    and flagged so designers can inspect them.
    """
    bundle = prompts.assemble(project, phase, inputs)
    if provider is None:
        provider = make_provider(cfg)
    results = [
        _one_candidate(project, bundle, inputs, cfg, provider, tolerance_px)
        for _ in range(cfg.candidates_per_test)
    ]
    project.append_history(results)
    return results


def select_as_base(project: "Project", result_id: str, override: bool = False) -> "Project":
    """Pin a valid face-phase result as the seed for expression generation."""
    from .project import BaseFace

    result = project.find_result(result_id)
    if result is None:
        raise UnknownResult("no result with id %r in project history" % result_id)
    if result.phase != PHASE_FACE:
        raise InvalidBase("result %r is %s output; the base must come from %s"
                          % (result_id, result.phase, PHASE_FACE))
    if result.svg is None:
        raise InvalidBase("result %r has no usable SVG" % result_id)
    if not result.valid and not override:
        raise InvalidBase(
            "result %r has validation violations; pass override to select it anyway" % result_id
        )
    project.base_face = BaseFace(svg=result.svg, source_result_id=result_id)
    return project
