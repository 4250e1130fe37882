"""Meta-design toolkit for generative facial expression interfaces.

Designers author an SVG face template, semantic tags, design rules, and
context mapping rules; the engine assembles phase-specific prompts, drives a
text-generation provider (or a deterministic mock), validates every output
against the template's structural constraints, and deploys validated faces
to live display clients.
"""

from .errors import GenfaceError
from .pipeline import (
    GenerationResult,
    MockProvider,
    ProviderConfig,
    RemoteProvider,
    ValidationReport,
    Violation,
    run_test,
    sanitize,
    select_as_base,
    validate,
)
from .project import Project, new_project
from .prompts import (
    PromptBundle,
    assemble_expression_prompt,
    assemble_face_prompt,
)
from .rulebook import (
    PHASE_EXPRESSION,
    PHASE_FACE,
    PRESET_FACTORS,
    PRESET_TAGS,
    ContextFactor,
    MappingRule,
    Rule,
    SemanticTag,
    default_rule_text,
    parse_targets,
    placeholder_for,
    preset_tag,
    resolve_rules,
)
from .store import DeployBundle, ProjectStore, export_bundle, load_project_file, save_project_file
from .svg_model import (
    Bounds,
    Circle,
    Ellipse,
    FaceDocument,
    FaceTemplate,
    PathGeometry,
    Rect,
    TemplateElement,
    contains,
    element_bounds,
    parse_face_document,
    parse_template,
    serialize_template,
)

__version__ = "0.1.0"

__all__ = [
    "Bounds",
    "Circle",
    "ContextFactor",
    "DeployBundle",
    "Ellipse",
    "FaceDocument",
    "FaceTemplate",
    "GenerationResult",
    "GenfaceError",
    "MappingRule",
    "MockProvider",
    "PathGeometry",
    "PHASE_EXPRESSION",
    "PHASE_FACE",
    "PRESET_FACTORS",
    "PRESET_TAGS",
    "Project",
    "ProjectStore",
    "PromptBundle",
    "ProviderConfig",
    "Rect",
    "RemoteProvider",
    "Rule",
    "SemanticTag",
    "TemplateElement",
    "ValidationReport",
    "Violation",
    "assemble_expression_prompt",
    "assemble_face_prompt",
    "contains",
    "default_rule_text",
    "element_bounds",
    "export_bundle",
    "load_project_file",
    "new_project",
    "parse_face_document",
    "parse_targets",
    "parse_template",
    "placeholder_for",
    "preset_tag",
    "resolve_rules",
    "run_test",
    "sanitize",
    "save_project_file",
    "select_as_base",
    "serialize_template",
    "validate",
]
