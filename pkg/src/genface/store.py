"""Versioned on-disk persistence for projects and deployable bundles.

One JSON document per project (``<id>.gpfei.json``), written atomically via
temp-file rename, guarded by a sha256 content checksum and a schema version.
A deploy bundle (``<id>.bundle.json``) is a self-contained snapshot: base
face, template, the expression-phase prompt skeleton prefilled with the
project's rules and mapping rules, and the factor schema. The runtime needs
nothing else to serve a deployed face.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import tempfile
import threading
from dataclasses import dataclass
from pathlib import Path

from . import prompts, svg_model
from .errors import CorruptFile, NoBaseSelected, NotFound, SchemaTooNew
from .project import SCHEMA_VERSION, Project
from .prompts import render_context_section, render_mapping_section, render_rules_section
from .rulebook import PHASE_EXPRESSION, resolve_rules

BUNDLE_SCHEMA_VERSION = 1

_SLOT_RE = re.compile(r"\{\{(\w+)\}\}")


def _checksum(payload: dict) -> str:
    canonical = json.dumps(payload, sort_keys=True, ensure_ascii=False, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
            handle.flush()
            os.fsync(handle.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dump_project(project: Project) -> str:
    payload = project.to_dict()
    document = {"checksum": _checksum(payload), **payload}
    return json.dumps(document, indent=2, ensure_ascii=False) + "\n"


def parse_project(text: str, source: str = "<memory>") -> Project:
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorruptFile("%s is not valid JSON: %s" % (source, exc)) from exc
    if not isinstance(document, dict) or "checksum" not in document:
        raise CorruptFile("%s has no checksum field" % source)
    stored = document.pop("checksum")
    if _checksum(document) != stored:
        raise CorruptFile("%s failed its checksum; the file is corrupt" % source)
    version = int(document.get("schema_version", 0))
    if version > SCHEMA_VERSION:
        raise SchemaTooNew(
            "%s has schema_version %d; this build reads up to %d"
            % (source, version, SCHEMA_VERSION)
        )
    return Project.from_dict(document)


def load_project_file(path: str | Path) -> Project:
    path = Path(path)
    if not path.exists():
        raise NotFound("no project file at %s" % path)
    return parse_project(path.read_text(encoding="utf-8"), str(path))


def save_project_file(project: Project, path: str | Path) -> None:
    _atomic_write(Path(path), dump_project(project))


class ProjectStore:
    """Directory of project files with per-project write serialization."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def path(self, project_id: str) -> Path:
        return self.root / ("%s.gpfei.json" % project_id)

    def lock(self, project_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(project_id, threading.Lock())

    def save(self, project: Project) -> Path:
        path = self.path(project.id)
        with self.lock(project.id):
            save_project_file(project, path)
        return path

    def load(self, project_id: str) -> Project:
        path = self.path(project_id)
        if not path.exists():
            raise NotFound("no project with id %r" % project_id)
        return parse_project(path.read_text(encoding="utf-8"), str(path))

    def delete(self, project_id: str) -> None:
        path = self.path(project_id)
        if not path.exists():
            raise NotFound("no project with id %r" % project_id)
        with self.lock(project_id):
            path.unlink()

    def list_ids(self) -> list[str]:
        return sorted(p.name[:-len(".gpfei.json")] for p in self.root.glob("*.gpfei.json"))

    def exists(self, project_id: str) -> bool:
        return self.path(project_id).exists()


# --- deploy bundles -----------------------------------------------------------------

@dataclass
class DeployBundle:
    project_id: str
    base_face_svg: str
    template_svg: str
    prefilled_skeleton: str  # expression skeleton with only {{context}} open
    context_slot_offset: int  # char offset of {{context}} in prefilled_skeleton
    factor_schema: list[dict]
    schema_version: int = BUNDLE_SCHEMA_VERSION

    def render_prompt(self, inputs: dict[str, str]) -> str:
        # splice at the recorded offset; embedded SVG text could contain
        # slot-shaped substrings, so a textual replace is not safe
        off = self.context_slot_offset
        slot = "{{context}}"
        if self.prefilled_skeleton[off:off + len(slot)] != slot:
            raise CorruptFile("bundle context slot offset does not point at an open slot")
        return (
            self.prefilled_skeleton[:off]
            + render_context_section(inputs)
            + self.prefilled_skeleton[off + len(slot):]
        )

    def factor_names(self) -> list[str]:
        return [f["name"] for f in self.factor_schema]

    def to_dict(self) -> dict:
        payload = {
            "schema_version": self.schema_version,
            "project_id": self.project_id,
            "base_face_svg": self.base_face_svg,
            "template_svg": self.template_svg,
            "prefilled_skeleton": self.prefilled_skeleton,
            "context_slot_offset": self.context_slot_offset,
            "factor_schema": self.factor_schema,
        }
        return {"checksum": _checksum(payload), **payload}

    @classmethod
    def from_dict(cls, document: dict, source: str = "<memory>") -> "DeployBundle":
        document = dict(document)
        stored = document.pop("checksum", None)
        if stored is None or _checksum(document) != stored:
            raise CorruptFile("%s failed its checksum" % source)
        return cls(
            project_id=document["project_id"],
            base_face_svg=document["base_face_svg"],
            template_svg=document["template_svg"],
            prefilled_skeleton=document["prefilled_skeleton"],
            context_slot_offset=int(document["context_slot_offset"]),
            factor_schema=list(document["factor_schema"]),
            schema_version=int(document["schema_version"]),
        )


def export_bundle(project: Project) -> DeployBundle:
    """Freeze everything the expression runtime needs into one document."""
    if project.base_face is None:
        raise NoBaseSelected("select a base face before exporting a deploy bundle")
    skeleton = prompts.load_skeleton(PHASE_EXPRESSION)

    values = {
        "template": project.base_face.svg,
        "rules": render_rules_section(resolve_rules(project, PHASE_EXPRESSION)),
        "mapping_rules": render_mapping_section(project.mapping_rules[PHASE_EXPRESSION]),
    }
    pieces: list[str] = []
    cursor = 0
    length = 0
    context_offset = -1
    for match in _SLOT_RE.finditer(skeleton):
        pieces.append(skeleton[cursor:match.start()])
        length += match.start() - cursor
        name = match.group(1)
        if name == "context":
            context_offset = length
            pieces.append(match.group(0))  # stays open for run time
            length += len(match.group(0))
        else:
            pieces.append(values[name])
            length += len(values[name])
        cursor = match.end()
    pieces.append(skeleton[cursor:])
    if context_offset < 0:
        raise ValueError("expression skeleton has no context slot")

    return DeployBundle(
        project_id=project.id,
        base_face_svg=project.base_face.svg,
        template_svg=svg_model.serialize_template(project.template),
        prefilled_skeleton="".join(pieces),
        context_slot_offset=context_offset,
        factor_schema=[f.to_dict() for f in project.factors[PHASE_EXPRESSION]],
    )


def save_bundle_file(bundle: DeployBundle, path: str | Path) -> None:
    _atomic_write(Path(path), json.dumps(bundle.to_dict(), indent=2, ensure_ascii=False) + "\n")


def load_bundle_file(path: str | Path) -> DeployBundle:
    path = Path(path)
    if not path.exists():
        raise NotFound("no bundle file at %s" % path)
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CorruptFile("%s is not valid JSON: %s" % (path, exc)) from exc
    return DeployBundle.from_dict(document, str(path))
