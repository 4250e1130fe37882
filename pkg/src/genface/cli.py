"""Headless access for CI and scripting.

Stdout carries machine-readable JSON (or raw prompt/SVG text where that is
the artifact); errors go to stderr as one JSON object. Exit codes: 0 ok,
2 usage or IO failure, 3 validation violations found.

Besides the core commands (assemble, validate, generate, export, serve)
there is a ``project`` group mirroring the HTTP editing surface, so a whole
design session can be scripted against a project file.
"""

from __future__ import annotations

import json
import sys
from dataclasses import replace
from pathlib import Path

import click

from . import fixtures, pipeline, prompts, store as store_mod, svg_model
from .errors import GenfaceError, MalformedSvg, NoSvgFound
from .pipeline import E_NOT_SVG, ProviderConfig, ValidationReport, Violation
from .project import new_project
from .rulebook import PHASES, SemanticTag
from .store import export_bundle, load_project_file, save_bundle_file, save_project_file

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INVALID = 3


def _fail(error: GenfaceError | str, code: str = "E_USAGE") -> None:
    payload = error.to_dict() if isinstance(error, GenfaceError) else {"error": code, "detail": error}
    click.echo(json.dumps(payload), err=True)
    sys.exit(EXIT_USAGE)


def _parse_inputs(raw: str) -> dict[str, str]:
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        _fail("--inputs is not valid JSON: %s" % exc)
    if not isinstance(data, dict):
        _fail("--inputs must be a JSON object of factor -> value")
    return {str(k): str(v) for k, v in data.items()}


def _load_project(path: str):
    try:
        return load_project_file(path)
    except GenfaceError as exc:
        _fail(exc)


def _emit(payload: dict, pretty: bool) -> None:
    click.echo(json.dumps(payload, indent=2 if pretty else None, ensure_ascii=False))


phase_option = click.option("--phase", "-p", type=click.Choice(PHASES), required=True)
inputs_option = click.option("--inputs", "-i", default="{}", help="JSON object of factor -> value")
pretty_option = click.option("--pretty", is_flag=True, help="indent JSON output for humans")


@click.group()
def main() -> None:
    """Design-to-deployment toolkit for generative face interfaces."""


@main.command()
@click.option("--project", "-f", "project_path", required=True, type=click.Path())
@phase_option
@inputs_option
def assemble(project_path: str, phase: str, inputs: str) -> None:
    """Print the assembled prompt text for one phase."""
    project = _load_project(project_path)
    try:
        bundle = prompts.assemble(project, phase, _parse_inputs(inputs))
    except GenfaceError as exc:
        _fail(exc)
    click.echo(bundle.full_text)


@main.command()
@click.option("--template", "-t", "template_path", required=True, type=click.Path())
@click.option("--svg", "-s", "svg_path", required=True, type=click.Path())
@phase_option
@click.option("--tolerance", type=float, default=None, help="containment slack in px")
@pretty_option
def validate(template_path: str, svg_path: str, phase: str, tolerance: float | None,
             pretty: bool) -> None:
    """Check a generated SVG against a template; exit 3 on violations."""
    try:
        template = svg_model.parse_template(Path(template_path).read_text(encoding="utf-8"))
        svg_text = Path(svg_path).read_text(encoding="utf-8")
    except OSError as exc:
        _fail(str(exc), code="E_IO")
    except GenfaceError as exc:
        _fail(exc)
    try:
        report = pipeline.validate(pipeline.sanitize(svg_text), template, phase, tolerance)
    except (NoSvgFound, MalformedSvg) as exc:
        report = ValidationReport(False, (Violation(E_NOT_SVG, None, str(exc)),))
    _emit(report.to_dict(), pretty)
    sys.exit(EXIT_OK if report.valid else EXIT_INVALID)


@main.command()
@click.option("--project", "-f", "project_path", required=True, type=click.Path())
@phase_option
@inputs_option
@click.option("--provider", type=click.Choice(["mock", "remote"]), default="mock")
@click.option("-n", "candidates", type=click.IntRange(1, 10), default=None,
              help="candidates per test (default 3)")
@click.option("--out", "-o", "out_dir", type=click.Path(), default="results")
@pretty_option
def generate(project_path: str, phase: str, inputs: str, provider: str,
             candidates: int | None, out_dir: str, pretty: bool) -> None:
    """Run a generation test; writes SVGs and reports, updates project history."""
    project = _load_project(project_path)
    cfg = ProviderConfig(provider_kind="remote-llm" if provider == "remote" else "mock")
    if candidates is not None:
        cfg = replace(cfg, candidates_per_test=candidates)
    try:
        results = pipeline.run_test(project, phase, _parse_inputs(inputs), cfg)
        save_project_file(project, project_path)
    except GenfaceError as exc:
        _fail(exc)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    summary = []
    for result in results:
        base = out / result.id
        if result.svg is not None:
            base.with_suffix(".svg").write_text(result.svg, encoding="utf-8")
        report_payload = {
            "id": result.id,
            "phase": result.phase,
            "error": result.error,
            "report": result.report.to_dict() if result.report else None,
        }
        base.with_suffix(".report.json").write_text(
            json.dumps(report_payload, indent=2), encoding="utf-8")
        summary.append({"id": result.id, "valid": result.valid,
                        "svg": str(base.with_suffix(".svg")) if result.svg else None,
                        "error": result.error})
    _emit({"results": summary}, pretty)
    sys.exit(EXIT_OK if any(r["valid"] for r in summary) else EXIT_INVALID)


@main.command()
@click.option("--project", "-f", "project_path", required=True, type=click.Path())
@click.option("--out", "-o", "out_path", required=True, type=click.Path())
@pretty_option
def export(project_path: str, out_path: str, pretty: bool) -> None:
    """Write the self-contained deploy bundle for a project."""
    project = _load_project(project_path)
    try:
        bundle = export_bundle(project)
    except GenfaceError as exc:
        _fail(exc)
    save_bundle_file(bundle, out_path)
    _emit({"bundle": out_path, "project_id": bundle.project_id,
           "factors": bundle.factor_names()}, pretty)


@main.command()
@click.option("--bind", default=None, help="addr:port (default GENFACE_BIND or 127.0.0.1:8777)")
@click.option("--data-dir", default=None, type=click.Path())
def serve(bind: str | None, data_dir: str | None) -> None:
    """Run the studio API server."""
    import os

    import uvicorn

    from .service import create_app

    bind = bind or os.environ.get("GENFACE_BIND", "127.0.0.1:8777")
    host, _, port = bind.rpartition(":")
    uvicorn.run(create_app(data_dir=data_dir), host=host or "127.0.0.1", port=int(port))


@main.command("demo-project")
@click.option("--out", "-o", "out_path", required=True, type=click.Path())
def demo_project(out_path: str) -> None:
    """Write the built-in walkthrough project file."""
    project = fixtures.build_walkthrough_project()
    save_project_file(project, out_path)
    click.echo(json.dumps({"project": out_path, "id": project.id}))


# --- scripted project editing ------------------------------------------------------


@main.group()
def project() -> None:
    """Create and edit project files without the studio."""


def _edit(project_path: str, fn) -> dict:
    p = _load_project(project_path)
    try:
        outcome = fn(p)
    except GenfaceError as exc:
        _fail(exc)
    p.revision += 1
    save_project_file(p, project_path)
    return outcome


@project.command("new")
@click.argument("name")
@click.option("--out", "-o", "out_path", required=True, type=click.Path())
def project_new(name: str, out_path: str) -> None:
    p = new_project(name)
    save_project_file(p, out_path)
    click.echo(json.dumps({"id": p.id, "project": out_path}))


@project.command("add-element")
@click.option("--project", "-f", "project_path", required=True, type=click.Path())
@click.option("--spec", "-e", "element_json", required=True,
              help='element JSON, e.g. {"id":"eye","kind":"shape","geometry":{...},"fill":"#bdbdbd"}')
def project_add_element(project_path: str, element_json: str) -> None:
    try:
        data = json.loads(element_json)
    except json.JSONDecodeError as exc:
        _fail("--spec is not valid JSON: %s" % exc)
    outcome = _edit(project_path, lambda p: p.add_element(svg_model.element_from_dict(data)))
    click.echo(json.dumps({"added": outcome.id}))


@project.command("tag")
@click.option("--project", "-f", "project_path", required=True, type=click.Path())
@click.option("--element", "-e", "element_id", required=True)
@click.option("--name", "-n", "tag_name", required=True)
@click.option("--category", "-c", required=True,
              type=click.Choice(["organ", "decoration", "context", "custom"]))
def project_tag(project_path: str, element_id: str, tag_name: str, category: str) -> None:
    def apply(p):
        return p.apply_tag(element_id, SemanticTag(tag_name, category))
    injected = _edit(project_path, apply)
    click.echo(json.dumps({"injected_rules": [r.id for r in injected]}))


@project.command("add-rule")
@click.option("--project", "-f", "project_path", required=True, type=click.Path())
@phase_option
@click.argument("text")
def project_add_rule(project_path: str, phase: str, text: str) -> None:
    rule, warnings = _edit(project_path, lambda p: p.add_rule(phase, text))
    click.echo(json.dumps({"rule": rule.id, "targets": list(rule.targets), "warnings": warnings}))


@project.command("add-factor")
@click.option("--project", "-f", "project_path", required=True, type=click.Path())
@phase_option
@click.argument("name")
@click.option("--description", default="")
def project_add_factor(project_path: str, phase: str, name: str, description: str) -> None:
    factor = _edit(project_path, lambda p: p.define_context_factor(phase, name, description))
    click.echo(json.dumps({"factor": factor.name, "origin": factor.origin}))


@project.command("add-mapping")
@click.option("--project", "-f", "project_path", required=True, type=click.Path())
@phase_option
@click.argument("text")
def project_add_mapping(project_path: str, phase: str, text: str) -> None:
    mapping, warnings = _edit(project_path, lambda p: p.add_mapping_rule(phase, text))
    click.echo(json.dumps({"mapping": mapping.id,
                           "referenced_factors": list(mapping.referenced_factors),
                           "warnings": warnings}))


@project.command("select-base")
@click.option("--project", "-f", "project_path", required=True, type=click.Path())
@click.option("--result", "-r", "result_id", required=True)
@click.option("--override", is_flag=True)
def project_select_base(project_path: str, result_id: str, override: bool) -> None:
    _edit(project_path, lambda p: pipeline.select_as_base(p, result_id, override=override))
    click.echo(json.dumps({"base": result_id}))


if __name__ == "__main__":
    main()
