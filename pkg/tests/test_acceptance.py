"""Acceptance suite: one test per release criterion, one printed line each.

Run with ``pytest tests/test_acceptance.py -v`` (the PASS/FAIL lines are
written straight to the terminal, bypassing capture).
"""

from __future__ import annotations

import contextlib
import random
import sys
import threading
import time
from pathlib import Path

import httpx
import pytest
from fastapi.testclient import TestClient

import genface as gf
from genface.fixtures import (
    WALKTHROUGH_INPUTS_EXPRESSION,
    WALKTHROUGH_INPUTS_FACE,
    build_walkthrough_project,
)
from genface.pipeline import default_tolerance
from genface.rulebook import PHASE_EXPRESSION, PHASE_FACE, PRESET_TAG_NAMES
from genface.service import create_app
from genface.store import ProjectStore, dump_project, parse_project
from genface.errors import CorruptFile

from .corpus import CORPUS, CORPUS_TEMPLATE, CORPUS_TEMPLATE_SVG
from .generators import random_project
from .live_server import LiveServer, collect_stream_frames
from .oracles import brute_force_validate
from .test_service import DropMouthOnCall

GOLDEN = Path(__file__).parent / "data" / "golden"

RESULTS: list[tuple[str, bool]] = []  # printed by the terminal-summary hook


@contextlib.contextmanager
def criterion(name: str):
    try:
        yield
    except BaseException:
        RESULTS.append((name, False))
        print("ACCEPTANCE %-20s FAIL" % name, file=sys.__stdout__, flush=True)
        raise
    RESULTS.append((name, True))
    print("ACCEPTANCE %-20s PASS" % name, file=sys.__stdout__, flush=True)


def test_prompt_fidelity():
    with criterion("prompt-fidelity"):
        started = time.perf_counter()
        project = build_walkthrough_project()
        face = gf.assemble_face_prompt(project, WALKTHROUGH_INPUTS_FACE)
        assert face.full_text == (GOLDEN / "face_prompt.txt").read_text(encoding="utf-8")

        results = gf.run_test(project, PHASE_FACE, WALKTHROUGH_INPUTS_FACE, gf.ProviderConfig())
        gf.select_as_base(project, results[0].id)
        expr = gf.assemble_expression_prompt(project, WALKTHROUGH_INPUTS_EXPRESSION)
        assert expr.full_text == (GOLDEN / "expression_prompt.txt").read_text(encoding="utf-8")
        assert time.perf_counter() - started < 1.0


def test_default_rule_fidelity():
    with criterion("default-rules"):
        import json
        from importlib import resources

        shipped = json.loads(
            resources.files("genface.data").joinpath("default_rules.json").read_text("utf-8")
        )
        matches = 0
        for tag in sorted(PRESET_TAG_NAMES):
            for phase in (PHASE_FACE, PHASE_EXPRESSION):
                if gf.default_rule_text(tag, phase) == shipped[phase][tag]:
                    matches += 1
        assert matches == 30, "expected 30/30 exact matches, got %d" % matches


def test_precedence_property():
    with criterion("rule-precedence"):
        for seed in range(200):
            project = random_project(random.Random(seed))
            for phase in (PHASE_FACE, PHASE_EXPRESSION):
                runs = [gf.resolve_rules(project, phase) for _ in range(3)]
                first = [r.id for r in runs[0]]
                assert all([r.id for r in run] == first for run in runs[1:]), "non-deterministic"
                stored = sorted(r.id for r in project.rules if r.phase == phase)
                assert sorted(first) == stored, "not a permutation"
                ranks = [
                    0 if (r.source == "designer" and r.scope == "targeted")
                    else 1 if r.source == "designer" else 2
                    for r in runs[0]
                ]
                assert ranks == sorted(ranks), "targeted > global > default violated"


def test_validator_corpus():
    with criterion("validator-corpus"):
        started = time.perf_counter()
        assert len(CORPUS) >= 12
        tolerance = default_tolerance(CORPUS_TEMPLATE)
        for name, (phase, svg, expected) in CORPUS.items():
            report = gf.validate(svg, CORPUS_TEMPLATE, phase)
            got = sorted((v.code, v.element_id) for v in report.violations)
            assert got == sorted(expected), name
            reference = brute_force_validate(
                svg, CORPUS_TEMPLATE_SVG, phase, tolerance, CORPUS_TEMPLATE.palette)
            assert got == sorted(reference), "reference checker disagrees on %s" % name
        assert time.perf_counter() - started < 5.0


def test_end_to_end_handoff():
    with criterion("handoff"):
        def run_once() -> tuple[list[str], list[str]]:
            project = build_walkthrough_project()
            cfg = gf.ProviderConfig(candidates_per_test=3)
            face_results = gf.run_test(project, PHASE_FACE, WALKTHROUGH_INPUTS_FACE, cfg)
            assert all(r.valid for r in face_results)
            gf.select_as_base(project, face_results[0].id)
            expr_results = gf.run_test(
                project, PHASE_EXPRESSION, WALKTHROUGH_INPUTS_EXPRESSION, cfg)
            template_ids = {el.id for el in project.template.elements}
            for result in expr_results:
                assert result.valid
                doc = gf.parse_face_document(result.svg, project.template)
                assert template_ids <= set(doc.groups)
            return [r.svg for r in face_results], [r.svg for r in expr_results]

        first_faces, first_exprs = run_once()
        second_faces, second_exprs = run_once()
        assert first_faces == second_faces and first_exprs == second_exprs


def test_deploy_loop(tmp_path):
    with criterion("deploy-loop"):
        started = time.perf_counter()
        project = build_walkthrough_project()
        ProjectStore(tmp_path).save(project)
        provider = DropMouthOnCall(fail_on=4)  # base test, then pushes; push #3 invalid
        app = create_app(data_dir=tmp_path,
                         provider_cfg=gf.ProviderConfig(candidates_per_test=1),
                         provider=provider)

        with TestClient(app) as client:
            face = client.post("/api/v1/projects/%s/tests" % project.id,
                               json={"phase": PHASE_FACE,
                                     "inputs": WALKTHROUGH_INPUTS_FACE}).json()
            client.post("/api/v1/projects/%s/base" % project.id,
                        json={"result_id": face["results"][0]["id"]})
            token = client.post("/api/v1/projects/%s/deploy" % project.id).json()["token"]

        with LiveServer(app) as live:
            url = live.base_url + "/api/v1/deploy/%s/stream" % token
            frames_a, frames_b = [], []
            ready_a, ready_b = threading.Event(), threading.Event()
            readers = [
                threading.Thread(target=collect_stream_frames,
                                 args=(url, 5, frames, ready), daemon=True)
                for frames, ready in ((frames_a, ready_a), (frames_b, ready_b))
            ]
            for reader in readers:
                reader.start()
            assert ready_a.wait(10) and ready_b.wait(10)

            statuses = []
            before_invalid = None
            for score in ("5", "40", "62", "85", "97"):
                response = httpx.post(
                    live.base_url + "/api/v1/deploy/%s/context" % token,
                    json={"Score": score}, timeout=30)
                statuses.append(response.status_code)
                if response.status_code == 422:
                    face_now = httpx.get(
                        live.base_url + "/api/v1/deploy/%s/face" % token, timeout=30).text
                    before_invalid = face_now
            for reader in readers:
                reader.join(timeout=20)

        assert statuses.count(200) == 4 and statuses.count(422) == 1
        assert frames_a == frames_b and len(frames_a) == 5
        seqs = [f["seq"] for f in frames_a]
        assert all(b > a for a, b in zip(seqs, seqs[1:])), "seq not strictly increasing"
        for frame in frames_a:
            assert gf.validate(frame["svg"], project.template, PHASE_EXPRESSION).valid
        # the invalid push left the previously broadcast face in place
        failed_at = statuses.index(422)
        assert before_invalid == frames_a[failed_at]["svg"]
        assert time.perf_counter() - started < 10.0


def test_persistence(tmp_path):
    with criterion("persistence"):
        store = ProjectStore(tmp_path)
        for seed in range(50):
            project = random_project(random.Random(7000 + seed))
            store.save(project)
            assert store.load(project.id).to_dict() == project.to_dict()

        victim = random_project(random.Random(1))
        text = dump_project(victim)
        idx = text.find('"name"') + 10
        corrupted = text[:idx] + chr(ord(text[idx]) ^ 1) + text[idx + 1:]
        with pytest.raises(CorruptFile):
            parse_project(corrupted)
