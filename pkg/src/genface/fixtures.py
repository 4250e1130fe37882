"""Ready-made demo project: a language-learning agent face.

Used by the test suite, the README walkthrough, and ``genface demo-project``.
The template is a fox-like face with two shape-drawn eyes, a nose ellipse,
mouth and background areas, a flag area for learning feedback, and a hat;
rules and context factors follow the same scenario.
"""

from __future__ import annotations

from .project import Project, new_project
from .rulebook import PHASE_EXPRESSION, PHASE_FACE, SemanticTag, preset_tag
from .svg_model import Circle, Ellipse, PathGeometry, Rect, TemplateElement

FOX_FACE_PATH = "M110 100 L160 140 L240 140 L290 100 L300 220 L200 330 L100 220 Z"

WALKTHROUGH_INPUTS_FACE = {"Hobbies": "eating desserts", "Occupation": "student"}
WALKTHROUGH_INPUTS_EXPRESSION = {"Score": "85"}


def build_walkthrough_project(name: str = "language-learning-agent") -> Project:
    project = new_project(name)
    project.add_element(TemplateElement("background", "area", Rect(0, 0, 400, 400), "#e0e0e0"))
    project.add_element(TemplateElement("face", "imported-path", PathGeometry(FOX_FACE_PATH), "#bdbdbd"))
    project.add_element(TemplateElement("left-eye", "shape", Circle(150, 180, 30), "#bdbdbd"))
    project.add_element(TemplateElement("right-eye", "shape", Circle(250, 180, 30), "#bdbdbd"))
    project.add_element(TemplateElement("nose", "shape", Ellipse(200, 240, 25, 15), "#9e9e9e"))
    project.add_element(TemplateElement("mouth-area", "area", Rect(150, 270, 100, 40), "#757575"))
    project.add_element(TemplateElement("flag-area", "area", Rect(320, 40, 60, 80), "#9e9e9e"))
    project.add_element(TemplateElement("hat", "shape", Ellipse(200, 80, 90, 30), "#757575"))

    project.apply_tag("background", SemanticTag("solid-fill", "custom"))
    project.apply_tag("face", preset_tag("face"))
    project.apply_tag("left-eye", preset_tag("left-eye"))
    project.apply_tag("right-eye", preset_tag("right-eye"))
    project.apply_tag("nose", preset_tag("nose"))
    project.apply_tag("mouth-area", preset_tag("mouth"))
    project.apply_tag("flag-area", SemanticTag("flag", "custom"))
    project.apply_tag("hat", preset_tag("hat"))

    project.add_rule(
        PHASE_FACE,
        "@flag renders a waving flag with a brown pole and flag surface; "
        "show only when the face changes",
    )
    project.add_rule(
        PHASE_FACE,
        "@left-eye and @right-eye show white sclera and pupils with bright highlights",
    )
    project.add_rule(PHASE_FACE, "Keep a consistent overall color scheme.")

    project.define_context_factor(PHASE_FACE, "Hobbies")
    project.define_context_factor(PHASE_FACE, "Occupation")
    project.add_mapping_rule(
        PHASE_FACE,
        "Face/background fill varies with personality (e.g., brighter for extroverts); "
        "the hat's style/color varies with hobbies.",
    )

    project.define_context_factor(PHASE_EXPRESSION, "Score", description="exam performance")
    project.add_mapping_rule(
        PHASE_EXPRESSION,
        "@Score controls flag state: 80-100 bright red/strong wave; "
        "60-79 steady yellow; 1-59 drooping white",
    )
    project.add_mapping_rule(PHASE_EXPRESSION, "Mouth, pupils, and background fill vary with score.")
    return project
