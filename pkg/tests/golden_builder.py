"""Hand-assembly oracle for the walkthrough golden files.

Builds the two walkthrough prompts and the expected mock base face by
literal construction: prompt skeleton text, section bodies, element lines,
and hash colors are all spelled out here, independent of the assembler and
provider implementations. ``python -m tests.golden_builder --write``
regenerates the frozen files under ``tests/data/golden/``; the test suite
asserts the builder still reproduces them and that the real code paths
match byte-for-byte.
"""

from __future__ import annotations

import hashlib
import json
import sys
from importlib import resources
from pathlib import Path

GOLDEN_DIR = Path(__file__).parent / "data" / "golden"

_MOCK_PALETTE = (
    "#e74c3c", "#e67e22", "#f1c40f", "#2ecc71", "#1abc9c", "#3498db",
    "#9b59b6", "#fd79a8", "#6c5ce7", "#00b894", "#d63031", "#0984e3",
)


def _data_file(name: str) -> str:
    return resources.files("genface.data").joinpath(name).read_text("utf-8")


def _default_texts(phase: str) -> dict[str, str]:
    return json.loads(_data_file("default_rules.json"))[phase]


def _custom_default(placeholder: str) -> str:
    return (
        "Draw content for [%s] according to the designer's rules and "
        "the character's traits. Keep contour and position unchanged." % placeholder
    )


# the walkthrough template in prompt form: placeholder ids, geometry, fill
TEMPLATE_SECTION = """\
<svg xmlns="http://www.w3.org/2000/svg" width="400" height="400">
  <rect id="template-solidfill" x="0" y="0" width="400" height="400" fill="#e0e0e0"/>
  <path id="template-face" d="M110 100 L160 140 L240 140 L290 100 L300 220 L200 330 L100 220 Z" fill="#bdbdbd"/>
  <circle id="template-lefteye" cx="150" cy="180" r="30" fill="#bdbdbd"/>
  <circle id="template-righteye" cx="250" cy="180" r="30" fill="#bdbdbd"/>
  <ellipse id="template-nose" cx="200" cy="240" rx="25" ry="15" fill="#9e9e9e"/>
  <rect id="template-mouth" x="150" y="270" width="100" height="40" fill="#757575"/>
  <rect id="template-flag" x="320" y="40" width="60" height="80" fill="#9e9e9e"/>
  <ellipse id="template-hat" cx="200" cy="80" rx="90" ry="30" fill="#757575"/>
</svg>"""

# (placeholder id, tag or None for customs, geometry line for the mock echo)
ELEMENTS = (
    ("template-solidfill", None, '<rect x="0" y="0" width="400" height="400" fill="%s"/>'),
    ("template-face", "face", '<path d="M110 100 L160 140 L240 140 L290 100 L300 220 L200 330 L100 220 Z" fill="%s"/>'),
    ("template-lefteye", "left-eye", '<circle cx="150" cy="180" r="30" fill="%s"/>'),
    ("template-righteye", "right-eye", '<circle cx="250" cy="180" r="30" fill="%s"/>'),
    ("template-nose", "nose", '<ellipse cx="200" cy="240" rx="25" ry="15" fill="%s"/>'),
    ("template-mouth", "mouth", '<rect x="150" y="270" width="100" height="40" fill="%s"/>'),
    ("template-flag", None, '<rect x="320" y="40" width="60" height="80" fill="%s"/>'),
    ("template-hat", "hat", '<ellipse cx="200" cy="80" rx="90" ry="30" fill="%s"/>'),
)

DESIGNER_RULES = (
    "@flag renders a waving flag with a brown pole and flag surface; show only when the face changes",
    "@left-eye and @right-eye show white sclera and pupils with bright highlights",
    "Keep a consistent overall color scheme.",
)

FACE_MAPPING = (
    "Face/background fill varies with personality (e.g., brighter for extroverts); "
    "the hat's style/color varies with hobbies."
)
EXPRESSION_MAPPINGS = (
    "@Score controls flag state: 80-100 bright red/strong wave; 60-79 steady yellow; 1-59 drooping white",
    "Mouth, pupils, and background fill vary with score.",
)

FACE_CONTEXT = "Hobbies: eating desserts\nOccupation: student"
EXPRESSION_CONTEXT = "Score: 85"


def _rules_section(phase: str) -> str:
    texts = _default_texts(phase)
    lines = []
    if phase == "face-gen":
        lines.extend("Designer: %s" % text for text in DESIGNER_RULES)
    for placeholder, tag, _ in ELEMENTS:
        if tag is None:
            lines.append("Default: %s" % _custom_default(placeholder))
        else:
            lines.append("Default: %s" % texts[tag])
    return "\n".join(lines)


def _mock_color(group_id: str, context_values: tuple[str, ...]) -> str:
    seed = "%s|%s" % (group_id, "|".join(context_values))
    digest = hashlib.sha256(seed.encode("utf-8")).digest()
    return _MOCK_PALETTE[digest[0] % len(_MOCK_PALETTE)]


def build_base_face() -> str:
    context = ("eating desserts", "student")
    lines = ['<svg xmlns="http://www.w3.org/2000/svg" width="400" height="400">']
    for placeholder, _, geometry in ELEMENTS:
        lines.append('  <g id="%s">' % placeholder)
        lines.append("    " + geometry % _mock_color(placeholder, context))
        lines.append("  </g>")
    lines.append("</svg>")
    return "\n".join(lines)


def _fill_skeleton(skeleton_file: str, template: str, rules: str, mappings: str, context: str) -> str:
    text = _data_file(skeleton_file).rstrip("\n")
    for slot, value in (
        ("{{template}}", template),
        ("{{rules}}", rules),
        ("{{mapping_rules}}", mappings),
        ("{{context}}", context),
    ):
        assert text.count(slot) == 1, slot
        text = text.replace(slot, value)
    return text


def build_face_prompt() -> str:
    return _fill_skeleton(
        "prompt_face.txt", TEMPLATE_SECTION, _rules_section("face-gen"),
        FACE_MAPPING, FACE_CONTEXT,
    )


def build_expression_prompt() -> str:
    return _fill_skeleton(
        "prompt_expression.txt", build_base_face(), _rules_section("expression-gen"),
        "\n".join(EXPRESSION_MAPPINGS), EXPRESSION_CONTEXT,
    )


GOLDEN_FILES = {
    "face_prompt.txt": build_face_prompt,
    "base_face.svg": build_base_face,
    "expression_prompt.txt": build_expression_prompt,
}


def main(argv: list[str]) -> int:
    write = "--write" in argv
    GOLDEN_DIR.mkdir(parents=True, exist_ok=True)
    for name, build in GOLDEN_FILES.items():
        path = GOLDEN_DIR / name
        content = build()
        if write:
            path.write_text(content, encoding="utf-8")
            print("wrote %s (%d bytes)" % (path, len(content)))
        else:
            frozen = path.read_text(encoding="utf-8")
            status = "OK" if frozen == content else "DIFFERS"
            print("%s %s" % (name, status))
    return 0


if __name__ == "__main__":
    raise SystemExit(main(sys.argv[1:]))
