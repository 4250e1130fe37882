"""Crafted validator corpus: each entry's expected codes were enumerated by
applying the constraint rules by hand to the document text.

The corpus template has four elements:
  face       imported path, bbox (100, 80, 200, 240), tagged face
  left-eye   circle at (150, 150) r 25 -> bounds (125, 125, 50, 50)
  mouth-area rect (150, 250, 100, 40), tagged mouth
  emoji-area rect (320, 20, 60, 60), tagged emoji
Default containment tolerance on this canvas is 8px.
"""

from __future__ import annotations

from genface import (
    Circle,
    FaceTemplate,
    PathGeometry,
    Rect,
    TemplateElement,
    serialize_template,
)

CORPUS_TEMPLATE = FaceTemplate(elements=(
    TemplateElement("face", "imported-path",
                    PathGeometry("M100 80 L300 80 L300 320 L100 320 Z"), "#bdbdbd", tag="face"),
    TemplateElement("left-eye", "shape", Circle(150, 150, 25), "#9e9e9e", tag="left-eye"),
    TemplateElement("mouth-area", "area", Rect(150, 250, 100, 40), "#757575", tag="mouth"),
    TemplateElement("emoji-area", "area", Rect(320, 20, 60, 60), "#e0e0e0", tag="emoji"),
))

CORPUS_TEMPLATE_SVG = serialize_template(CORPUS_TEMPLATE)

_HEAD = '<svg xmlns="http://www.w3.org/2000/svg" width="400" height="400">'

_FACE_OK = '  <g id="face"><path d="M100 80 L300 80 L300 320 L100 320 Z" fill="#f4a261"/></g>'
_EYE_OK = '  <g id="left-eye"><circle cx="150" cy="150" r="22" fill="#264653"/></g>'
_MOUTH_OK = '  <g id="mouth-area"><path d="M155 265 Q200 295 245 265" fill="none" stroke="#2a9d8f" stroke-width="3"/></g>'
_EMOJI_OK = '  <g id="emoji-area"><text x="330" y="60" font-size="30" fill="#e76f51">2605</text></g>'


def _doc(*body: str) -> str:
    return "\n".join((_HEAD, *body, "</svg>"))


# name -> (phase, svg text, expected list of (code, element_id))
CORPUS: dict[str, tuple[str, str, list[tuple[str, str]]]] = {
    "clean_echo": (
        "face-gen",
        _doc(_FACE_OK, _EYE_OK, _MOUTH_OK, _EMOJI_OK),
        [],
    ),
    "clean_detailed": (
        "face-gen",
        _doc(
            '  <g id="face">',
            '    <path d="M100 80 L300 80 L300 320 L100 320 Z" fill="#ffe0b2"/>',
            '    <circle cx="120" cy="230" r="12" fill="#ef9a9a"/>',
            '    <circle cx="280" cy="230" r="12" fill="#ef9a9a"/>',
            "  </g>",
            '  <g id="left-eye">',
            '    <circle cx="150" cy="150" r="22" fill="#6d4c41"/>',
            '    <circle cx="150" cy="150" r="8" fill="#212121"/>',
            "  </g>",
            _MOUTH_OK,
            _EMOJI_OK,
        ),
        [],
    ),
    # phase-2 clean: palette/white rules do not apply to expression output
    "clean_expression_recolor": (
        "expression-gen",
        _doc(
            '  <g id="face"><path d="M100 80 L300 80 L300 320 L100 320 Z" fill="#ffffff"/></g>',
            '  <g id="left-eye"><circle cx="150" cy="150" r="22" fill="#bdbdbd"/></g>',
            _MOUTH_OK,
            _EMOJI_OK,
        ),
        [],
    ),
    "missing_mouth": (
        "face-gen",
        _doc(_FACE_OK, _EYE_OK, _EMOJI_OK),
        [("E_MISSING_ID", "mouth-area")],
    ),
    "missing_eye_and_emoji": (
        "face-gen",
        _doc(_FACE_OK, _MOUTH_OK),
        [("E_MISSING_ID", "left-eye"), ("E_MISSING_ID", "emoji-area")],
    ),
    "deleted_mouth_phase2": (
        "expression-gen",
        _doc(_FACE_OK, _EYE_OK, _EMOJI_OK),
        [("E_DELETED_ELEMENT", "mouth-area")],
    ),
    "deleted_face_phase2": (
        "expression-gen",
        _doc(_EYE_OK, _MOUTH_OK, _EMOJI_OK),
        [("E_DELETED_ELEMENT", "face")],
    ),
    "extra_hair": (
        "face-gen",
        _doc(_FACE_OK, _EYE_OK, _MOUTH_OK, _EMOJI_OK,
             '  <g id="hair"><path d="M120 60 L280 60 L200 100 Z" fill="#3e2723"/></g>'),
        [("E_EXTRA_ELEMENT", "hair")],
    ),
    "extra_hair_and_anonymous": (
        "face-gen",
        _doc(_FACE_OK, _EYE_OK, _MOUTH_OK, _EMOJI_OK,
             '  <g id="hair"><path d="M120 60 L280 60 L200 100 Z" fill="#3e2723"/></g>',
             '  <circle cx="200" cy="200" r="5" fill="#111111"/>'),
        [("E_EXTRA_ELEMENT", "hair"), ("E_EXTRA_ELEMENT", "<circle>")],
    ),
    # eye content shifted to (195..245): far beyond region x2=175 at tolerance 8
    "out_of_bounds_eye": (
        "face-gen",
        _doc(_FACE_OK,
             '  <g id="left-eye"><circle cx="220" cy="150" r="25" fill="#264653"/></g>',
             _MOUTH_OK, _EMOJI_OK),
        [("E_OUT_OF_BOUNDS", "left-eye")],
    ),
    "out_of_bounds_emoji": (
        "face-gen",
        _doc(_FACE_OK, _EYE_OK, _MOUTH_OK,
             '  <g id="emoji-area"><rect x="200" y="150" width="100" height="100" fill="#e76f51"/></g>'),
        [("E_OUT_OF_BOUNDS", "emoji-area")],
    ),
    # face detail overflow is exempt: blush circles poke far outside the face box
    "face_overflow_exempt": (
        "face-gen",
        _doc(
            '  <g id="face">',
            '    <path d="M100 80 L300 80 L300 320 L100 320 Z" fill="#f4a261"/>',
            '    <circle cx="60" cy="60" r="30" fill="#ef9a9a"/>',
            "  </g>",
            _EYE_OK, _MOUTH_OK, _EMOJI_OK,
        ),
        [],
    ),
    "palette_reuse_mouth": (
        "face-gen",
        _doc(_FACE_OK, _EYE_OK,
             '  <g id="mouth-area"><rect x="160" y="260" width="80" height="20" fill="#757575"/></g>',
             _EMOJI_OK),
        [("E_TEMPLATE_COLOR_REUSE", "mouth-area")],
    ),
    # reuse via stroke, uppercase spelling still matches after normalization
    "palette_reuse_stroke_uppercase": (
        "face-gen",
        _doc(_FACE_OK,
             '  <g id="left-eye"><circle cx="150" cy="150" r="20" fill="#264653" stroke="#BDBDBD"/></g>',
             _MOUTH_OK, _EMOJI_OK),
        [("E_TEMPLATE_COLOR_REUSE", "left-eye")],
    ),
    "white_face": (
        "face-gen",
        _doc(
            '  <g id="face"><path d="M100 80 L300 80 L300 320 L100 320 Z" fill="#ffffff"/></g>',
            _EYE_OK, _MOUTH_OK, _EMOJI_OK,
        ),
        [("E_WHITE_FACE", "face")],
    ),
    # dominant primitive (largest area) is white even though details are tinted
    "white_face_dominant": (
        "face-gen",
        _doc(
            '  <g id="face">',
            '    <rect x="110" y="90" width="180" height="220" fill="#fff"/>',
            '    <circle cx="200" cy="120" r="10" fill="#ef9a9a"/>',
            "  </g>",
            _EYE_OK, _MOUTH_OK, _EMOJI_OK,
        ),
        [("E_WHITE_FACE", "face")],
    ),
    "extra_and_out_of_bounds": (
        "face-gen",
        _doc(_FACE_OK,
             '  <g id="left-eye"><circle cx="220" cy="150" r="25" fill="#264653"/></g>',
             _MOUTH_OK, _EMOJI_OK,
             '  <g id="hair"><path d="M120 60 L280 60 L200 100 Z" fill="#3e2723"/></g>'),
        [("E_EXTRA_ELEMENT", "hair"), ("E_OUT_OF_BOUNDS", "left-eye")],
    ),
}
