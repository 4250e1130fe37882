"""SVG-subset document model for face templates and generated faces.

Two document kinds live here:

* ``FaceTemplate`` -- the designer's canvas: a flat, z-ordered list of
  identified elements (areas, shapes, imported paths) with grayscale fills.
  Templates are self-describing SVG files; the reserved attributes
  ``data-gpfei-kind`` and ``data-gpfei-tag`` carry element kind and semantic
  tag through serialization.
* ``FaceDocument`` -- a generated face: one group of drawing primitives per
  template element id, plus a "foreign" set of anything the generator added
  that the template does not define.

Supported subset: circle, ellipse, rect, path, text, g, line, polyline,
polygon, with fill/stroke/opacity style attributes and translate/scale
transforms. Anything else is rejected at parse time.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from xml.etree import ElementTree as ET

from .errors import (
    DuplicateId,
    InvalidTemplate,
    MalformedSvg,
    UnsupportedGeometry,
)

SVG_NS = "http://www.w3.org/2000/svg"

DEFAULT_CANVAS_SIZE = 400.0

# Five grayscale steps; enough to separate overlapping regions on the canvas.
DEFAULT_PALETTE = ("#e0e0e0", "#bdbdbd", "#9e9e9e", "#757575", "#424242")

ELEMENT_KINDS = ("area", "shape", "imported-path")

_ID_RE = re.compile(r"^[a-z0-9-]+$")

KIND_ATTR = "data-gpfei-kind"
TAG_ATTR = "data-gpfei-tag"
PALETTE_ATTR = "data-gpfei-palette"


@dataclass(frozen=True)
class Bounds:
    """Axis-aligned rectangle in canvas pixel units."""

    x: float
    y: float
    width: float
    height: float

    @property
    def x2(self) -> float:
        return self.x + self.width

    @property
    def y2(self) -> float:
        return self.y + self.height

    def union(self, other: "Bounds") -> "Bounds":
        x1 = min(self.x, other.x)
        y1 = min(self.y, other.y)
        x2 = max(self.x2, other.x2)
        y2 = max(self.y2, other.y2)
        return Bounds(x1, y1, x2 - x1, y2 - y1)

    def area(self) -> float:
        return self.width * self.height


def contains(region: Bounds, box: Bounds, tolerance_px: float = 0.0) -> bool:
    """True iff ``box`` shrunk by the tolerance fits in ``region`` grown by it."""
    if tolerance_px < 0:
        raise ValueError("tolerance_px must be >= 0")
    t = tolerance_px
    return (
        box.x + t >= region.x - t
        and box.y + t >= region.y - t
        and box.x2 - t <= region.x2 + t
        and box.y2 - t <= region.y2 + t
    )


# --- geometry ----------------------------------------------------------------

@dataclass(frozen=True)
class Circle:
    cx: float
    cy: float
    r: float

    def bounds(self) -> Bounds:
        return Bounds(self.cx - self.r, self.cy - self.r, 2 * self.r, 2 * self.r)


@dataclass(frozen=True)
class Ellipse:
    cx: float
    cy: float
    rx: float
    ry: float

    def bounds(self) -> Bounds:
        return Bounds(self.cx - self.rx, self.cy - self.ry, 2 * self.rx, 2 * self.ry)


@dataclass(frozen=True)
class Rect:
    x: float
    y: float
    width: float
    height: float

    def bounds(self) -> Bounds:
        return Bounds(self.x, self.y, self.width, self.height)


@dataclass(frozen=True)
class PathGeometry:
    """Path outline; bounds are the hull of all anchor and control points."""

    d: str

    def bounds(self) -> Bounds:
        points = path_points(self.d)
        if not points:
            raise UnsupportedGeometry("path has no coordinates: %r" % self.d)
        xs = [p[0] for p in points]
        ys = [p[1] for p in points]
        return Bounds(min(xs), min(ys), max(xs) - min(xs), max(ys) - min(ys))


Geometry = Circle | Ellipse | Rect | PathGeometry

# argument count per path command (Z handled separately)
_PATH_ARGS = {
    "M": 2, "L": 2, "H": 1, "V": 1,
    "C": 6, "S": 4, "Q": 4, "T": 2, "A": 7,
}

_NUM_RE = re.compile(r"[-+]?(?:\d*\.\d+|\d+\.?)(?:[eE][-+]?\d+)?")


def path_points(d: str) -> list[tuple[float, float]]:
    """All absolute anchor/control points of a path command string.

    Arc (A) segments contribute endpoints only, so the hull is conservative
    with respect to arc bulge.
    """
    tokens = re.findall(r"[MmLlHhVvCcSsQqTtAaZz]|" + _NUM_RE.pattern, d)
    points: list[tuple[float, float]] = []
    cx = cy = 0.0          # current point
    sx = sy = 0.0          # subpath start
    i = 0
    command = None
    while i < len(tokens):
        tok = tokens[i]
        if tok.isalpha():
            command = tok
            i += 1
            if command in ("Z", "z"):
                cx, cy = sx, sy
                command = None
                continue
        if command is None:
            raise MalformedSvg("path data has numbers before any command: %r" % d)
        upper = command.upper()
        relative = command.islower()
        argc = _PATH_ARGS.get(upper)
        if argc is None:
            raise UnsupportedGeometry("unsupported path command %r" % command)
        args = tokens[i:i + argc]
        if len(args) != argc or any(a.isalpha() for a in args):
            raise MalformedSvg("truncated arguments for path command %r" % command)
        vals = [float(a) for a in args]
        i += argc

        if upper == "H":
            cx = cx + vals[0] if relative else vals[0]
            points.append((cx, cy))
        elif upper == "V":
            cy = cy + vals[0] if relative else vals[0]
            points.append((cx, cy))
        elif upper == "A":
            x, y = vals[5], vals[6]
            if relative:
                x, y = cx + x, cy + y
            cx, cy = x, y
            points.append((cx, cy))
        else:
            # coordinate pairs; every pair is an anchor or a control point
            pairs = [(vals[k], vals[k + 1]) for k in range(0, argc, 2)]
            if relative:
                pairs = [(cx + px, cy + py) for px, py in pairs]
            points.extend(pairs)
            cx, cy = pairs[-1]
        if upper == "M":
            sx, sy = cx, cy
            # subsequent pairs of an M command are implicit linetos
            command = "l" if relative else "L"
    return points


_TRANSFORM_RE = re.compile(r"(translate|scale|rotate|skewX|skewY|matrix)\s*\(([^)]*)\)")


def _parse_transform(text: str) -> tuple[float, float, float, float]:
    """Reduce a translate/scale transform list to (sx, sy, tx, ty).

    Rotation, skew, and general matrices are outside the subset.
    """
    sx, sy, tx, ty = 1.0, 1.0, 0.0, 0.0
    matched = 0
    for op, raw_args in _TRANSFORM_RE.findall(text):
        matched += 1
        args = [float(a) for a in _NUM_RE.findall(raw_args)]
        if op == "translate":
            dx = args[0] if args else 0.0
            dy = args[1] if len(args) > 1 else 0.0
            tx += sx * dx
            ty += sy * dy
        elif op == "scale":
            fx = args[0] if args else 1.0
            fy = args[1] if len(args) > 1 else fx
            sx *= fx
            sy *= fy
        else:
            raise UnsupportedGeometry("unsupported transform %r" % op)
    if matched == 0 and text.strip():
        raise UnsupportedGeometry("unparseable transform %r" % text)
    return sx, sy, tx, ty


def _transform_bounds(b: Bounds, transform: str | None) -> Bounds:
    if not transform:
        return b
    sx, sy, tx, ty = _parse_transform(transform)
    x1, y1 = sx * b.x + tx, sy * b.y + ty
    x2, y2 = sx * b.x2 + tx, sy * b.y2 + ty
    return Bounds(min(x1, x2), min(y1, y2), abs(x2 - x1), abs(y2 - y1))


# --- template ----------------------------------------------------------------

@dataclass(frozen=True)
class TemplateElement:
    id: str
    kind: str
    geometry: Geometry
    fill: str
    visible: bool = True
    tag: str | None = None
    extra: tuple[tuple[str, str], ...] = ()

    def with_tag(self, tag: str | None) -> "TemplateElement":
        return replace(self, tag=tag)


def element_bounds(element: TemplateElement) -> Bounds:
    """Tight bounding box in canvas units (conservative hull for paths)."""
    transform = dict(element.extra).get("transform")
    return _transform_bounds(element.geometry.bounds(), transform)


_KIND_GEOMETRY = {
    "area": (Rect, PathGeometry),
    "shape": (Circle, Ellipse, Rect),
    "imported-path": (PathGeometry,),
}


@dataclass(frozen=True)
class FaceTemplate:
    canvas_width: float = DEFAULT_CANVAS_SIZE
    canvas_height: float = DEFAULT_CANVAS_SIZE
    elements: tuple[TemplateElement, ...] = ()
    palette: tuple[str, ...] = DEFAULT_PALETTE

    def validate(self) -> None:
        seen: set[str] = set()
        canvas = Bounds(0, 0, self.canvas_width, self.canvas_height)
        for el in self.elements:
            if not el.id or not _ID_RE.match(el.id):
                raise InvalidTemplate("element id %r must match [a-z0-9-]+" % el.id)
            if el.id in seen:
                raise DuplicateId("duplicate element id %r" % el.id)
            seen.add(el.id)
            if el.kind not in ELEMENT_KINDS:
                raise UnsupportedGeometry("unknown element kind %r" % el.kind)
            if not isinstance(el.geometry, _KIND_GEOMETRY[el.kind]):
                raise UnsupportedGeometry(
                    "kind %r does not admit %s geometry"
                    % (el.kind, type(el.geometry).__name__)
                )
            _check_positive_extents(el)
            if not contains(canvas, element_bounds(el), 0.0):
                raise InvalidTemplate("element %r exceeds the canvas" % el.id)
            if el.fill not in self.palette:
                raise InvalidTemplate(
                    "element %r fill %r is not in the template palette" % (el.id, el.fill)
                )

    def element(self, element_id: str) -> TemplateElement | None:
        for el in self.elements:
            if el.id == element_id:
                return el
        return None

    def tags(self) -> list[str]:
        return [el.tag for el in self.elements if el.tag]


def _check_positive_extents(el: TemplateElement) -> None:
    g = el.geometry
    if isinstance(g, Circle) and g.r <= 0:
        raise InvalidTemplate("element %r has non-positive radius" % el.id)
    if isinstance(g, Ellipse) and (g.rx <= 0 or g.ry <= 0):
        raise InvalidTemplate("element %r has non-positive radii" % el.id)
    if isinstance(g, Rect) and (g.width <= 0 or g.height <= 0):
        raise InvalidTemplate("element %r has non-positive extent" % el.id)


def _localname(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _parse_xml(svg_text: str) -> ET.Element:
    try:
        root = ET.fromstring(svg_text)
    except ET.ParseError as exc:
        raise MalformedSvg("not well-formed XML: %s" % exc) from exc
    if _localname(root.tag) != "svg":
        raise MalformedSvg("root element is <%s>, expected <svg>" % _localname(root.tag))
    return root


def _parse_length(value: str | None, default: float) -> float:
    if value is None:
        return default
    try:
        return float(value.strip().removesuffix("px"))
    except ValueError as exc:
        raise MalformedSvg("bad length %r" % value) from exc


_GEOMETRY_ATTRS = {
    "circle": ("cx", "cy", "r"),
    "ellipse": ("cx", "cy", "rx", "ry"),
    "rect": ("x", "y", "width", "height"),
    "path": ("d",),
}


def _float_attr(node: ET.Element, name: str) -> float:
    raw = node.get(name, "0")
    try:
        return float(raw)
    except ValueError as exc:
        raise MalformedSvg("attribute %s=%r is not numeric" % (name, raw)) from exc


def _node_geometry(node: ET.Element) -> Geometry:
    name = _localname(node.tag)
    if name == "circle":
        return Circle(_float_attr(node, "cx"), _float_attr(node, "cy"), _float_attr(node, "r"))
    if name == "ellipse":
        return Ellipse(
            _float_attr(node, "cx"), _float_attr(node, "cy"),
            _float_attr(node, "rx"), _float_attr(node, "ry"),
        )
    if name == "rect":
        return Rect(
            _float_attr(node, "x"), _float_attr(node, "y"),
            _float_attr(node, "width"), _float_attr(node, "height"),
        )
    if name == "path":
        d = node.get("d")
        if not d:
            raise MalformedSvg("path element without d attribute")
        path_points(d)  # validates command syntax
        return PathGeometry(d)
    raise UnsupportedGeometry("unsupported element <%s>" % name)


_DEFAULT_KIND = {"circle": "shape", "ellipse": "shape", "rect": "shape", "path": "imported-path"}


def parse_template(svg_text: str) -> FaceTemplate:
    """Parse template SVG text; unknown attributes survive round-tripping."""
    root = _parse_xml(svg_text)
    width = _parse_length(root.get("width"), DEFAULT_CANVAS_SIZE)
    height = _parse_length(root.get("height"), DEFAULT_CANVAS_SIZE)
    palette_raw = root.get(PALETTE_ATTR)
    palette = tuple(palette_raw.split()) if palette_raw else DEFAULT_PALETTE

    elements: list[TemplateElement] = []
    for node in root:
        name = _localname(node.tag)
        if name not in _GEOMETRY_ATTRS:
            raise UnsupportedGeometry("unsupported element <%s> in template" % name)
        element_id = node.get("id")
        if not element_id:
            raise MalformedSvg("template element <%s> has no id" % name)
        geometry = _node_geometry(node)
        kind = node.get(KIND_ATTR) or _DEFAULT_KIND[name]
        fill = node.get("fill", DEFAULT_PALETTE[0] if not palette_raw else palette[0])
        visible = node.get("display") != "none"
        tag = node.get(TAG_ATTR)
        consumed = set(_GEOMETRY_ATTRS[name]) | {"id", "fill", "display", KIND_ATTR, TAG_ATTR}
        extra = tuple(
            (k, v) for k, v in sorted(node.attrib.items()) if k not in consumed
        )
        transform = dict(extra).get("transform")
        if transform:
            _parse_transform(transform)  # reject unsupported transforms early
        elements.append(
            TemplateElement(element_id, kind, geometry, fill, visible, tag, extra)
        )
    template = FaceTemplate(width, height, tuple(elements), palette)
    template.validate()
    return template


def format_number(value: float) -> str:
    if value == int(value):
        return str(int(value))
    return repr(value)


def _geometry_attrs(geometry: Geometry) -> list[tuple[str, str]]:
    if isinstance(geometry, Circle):
        return [("cx", format_number(geometry.cx)), ("cy", format_number(geometry.cy)),
                ("r", format_number(geometry.r))]
    if isinstance(geometry, Ellipse):
        return [("cx", format_number(geometry.cx)), ("cy", format_number(geometry.cy)),
                ("rx", format_number(geometry.rx)), ("ry", format_number(geometry.ry))]
    if isinstance(geometry, Rect):
        return [("x", format_number(geometry.x)), ("y", format_number(geometry.y)),
                ("width", format_number(geometry.width)), ("height", format_number(geometry.height))]
    return [("d", geometry.d)]


_GEOMETRY_TAG = {Circle: "circle", Ellipse: "ellipse", Rect: "rect", PathGeometry: "path"}


def _xml_escape(value: str) -> str:
    return (
        value.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")
    )


def _render_attrs(attrs: list[tuple[str, str]]) -> str:
    return " ".join('%s="%s"' % (k, _xml_escape(v)) for k, v in attrs)


def serialize_element(el: TemplateElement, element_id: str | None = None,
                      self_describing: bool = True) -> str:
    """One-line SVG for a template element, in a fixed attribute order."""
    attrs: list[tuple[str, str]] = [("id", element_id or el.id)]
    attrs.extend(_geometry_attrs(el.geometry))
    attrs.append(("fill", el.fill))
    if not el.visible:
        attrs.append(("display", "none"))
    if self_describing:
        attrs.append((KIND_ATTR, el.kind))
        if el.tag:
            attrs.append((TAG_ATTR, el.tag))
    attrs.extend(el.extra)
    return "<%s %s/>" % (_GEOMETRY_TAG[type(el.geometry)], _render_attrs(attrs))


def serialize_template(template: FaceTemplate, placeholder_ids: bool = False) -> str:
    """Serialize in element order.

    With ``placeholder_ids`` each element id is replaced by the placeholder
    derived from its semantic tag and the reserved data attributes are
    dropped: this is the form embedded into prompts.
    """
    from .rulebook import placeholder_for  # local import avoids a cycle

    root_attrs: list[tuple[str, str]] = [
        ("xmlns", SVG_NS),
        ("width", format_number(template.canvas_width)),
        ("height", format_number(template.canvas_height)),
    ]
    if not placeholder_ids and template.palette != DEFAULT_PALETTE:
        root_attrs.append((PALETTE_ATTR, " ".join(template.palette)))
    if not template.elements:
        return "<svg %s/>" % _render_attrs(root_attrs)
    lines = ["<svg %s>" % _render_attrs(root_attrs)]
    for el in template.elements:
        rendered_id = el.id
        if placeholder_ids:
            if not el.tag:
                raise InvalidTemplate("element %r has no tag, placeholder undefined" % el.id)
            rendered_id = placeholder_for(el.tag)
        lines.append("  " + serialize_element(el, rendered_id, self_describing=not placeholder_ids))
    lines.append("</svg>")
    return "\n".join(lines)


# --- JSON form (HTTP API and CLI wire format) -----------------------------------

def geometry_to_dict(geometry: Geometry) -> dict:
    if isinstance(geometry, Circle):
        return {"type": "circle", "cx": geometry.cx, "cy": geometry.cy, "r": geometry.r}
    if isinstance(geometry, Ellipse):
        return {"type": "ellipse", "cx": geometry.cx, "cy": geometry.cy,
                "rx": geometry.rx, "ry": geometry.ry}
    if isinstance(geometry, Rect):
        return {"type": "rect", "x": geometry.x, "y": geometry.y,
                "width": geometry.width, "height": geometry.height}
    return {"type": "path", "d": geometry.d}


def geometry_from_dict(data: dict) -> Geometry:
    kind = data.get("type")
    try:
        if kind == "circle":
            return Circle(float(data["cx"]), float(data["cy"]), float(data["r"]))
        if kind == "ellipse":
            return Ellipse(float(data["cx"]), float(data["cy"]),
                           float(data["rx"]), float(data["ry"]))
        if kind == "rect":
            return Rect(float(data["x"]), float(data["y"]),
                        float(data["width"]), float(data["height"]))
        if kind == "path":
            d = str(data["d"])
            path_points(d)
            return PathGeometry(d)
    except (KeyError, TypeError, ValueError) as exc:
        raise UnsupportedGeometry("bad %s geometry: %s" % (kind, exc)) from exc
    raise UnsupportedGeometry("unknown geometry type %r" % kind)


def element_to_dict(el: TemplateElement) -> dict:
    box = element_bounds(el)
    return {
        "id": el.id,
        "kind": el.kind,
        "geometry": geometry_to_dict(el.geometry),
        "fill": el.fill,
        "visible": el.visible,
        "tag": el.tag,
        "bounds": {"x": box.x, "y": box.y, "width": box.width, "height": box.height},
    }


def element_from_dict(data: dict) -> TemplateElement:
    return TemplateElement(
        id=str(data["id"]),
        kind=str(data["kind"]),
        geometry=geometry_from_dict(data["geometry"]),
        fill=str(data.get("fill", DEFAULT_PALETTE[0])),
        visible=bool(data.get("visible", True)),
        tag=data.get("tag"),
        extra=tuple((str(k), str(v)) for k, v in sorted(dict(data.get("extra", {})).items())),
    )


# --- generated face documents -------------------------------------------------

_DRAWING_TAGS = {"circle", "ellipse", "rect", "path", "line", "polyline", "polygon", "text", "g"}


@dataclass(frozen=True)
class DocPrimitive:
    """One drawing node inside a face-document group."""

    tag: str
    attrib: tuple[tuple[str, str], ...]
    children: tuple["DocPrimitive", ...] = ()
    text: str = ""

    def get(self, name: str, default: str | None = None) -> str | None:
        return dict(self.attrib).get(name, default)


def primitive_from_node(node: ET.Element) -> DocPrimitive:
    name = _localname(node.tag)
    if name not in _DRAWING_TAGS:
        raise UnsupportedGeometry("unsupported element <%s> in face document" % name)
    transform = node.get("transform")
    if transform:
        _parse_transform(transform)
    children = tuple(primitive_from_node(child) for child in node)
    return DocPrimitive(name, tuple(sorted(node.attrib.items())), children, (node.text or "").strip())


def primitive_bounds(prim: DocPrimitive) -> Bounds | None:
    """Geometric box of a primitive, or None when it has no computable extent.

    Text contributes its anchor point only (no font metrics in the subset).
    """
    attrs = dict(prim.attrib)
    box: Bounds | None = None
    try:
        if prim.tag in ("circle", "ellipse", "rect"):
            node = ET.Element(prim.tag, attrs)
            box = _node_geometry(node).bounds()
        elif prim.tag == "path":
            d = attrs.get("d", "")
            if d:
                box = PathGeometry(d).bounds()
        elif prim.tag == "line":
            x1, y1 = float(attrs.get("x1", 0)), float(attrs.get("y1", 0))
            x2, y2 = float(attrs.get("x2", 0)), float(attrs.get("y2", 0))
            box = Bounds(min(x1, x2), min(y1, y2), abs(x2 - x1), abs(y2 - y1))
        elif prim.tag in ("polyline", "polygon"):
            nums = [float(n) for n in _NUM_RE.findall(attrs.get("points", ""))]
            xs, ys = nums[0::2], nums[1::2]
            if xs and ys:
                box = Bounds(min(xs), min(ys), max(xs) - min(xs), max(ys) - min(ys))
        elif prim.tag == "text":
            x, y = float(attrs.get("x", 0)), float(attrs.get("y", 0))
            box = Bounds(x, y, 0.0, 0.0)
        elif prim.tag == "g":
            for child in prim.children:
                child_box = primitive_bounds(child)
                if child_box is not None:
                    box = child_box if box is None else box.union(child_box)
    except (ValueError, MalformedSvg):
        return None
    if box is None:
        return None
    return _transform_bounds(box, attrs.get("transform"))


def group_bounds(primitives: tuple[DocPrimitive, ...]) -> Bounds | None:
    box: Bounds | None = None
    for prim in primitives:
        prim_box = primitive_bounds(prim)
        if prim_box is not None:
            box = prim_box if box is None else box.union(prim_box)
    return box


_STYLE_DECL_RE = re.compile(r"(fill|stroke)\s*:\s*([^;]+)")


def normalize_color(value: str) -> str:
    """Lowercase and expand #abc to #aabbcc; other forms pass through."""
    v = value.strip().lower()
    if re.fullmatch(r"#[0-9a-f]{3}", v):
        return "#" + "".join(ch * 2 for ch in v[1:])
    return v


def paint_colors(prim: DocPrimitive) -> list[str]:
    """All fill/stroke paints used by a primitive subtree, normalized."""
    colors: list[str] = []
    attrs = dict(prim.attrib)
    for key in ("fill", "stroke"):
        value = attrs.get(key)
        if value and value != "none":
            colors.append(normalize_color(value))
    style = attrs.get("style", "")
    for _, value in _STYLE_DECL_RE.findall(style):
        if value.strip() != "none":
            colors.append(normalize_color(value))
    for child in prim.children:
        colors.extend(paint_colors(child))
    return colors


def serialize_primitive(prim: DocPrimitive, indent: int = 0) -> str:
    pad = " " * indent
    rendered = _render_attrs(list(prim.attrib))
    opening = "<%s%s" % (prim.tag, " " + rendered if rendered else "")
    if not prim.children and not prim.text:
        return pad + opening + "/>"
    if not prim.children:
        return "%s%s>%s</%s>" % (pad, opening, _xml_escape(prim.text), prim.tag)
    lines = [pad + opening + ">"]
    lines.extend(serialize_primitive(child, indent + 2) for child in prim.children)
    lines.append("%s</%s>" % (pad, prim.tag))
    return "\n".join(lines)


@dataclass(frozen=True)
class FaceDocument:
    """Generated face keyed by template element ids."""

    canvas_width: float
    canvas_height: float
    groups: dict[str, tuple[DocPrimitive, ...]] = field(default_factory=dict)
    foreign: tuple[str, ...] = ()

    def to_svg(self) -> str:
        head = '<svg xmlns="%s" width="%s" height="%s">' % (
            SVG_NS, format_number(self.canvas_width), format_number(self.canvas_height),
        )
        lines = [head]
        for group_id, primitives in self.groups.items():
            lines.append('  <g id="%s">' % _xml_escape(group_id))
            lines.extend(serialize_primitive(prim, 4) for prim in primitives)
            lines.append("  </g>")
        lines.append("</svg>")
        return "\n".join(lines)


def parse_face_document(svg_text: str, template: FaceTemplate) -> FaceDocument:
    """Key generated content by template element id.

    Generated documents normally carry the placeholder ids that appeared in
    the prompt; raw template ids are accepted as well. Identified children
    matching neither, and unidentified top-level children, land in the
    foreign set for the validator.
    """
    from .rulebook import placeholder_for

    root = _parse_xml(svg_text)
    width = _parse_length(root.get("width"), template.canvas_width)
    height = _parse_length(root.get("height"), template.canvas_height)

    id_map: dict[str, str] = {}
    for el in template.elements:
        id_map[el.id] = el.id
        if el.tag:
            id_map[placeholder_for(el.tag)] = el.id

    groups: dict[str, tuple[DocPrimitive, ...]] = {}
    foreign: list[str] = []
    for node in root:
        name = _localname(node.tag)
        raw_id = node.get("id")
        prim = primitive_from_node(node)
        key = id_map.get(raw_id) if raw_id else None
        if key is None or key in groups:
            foreign.append(raw_id or "<%s>" % name)
            continue
        if name == "g":
            styling = tuple((k, v) for k, v in prim.attrib if k != "id")
            if styling:
                # keep group-level transform/style wrapped around the children
                groups[key] = (DocPrimitive("g", styling, prim.children),)
            else:
                groups[key] = prim.children
        else:
            groups[key] = (prim,)
    return FaceDocument(width, height, groups, tuple(foreign))
