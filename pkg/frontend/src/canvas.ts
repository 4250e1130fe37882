/** Pure canvas helpers: template rendering to SVG markup, drag arithmetic,
 *  and default shapes for the drawing tools. DOM-free and unit-testable. */

import type { Geometry, TemplateElement } from "./types.js";

export const CANVAS_SIZE = 400;

export function translateGeometry(geometry: Geometry, dx: number, dy: number): Geometry {
  switch (geometry.type) {
    case "circle":
      return { ...geometry, cx: geometry.cx + dx, cy: geometry.cy + dy };
    case "ellipse":
      return { ...geometry, cx: geometry.cx + dx, cy: geometry.cy + dy };
    case "rect":
      return { ...geometry, x: geometry.x + dx, y: geometry.y + dy };
    case "path":
      return { ...geometry, d: translatePath(geometry.d, dx, dy) };
  }
}

/** Scale a shape about its own center; paths scale about the origin like the
 *  backing engine's transform rules. */
export function scaleGeometry(geometry: Geometry, factor: number): Geometry {
  switch (geometry.type) {
    case "circle":
      return { ...geometry, r: geometry.r * factor };
    case "ellipse":
      return { ...geometry, rx: geometry.rx * factor, ry: geometry.ry * factor };
    case "rect": {
      const cx = geometry.x + geometry.width / 2;
      const cy = geometry.y + geometry.height / 2;
      const width = geometry.width * factor;
      const height = geometry.height * factor;
      return { ...geometry, x: cx - width / 2, y: cy - height / 2, width, height };
    }
    case "path":
      return geometry;
  }
}

const NUMBER_PAIR = /(-?\d*\.?\d+)(\s*[,\s]\s*)(-?\d*\.?\d+)/g;

/** Shift every absolute coordinate pair in simple M/L/Q/C path data. */
export function translatePath(d: string, dx: number, dy: number): string {
  return d.replace(NUMBER_PAIR, (_, x: string, sep: string, y: string) => {
    return `${round(parseFloat(x) + dx)}${sep}${round(parseFloat(y) + dy)}`;
  });
}

function round(value: number): number {
  return Math.round(value * 100) / 100;
}

export function geometryMarkup(geometry: Geometry): string {
  switch (geometry.type) {
    case "circle":
      return `<circle cx="${geometry.cx}" cy="${geometry.cy}" r="${geometry.r}"`;
    case "ellipse":
      return `<ellipse cx="${geometry.cx}" cy="${geometry.cy}" rx="${geometry.rx}" ry="${geometry.ry}"`;
    case "rect":
      return `<rect x="${geometry.x}" y="${geometry.y}" width="${geometry.width}" height="${geometry.height}"`;
    case "path":
      return `<path d="${escapeAttr(geometry.d)}"`;
  }
}

function escapeAttr(value: string): string {
  return value.replace(/&/g, "&amp;").replace(/"/g, "&quot;").replace(/</g, "&lt;");
}

/** Render the editable template canvas. Areas draw dashed, hidden elements
 *  fade, the selected element carries a highlight outline. */
export function renderTemplate(
  elements: TemplateElement[],
  selection: string | null,
  width = CANVAS_SIZE,
  height = CANVAS_SIZE,
): string {
  const body = elements
    .map((el) => {
      const style = [
        `fill="${el.fill}"`,
        el.kind === "area" ? 'stroke="#888" stroke-dasharray="6 4" fill-opacity="0.55"' : "",
        el.visible ? "" : 'opacity="0.25"',
        el.id === selection ? 'stroke="#1976d2" stroke-width="2.5"' : "",
        `data-element-id="${el.id}"`,
      ]
        .filter(Boolean)
        .join(" ");
      return `  ${geometryMarkup(el.geometry)} ${style}/>`;
    })
    .join("\n");
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}" width="100%" height="100%">`,
    `  <rect x="0" y="0" width="${width}" height="${height}" fill="#fafafa" stroke="#ddd"/>`,
    body,
    "</svg>",
  ].join("\n");
}

let shapeCounter = 0;

export function freshElementId(prefix: string, taken: Set<string>): string {
  for (;;) {
    shapeCounter += 1;
    const candidate = `${prefix}-${shapeCounter}`;
    if (!taken.has(candidate)) return candidate;
  }
}

/** Default geometry for each drawing tool, dropped near the canvas center. */
export function toolGeometry(tool: "circle" | "ellipse" | "rect" | "area"): Geometry {
  switch (tool) {
    case "circle":
      return { type: "circle", cx: 200, cy: 200, r: 30 };
    case "ellipse":
      return { type: "ellipse", cx: 200, cy: 200, rx: 45, ry: 25 };
    case "rect":
      return { type: "rect", x: 170, y: 170, width: 60, height: 60 };
    case "area":
      return { type: "rect", x: 140, y: 140, width: 120, height: 120 };
  }
}
