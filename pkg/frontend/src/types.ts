/** Wire types for the /api/v1 surface. The server is the source of truth;
 *  everything here mirrors its JSON resources. */

export type Phase = "face-gen" | "expression-gen";

export const PHASES: Phase[] = ["face-gen", "expression-gen"];

export type TagCategory = "organ" | "decoration" | "context" | "custom";

export interface GeometryCircle {
  type: "circle";
  cx: number;
  cy: number;
  r: number;
}

export interface GeometryEllipse {
  type: "ellipse";
  cx: number;
  cy: number;
  rx: number;
  ry: number;
}

export interface GeometryRect {
  type: "rect";
  x: number;
  y: number;
  width: number;
  height: number;
}

export interface GeometryPath {
  type: "path";
  d: string;
}

export type Geometry = GeometryCircle | GeometryEllipse | GeometryRect | GeometryPath;

export type ElementKind = "area" | "shape" | "imported-path";

export interface TemplateElement {
  id: string;
  kind: ElementKind;
  geometry: Geometry;
  fill: string;
  visible: boolean;
  tag: string | null;
  bounds: { x: number; y: number; width: number; height: number };
}

export interface Rule {
  id: string;
  phase: Phase;
  scope: "global" | "targeted";
  targets: string[];
  text: string;
  source: "designer" | "system-default";
  created_at: string;
  seq: number;
  category: string | null;
}

export interface ContextFactor {
  name: string;
  origin: "preset" | "custom";
  description: string;
  sample_values: string[];
}

export interface MappingRule {
  id: string;
  phase: Phase;
  text: string;
  referenced_factors: string[];
  created_at: string;
  seq: number;
}

export interface Violation {
  code: string;
  element_id: string | null;
  detail: string;
}

export interface ValidationReport {
  valid: boolean;
  violations: Violation[];
}

export interface GenerationResult {
  id: string;
  phase: Phase;
  prompt: { phase: Phase; sections: [string, string][]; full_text: string };
  raw_response: string;
  svg: string | null;
  report: ValidationReport | null;
  created_at: string;
  inputs: Record<string, string>;
  error: string | null;
}

export interface ProjectResource {
  schema_version: number;
  id: string;
  name: string;
  revision: number;
  template_svg: string;
  elements: TemplateElement[];
  rules: Rule[];
  factors: Record<Phase, ContextFactor[]>;
  mapping_rules: Record<Phase, MappingRule[]>;
  history: GenerationResult[];
  base_face: { svg: string; source_result_id: string } | null;
  resolved_rules: Record<Phase, Rule[]>;
}

export interface DeployInfo {
  token: string;
  device_url: string;
}

export interface StreamFrame {
  seq: number;
  svg: string;
}

export interface ApiErrorBody {
  error: string;
  detail?: unknown;
}

export const GRAYSCALE_PALETTE = ["#e0e0e0", "#bdbdbd", "#9e9e9e", "#757575", "#424242"];

export const PRESET_TAGS: Record<Exclude<TagCategory, "custom">, string[]> = {
  organ: ["face", "left-eye", "right-eye", "nose", "mouth", "left-ear", "right-ear"],
  context: ["scene", "scene-item", "emoji", "text"],
  decoration: ["clothing", "hat", "jewellery", "color"],
};

export const PRESET_FACTORS = [
  "Hobbies", "Occupation", "Personality", "Atmosphere", "User Emotion", "MBTI", "Age",
];
