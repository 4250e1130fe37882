/** Typed client for the studio API. Every mutation returns the full updated
 *  project resource, so callers can reconcile local state in one step. */

import type {
  DeployInfo,
  ElementKind,
  Geometry,
  GenerationResult,
  Phase,
  ProjectResource,
  TagCategory,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    public readonly body: unknown,
  ) {
    super(`${code} (HTTP ${status})`);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const response = await fetch(url, {
    headers: { "content-type": "application/json" },
    ...init,
  });
  if (response.status === 204) return undefined as T;
  const text = await response.text();
  let body: unknown = text;
  try {
    body = JSON.parse(text);
  } catch {
    /* non-JSON payloads (raw SVG) pass through */
  }
  if (!response.ok) {
    const code =
      typeof body === "object" && body !== null && "error" in body
        ? String((body as { error: unknown }).error)
        : `HTTP_${response.status}`;
    throw new ApiError(response.status, code, body);
  }
  return body as T;
}

export interface ElementInput {
  id: string;
  kind: ElementKind;
  geometry: Geometry;
  fill: string;
  visible?: boolean;
  revision?: number;
}

export interface TestRun {
  project_id: string;
  revision: number;
  results: GenerationResult[];
}

export class StudioApi {
  constructor(private readonly base = "") {}

  private url(path: string): string {
    return `${this.base}/api/v1${path}`;
  }

  listProjects(): Promise<{ projects: string[] }> {
    return request(this.url("/projects"));
  }

  createProject(name: string): Promise<ProjectResource> {
    return request(this.url("/projects"), { method: "POST", body: JSON.stringify({ name }) });
  }

  getProject(id: string): Promise<ProjectResource> {
    return request(this.url(`/projects/${id}`));
  }

  renameProject(id: string, name: string, revision: number): Promise<ProjectResource> {
    return request(this.url(`/projects/${id}`), {
      method: "PUT",
      body: JSON.stringify({ name, revision }),
    });
  }

  deleteProject(id: string): Promise<void> {
    return request(this.url(`/projects/${id}`), { method: "DELETE" });
  }

  addElement(projectId: string, element: ElementInput): Promise<ProjectResource> {
    return request(this.url(`/projects/${projectId}/elements`), {
      method: "POST",
      body: JSON.stringify(element),
    });
  }

  updateElement(projectId: string, element: ElementInput): Promise<ProjectResource> {
    return request(this.url(`/projects/${projectId}/elements/${element.id}`), {
      method: "PUT",
      body: JSON.stringify(element),
    });
  }

  deleteElement(projectId: string, elementId: string): Promise<ProjectResource> {
    return request(this.url(`/projects/${projectId}/elements/${elementId}`), {
      method: "DELETE",
    });
  }

  reorderElements(projectId: string, order: string[]): Promise<ProjectResource> {
    return request(this.url(`/projects/${projectId}/elements`), {
      method: "PUT",
      body: JSON.stringify({ order }),
    });
  }

  applyTag(
    projectId: string,
    elementId: string,
    name: string,
    category: TagCategory,
  ): Promise<ProjectResource & { injected_rules: unknown[] }> {
    return request(this.url(`/projects/${projectId}/tags`), {
      method: "POST",
      body: JSON.stringify({ element_id: elementId, name, category }),
    });
  }

  removeTag(projectId: string, elementId: string): Promise<ProjectResource> {
    return request(this.url(`/projects/${projectId}/tags/${elementId}`), { method: "DELETE" });
  }

  addRule(
    projectId: string,
    phase: Phase,
    text: string,
  ): Promise<ProjectResource & { rule: { id: string }; warnings: string[] }> {
    return request(this.url(`/projects/${projectId}/rules`), {
      method: "POST",
      body: JSON.stringify({ phase, text }),
    });
  }

  deleteRule(projectId: string, ruleId: string): Promise<ProjectResource> {
    return request(this.url(`/projects/${projectId}/rules/${ruleId}`), { method: "DELETE" });
  }

  addFactor(projectId: string, phase: Phase, name: string, description = ""): Promise<ProjectResource> {
    return request(this.url(`/projects/${projectId}/factors`), {
      method: "POST",
      body: JSON.stringify({ phase, name, description }),
    });
  }

  deleteFactor(projectId: string, phase: Phase, name: string): Promise<ProjectResource> {
    return request(this.url(`/projects/${projectId}/factors/${phase}/${encodeURIComponent(name)}`), {
      method: "DELETE",
    });
  }

  addMapping(
    projectId: string,
    phase: Phase,
    text: string,
  ): Promise<ProjectResource & { mapping: { id: string }; warnings: string[] }> {
    return request(this.url(`/projects/${projectId}/mappings`), {
      method: "POST",
      body: JSON.stringify({ phase, text }),
    });
  }

  deleteMapping(projectId: string, mappingId: string): Promise<ProjectResource> {
    return request(this.url(`/projects/${projectId}/mappings/${mappingId}`), { method: "DELETE" });
  }

  runTest(
    projectId: string,
    phase: Phase,
    inputs: Record<string, string>,
    candidates?: number,
  ): Promise<TestRun> {
    return request(this.url(`/projects/${projectId}/tests`), {
      method: "POST",
      body: JSON.stringify({ phase, inputs, candidates }),
    });
  }

  selectBase(projectId: string, resultId: string, override = false): Promise<ProjectResource> {
    return request(this.url(`/projects/${projectId}/base`), {
      method: "POST",
      body: JSON.stringify({ result_id: resultId, override }),
    });
  }

  deploy(projectId: string): Promise<DeployInfo> {
    return request(this.url(`/projects/${projectId}/deploy`), { method: "POST" });
  }

  pushContext(token: string, event: Record<string, string>): Promise<{ seq: number; svg: string }> {
    return request(this.url(`/deploy/${token}/context`), {
      method: "POST",
      body: JSON.stringify(event),
    });
  }

  latestFace(token: string): Promise<string> {
    return request(this.url(`/deploy/${token}/face`));
  }

  streamUrl(token: string): string {
    return this.url(`/deploy/${token}/stream`);
  }
}
