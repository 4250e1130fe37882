/** Studio state container.
 *
 * The server is the single source of truth: every mutation goes through the
 * API and the store swaps in the full project resource returned by the
 * server. Canvas drags apply geometry locally for immediate feedback and
 * reconcile (or snap back) when the commit settles. The revision token rides
 * along on the project resource; a 409 from a stale token triggers a refetch
 * instead of a double-apply.
 */

import { ApiError, StudioApi, type ElementInput } from "./api.js";
import type {
  GenerationResult,
  Geometry,
  Phase,
  ProjectResource,
  TagCategory,
  TemplateElement,
} from "./types.js";

export type Mode = "design" | "test";

export interface StudioState {
  project: ProjectResource | null;
  mode: Mode;
  phase: Phase;
  selection: string | null;
  pendingInputs: Record<string, string>;
  gallery: GenerationResult[];
  deploy: { token: string; deviceUrl: string } | null;
  liveFace: string | null;
  notice: string | null;
}

type Listener = (state: StudioState) => void;

export class StudioStore {
  private state: StudioState = {
    project: null,
    mode: "design",
    phase: "face-gen",
    selection: null,
    pendingInputs: {},
    gallery: [],
    deploy: null,
    liveFace: null,
    notice: null,
  };

  private listeners = new Set<Listener>();

  constructor(readonly api: StudioApi) {}

  getState(): StudioState {
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.add(listener);
    listener(this.state);
    return () => this.listeners.delete(listener);
  }

  private set(patch: Partial<StudioState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) listener(this.state);
  }

  private adopt(project: ProjectResource, patch: Partial<StudioState> = {}): void {
    this.set({ project, notice: null, ...patch });
  }

  /** Wrap a mutation; stale-revision conflicts reconcile by refetching. */
  private async mutate(run: () => Promise<ProjectResource>): Promise<ProjectResource | null> {
    const current = this.state.project;
    try {
      const project = await run();
      this.adopt(project);
      return project;
    } catch (error) {
      if (error instanceof ApiError && error.status === 409 && current) {
        const fresh = await this.api.getProject(current.id);
        this.adopt(fresh, { notice: "edited elsewhere; refreshed to the latest revision" });
        return fresh;
      }
      if (current) {
        // snap back to committed state; the server rejected the edit
        const fresh = await this.api.getProject(current.id);
        this.adopt(fresh, { notice: error instanceof Error ? error.message : String(error) });
      } else {
        this.set({ notice: error instanceof Error ? error.message : String(error) });
      }
      return null;
    }
  }

  async open(projectId: string): Promise<void> {
    this.adopt(await this.api.getProject(projectId), {
      selection: null,
      gallery: [],
      deploy: null,
      liveFace: null,
    });
  }

  async create(name: string): Promise<void> {
    this.adopt(await this.api.createProject(name), { selection: null, gallery: [] });
  }

  setMode(mode: Mode): void {
    this.set({ mode });
  }

  setPhase(phase: Phase): void {
    this.set({ phase, pendingInputs: {}, gallery: [] });
  }

  select(elementId: string | null): void {
    this.set({ selection: elementId });
  }

  setInput(factor: string, value: string): void {
    this.set({ pendingInputs: { ...this.state.pendingInputs, [factor]: value } });
  }

  selectedElement(): TemplateElement | null {
    const { project, selection } = this.state;
    if (!project || !selection) return null;
    return project.elements.find((el) => el.id === selection) ?? null;
  }

  /** Expression phase is locked until a base face exists. */
  expressionUnlocked(): boolean {
    return this.state.project?.base_face != null;
  }

  appliedTags(): string[] {
    return (this.state.project?.elements ?? [])
      .map((el) => el.tag)
      .filter((tag): tag is string => !!tag);
  }

  // -- design-mode edits ------------------------------------------------------

  async addElement(element: ElementInput): Promise<void> {
    const project = await this.mutate(() =>
      this.api.addElement(this.requireProject().id, element),
    );
    if (project) this.set({ selection: element.id });
  }

  async moveElement(elementId: string, geometry: Geometry): Promise<void> {
    const project = this.requireProject();
    const element = project.elements.find((el) => el.id === elementId);
    if (!element) return;
    // optimistic: show the drag result immediately, server decides if it sticks
    const optimistic: ProjectResource = {
      ...project,
      elements: project.elements.map((el) =>
        el.id === elementId ? { ...el, geometry } : el,
      ),
    };
    this.set({ project: optimistic });
    await this.mutate(() =>
      this.api.updateElement(project.id, {
        id: elementId,
        kind: element.kind,
        geometry,
        fill: element.fill,
        visible: element.visible,
      }),
    );
  }

  async setFill(elementId: string, fill: string): Promise<void> {
    const project = this.requireProject();
    const element = project.elements.find((el) => el.id === elementId);
    if (!element) return;
    await this.mutate(() =>
      this.api.updateElement(project.id, {
        id: elementId,
        kind: element.kind,
        geometry: element.geometry,
        fill,
        visible: element.visible,
      }),
    );
  }

  async toggleVisible(elementId: string): Promise<void> {
    const project = this.requireProject();
    const element = project.elements.find((el) => el.id === elementId);
    if (!element) return;
    await this.mutate(() =>
      this.api.updateElement(project.id, {
        id: elementId,
        kind: element.kind,
        geometry: element.geometry,
        fill: element.fill,
        visible: !element.visible,
      }),
    );
  }

  async removeElement(elementId: string): Promise<void> {
    await this.mutate(() => this.api.deleteElement(this.requireProject().id, elementId));
    if (this.state.selection === elementId) this.set({ selection: null });
  }

  async reorder(order: string[]): Promise<void> {
    await this.mutate(() => this.api.reorderElements(this.requireProject().id, order));
  }

  async applyTag(elementId: string, name: string, category: TagCategory): Promise<void> {
    await this.mutate(() => this.api.applyTag(this.requireProject().id, elementId, name, category));
  }

  async removeTag(elementId: string): Promise<void> {
    await this.mutate(() => this.api.removeTag(this.requireProject().id, elementId));
  }

  async addRule(text: string): Promise<string[]> {
    let warnings: string[] = [];
    await this.mutate(async () => {
      const outcome = await this.api.addRule(this.requireProject().id, this.state.phase, text);
      warnings = outcome.warnings;
      return outcome;
    });
    return warnings;
  }

  async deleteRule(ruleId: string): Promise<void> {
    await this.mutate(() => this.api.deleteRule(this.requireProject().id, ruleId));
  }

  async addFactor(name: string): Promise<void> {
    await this.mutate(() => this.api.addFactor(this.requireProject().id, this.state.phase, name));
  }

  async deleteFactor(name: string): Promise<void> {
    await this.mutate(() => this.api.deleteFactor(this.requireProject().id, this.state.phase, name));
  }

  async addMapping(text: string): Promise<void> {
    await this.mutate(() => this.api.addMapping(this.requireProject().id, this.state.phase, text));
  }

  async deleteMapping(mappingId: string): Promise<void> {
    await this.mutate(() => this.api.deleteMapping(this.requireProject().id, mappingId));
  }

  // -- test-mode actions ----------------------------------------------------------

  async runTest(): Promise<void> {
    const project = this.requireProject();
    try {
      const run = await this.api.runTest(project.id, this.state.phase, this.state.pendingInputs);
      const fresh = await this.api.getProject(project.id);
      this.adopt(fresh, { gallery: run.results });
    } catch (error) {
      this.set({ notice: error instanceof Error ? error.message : String(error) });
    }
  }

  async selectAsBase(resultId: string): Promise<void> {
    await this.mutate(() => this.api.selectBase(this.requireProject().id, resultId));
  }

  async deployToDevice(): Promise<void> {
    const project = this.requireProject();
    try {
      const info = await this.api.deploy(project.id);
      this.set({ deploy: { token: info.token, deviceUrl: info.device_url }, liveFace: null });
    } catch (error) {
      this.set({ notice: error instanceof Error ? error.message : String(error) });
    }
  }

  async pushContext(event: Record<string, string>): Promise<void> {
    const deploy = this.state.deploy;
    if (!deploy) return;
    try {
      const frame = await this.api.pushContext(deploy.token, event);
      this.set({ liveFace: frame.svg });
    } catch (error) {
      this.set({ notice: error instanceof Error ? error.message : String(error) });
    }
  }

  receiveFrame(svg: string): void {
    this.set({ liveFace: svg });
  }

  private requireProject(): ProjectResource {
    const project = this.state.project;
    if (!project) throw new Error("no project open");
    return project;
  }
}
