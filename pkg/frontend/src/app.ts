/** Studio entry point: wires the store to the DOM.
 *
 * Design mode: canvas with drawing tools, element panel, tag editor, rule
 * editor, and context editors. Test mode: a simulator form generated from
 * the phase's factor schema, the candidate gallery with validation badges,
 * base selection, and the device deploy pane with a live stream preview.
 */

import { StudioApi } from "./api.js";
import {
  CANVAS_SIZE,
  freshElementId,
  renderTemplate,
  toolGeometry,
  translateGeometry,
} from "./canvas.js";
import { subscribe, type Subscription } from "./sse.js";
import { StudioStore } from "./store.js";
import {
  GRAYSCALE_PALETTE,
  PHASES,
  PRESET_FACTORS,
  PRESET_TAGS,
  type Geometry,
  type Phase,
  type TagCategory,
} from "./types.js";

const api = new StudioApi();
const store = new StudioStore(api);

function el<T extends HTMLElement = HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function h(html: string): HTMLElement {
  const template = document.createElement("template");
  template.innerHTML = html.trim();
  return template.content.firstElementChild as HTMLElement;
}

const escapeHtml = (value: string) =>
  value.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");

// --- drag handling -------------------------------------------------------------

interface DragState {
  elementId: string;
  pointerStart: { x: number; y: number };
  original: Geometry;
  current: Geometry;
}

let drag: DragState | null = null;
let activeTool: "select" | "circle" | "ellipse" | "rect" | "area" = "select";

function canvasPoint(event: PointerEvent): { x: number; y: number } {
  const svg = el("canvas-host").querySelector("svg");
  if (!svg) return { x: 0, y: 0 };
  const rect = svg.getBoundingClientRect();
  return {
    x: ((event.clientX - rect.left) / rect.width) * CANVAS_SIZE,
    y: ((event.clientY - rect.top) / rect.height) * CANVAS_SIZE,
  };
}

function bindCanvas(): void {
  const host = el("canvas-host");

  host.addEventListener("pointerdown", (event) => {
    const state = store.getState();
    if (!state.project || state.mode !== "design") return;
    const target = (event.target as Element).closest("[data-element-id]");
    if (activeTool !== "select") {
      void placeShape(canvasPoint(event));
      return;
    }
    if (!target) {
      store.select(null);
      return;
    }
    const elementId = target.getAttribute("data-element-id")!;
    store.select(elementId);
    const element = state.project.elements.find((item) => item.id === elementId);
    if (!element) return;
    drag = {
      elementId,
      pointerStart: canvasPoint(event),
      original: element.geometry,
      current: element.geometry,
    };
    host.setPointerCapture?.(event.pointerId);
  });

  host.addEventListener("pointermove", (event) => {
    if (!drag) return;
    const point = canvasPoint(event);
    drag.current = translateGeometry(
      drag.original,
      point.x - drag.pointerStart.x,
      point.y - drag.pointerStart.y,
    );
    previewDrag();
  });

  const finish = () => {
    if (!drag) return;
    const { elementId, current, original } = drag;
    drag = null;
    if (JSON.stringify(current) !== JSON.stringify(original)) {
      void store.moveElement(elementId, current); // server may 400 -> snap back
    }
  };
  host.addEventListener("pointerup", finish);
  host.addEventListener("pointercancel", finish);
}

function previewDrag(): void {
  if (!drag) return;
  const node = el("canvas-host").querySelector(`[data-element-id="${drag.elementId}"]`);
  if (!node) return;
  const g = drag.current;
  if (g.type === "circle" || g.type === "ellipse") {
    node.setAttribute("cx", String(g.cx));
    node.setAttribute("cy", String(g.cy));
  } else if (g.type === "rect") {
    node.setAttribute("x", String(g.x));
    node.setAttribute("y", String(g.y));
  } else {
    node.setAttribute("d", g.d);
  }
}

async function placeShape(point: { x: number; y: number }): Promise<void> {
  const state = store.getState();
  if (!state.project) return;
  const tool = activeTool as Exclude<typeof activeTool, "select">;
  const base = toolGeometry(tool);
  const centered = translateGeometry(
    base,
    point.x - 200,
    point.y - 200,
  );
  const taken = new Set(state.project.elements.map((item) => item.id));
  await store.addElement({
    id: freshElementId(tool === "area" ? "area" : tool, taken),
    kind: tool === "area" ? "area" : "shape",
    geometry: centered,
    fill: GRAYSCALE_PALETTE[0],
  });
  activeTool = "select";
  renderToolbar();
}

// --- renderers ------------------------------------------------------------------

function renderToolbar(): void {
  for (const button of el("toolbar").querySelectorAll("button[data-tool]")) {
    button.classList.toggle("active", button.getAttribute("data-tool") === activeTool);
  }
}

function renderHeader(): void {
  const state = store.getState();
  el("project-name").textContent = state.project ? state.project.name : "no project";
  for (const button of el("mode-toggle").querySelectorAll("button")) {
    button.classList.toggle("active", button.dataset.mode === state.mode);
  }
  const expressionButton = el("phase-toggle").querySelector<HTMLButtonElement>(
    'button[data-phase="expression-gen"]',
  )!;
  expressionButton.disabled = !store.expressionUnlocked();
  expressionButton.title = store.expressionUnlocked()
    ? ""
    : "select a base face in the face phase first";
  for (const button of el("phase-toggle").querySelectorAll("button")) {
    button.classList.toggle("active", button.dataset.phase === state.phase);
  }
  el("notice").textContent = state.notice ?? "";
  el("notice").style.display = state.notice ? "block" : "none";

  el("design-pane").style.display = state.mode === "design" ? "grid" : "none";
  el("test-pane").style.display = state.mode === "test" ? "grid" : "none";
}

function renderCanvas(): void {
  const state = store.getState();
  el("canvas-host").innerHTML = state.project
    ? renderTemplate(state.project.elements, state.selection)
    : "";
}

function renderElementPanel(): void {
  const state = store.getState();
  const host = el("element-panel");
  host.innerHTML = "";
  if (!state.project) return;
  const elements = state.project.elements;
  elements.forEach((element, index) => {
    const row = h(`
      <div class="element-row ${element.id === state.selection ? "selected" : ""}">
        <span class="element-name">${escapeHtml(element.id)}</span>
        ${element.tag ? `<span class="chip">${escapeHtml(element.tag)}</span>` : ""}
        <span class="spacer"></span>
        <button data-act="up" title="raise">&#9650;</button>
        <button data-act="down" title="lower">&#9660;</button>
        <button data-act="eye" title="show/hide">${element.visible ? "&#128065;" : "&#8212;"}</button>
        <button data-act="del" title="delete">&#10005;</button>
      </div>`);
    row.querySelector(".element-name")!.addEventListener("click", () => store.select(element.id));
    row.querySelector('[data-act="up"]')!.addEventListener("click", () => {
      if (index === 0) return;
      const order = elements.map((item) => item.id);
      [order[index - 1], order[index]] = [order[index], order[index - 1]];
      void store.reorder(order);
    });
    row.querySelector('[data-act="down"]')!.addEventListener("click", () => {
      if (index === elements.length - 1) return;
      const order = elements.map((item) => item.id);
      [order[index], order[index + 1]] = [order[index + 1], order[index]];
      void store.reorder(order);
    });
    row.querySelector('[data-act="eye"]')!.addEventListener("click", () =>
      void store.toggleVisible(element.id),
    );
    row.querySelector('[data-act="del"]')!.addEventListener("click", () =>
      void store.removeElement(element.id),
    );
    host.append(row);
  });
}

function renderTagEditor(): void {
  const state = store.getState();
  const host = el("tag-editor");
  const element = store.selectedElement();
  if (!element) {
    host.innerHTML = '<p class="hint">select an element to tag it</p>';
    return;
  }
  const category = (host.querySelector<HTMLSelectElement>("#tag-category")?.value ??
    "organ") as TagCategory;
  const presets = category === "custom" ? [] : PRESET_TAGS[category];
  host.innerHTML = `
    <p class="panel-sub">${escapeHtml(element.id)} ${
      element.tag ? `&rarr; <span class="chip">${escapeHtml(element.tag)}</span>` : "(untagged)"
    }</p>
    <div class="row">
      <select id="tag-category">
        ${["organ", "decoration", "context", "custom"]
          .map((c) => `<option value="${c}" ${c === category ? "selected" : ""}>${c}</option>`)
          .join("")}
      </select>
      ${
        category === "custom"
          ? '<input id="tag-name" placeholder="custom tag name"/>'
          : `<select id="tag-name">${presets
              .map((name) => `<option value="${name}">${name}</option>`)
              .join("")}</select>`
      }
      <button id="tag-apply">Apply Tag</button>
      ${element.tag ? '<button id="tag-remove">Remove</button>' : ""}
    </div>
    <div id="tag-default-rule" class="default-rule"></div>`;
  host.querySelector("#tag-category")!.addEventListener("change", renderTagEditor);
  host.querySelector("#tag-apply")!.addEventListener("click", async () => {
    const name = (host.querySelector("#tag-name") as HTMLInputElement | HTMLSelectElement).value;
    if (!name) return;
    await store.applyTag(element.id, name, category);
    showDefaultRule(name);
  });
  host.querySelector("#tag-remove")?.addEventListener("click", () =>
    void store.removeTag(element.id),
  );
  if (element.tag) showDefaultRule(element.tag);
}

/** Auto-added default rule for the element's tag, shown read-only. */
function showDefaultRule(tagName: string): void {
  const state = store.getState();
  const rules = state.project?.rules.filter(
    (rule) =>
      rule.source === "system-default" &&
      rule.targets.includes(tagName) &&
      rule.phase === state.phase,
  );
  const target = document.getElementById("tag-default-rule");
  if (target && rules?.length) {
    target.textContent = `Default: ${rules[0].text}`;
  }
}

function renderRuleEditor(): void {
  const state = store.getState();
  const host = el("rule-list");
  host.innerHTML = "";
  if (!state.project) return;
  const rules = state.project.rules.filter(
    (rule) => rule.phase === state.phase && rule.source === "designer",
  );
  for (const rule of rules) {
    const row = h(`
      <div class="rule-row">
        <span>${rule.scope === "targeted" ? `<span class="chip">@${rule.targets.join(" @")}</span>` : '<span class="chip global">global</span>'}
        ${escapeHtml(rule.text)}</span>
        <button title="delete">&#10005;</button>
      </div>`);
    row.querySelector("button")!.addEventListener("click", () => void store.deleteRule(rule.id));
    host.append(row);
  }
  const datalist = el<HTMLDataListElement>("tag-options");
  datalist.innerHTML = store
    .appliedTags()
    .map((tag) => `<option value="@${tag}"></option>`)
    .join("");
}

function renderContextEditor(): void {
  const state = store.getState();
  if (!state.project) return;
  const factors = state.project.factors[state.phase];
  const host = el("factor-list");
  host.innerHTML = "";
  for (const factor of factors) {
    const row = h(`
      <div class="rule-row">
        <span><span class="chip">${escapeHtml(factor.name)}</span> ${factor.origin}</span>
        <button title="delete">&#10005;</button>
      </div>`);
    row.querySelector("button")!.addEventListener("click", () =>
      void store.deleteFactor(factor.name),
    );
    host.append(row);
  }
  const presetsHost = el("factor-presets");
  presetsHost.innerHTML = "";
  for (const preset of PRESET_FACTORS) {
    if (factors.some((factor) => factor.name === preset)) continue;
    const button = h(`<button class="preset">${preset}</button>`);
    button.addEventListener("click", () => void store.addFactor(preset));
    presetsHost.append(button);
  }

  const mappings = state.project.mapping_rules[state.phase];
  const mappingHost = el("mapping-list");
  mappingHost.innerHTML = "";
  for (const mapping of mappings) {
    const row = h(`
      <div class="rule-row">
        <span>${escapeHtml(mapping.text)}</span>
        <button title="delete">&#10005;</button>
      </div>`);
    row.querySelector("button")!.addEventListener("click", () =>
      void store.deleteMapping(mapping.id),
    );
    mappingHost.append(row);
  }
}

function renderSimulator(): void {
  const state = store.getState();
  if (!state.project) return;
  const factors = state.project.factors[state.phase];
  const form = el("simulator-form");
  form.innerHTML = "";
  for (const factor of factors) {
    const row = h(`
      <label class="sim-row">${escapeHtml(factor.name)}
        <input name="${escapeHtml(factor.name)}" placeholder="${escapeHtml(
          factor.sample_values[0] ?? "",
        )}" value="${escapeHtml(state.pendingInputs[factor.name] ?? "")}"/>
      </label>`);
    row.querySelector("input")!.addEventListener("input", (event) => {
      store.setInput(factor.name, (event.target as HTMLInputElement).value);
    });
    form.append(row);
  }
  if (!factors.length) {
    form.innerHTML = '<p class="hint">define context factors in design mode first</p>';
  }
}

function renderGallery(): void {
  const state = store.getState();
  const host = el("gallery");
  host.innerHTML = "";
  for (const result of state.gallery) {
    const badges = result.error
      ? `<span class="badge invalid">${escapeHtml(result.error.split(":")[0])}</span>`
      : result.report?.valid
        ? '<span class="badge valid">valid</span>'
        : (result.report?.violations ?? [])
            .map((violation) => `<span class="badge invalid">${violation.code}</span>`)
            .join(" ");
    const isBase = state.project?.base_face?.source_result_id === result.id;
    const card = h(`
      <div class="card ${isBase ? "base" : ""}">
        <div class="card-face">${result.svg ?? '<p class="hint">no output</p>'}</div>
        <div class="card-footer">
          ${badges}
          ${
            result.phase === "face-gen" && result.report?.valid
              ? `<button class="select-base">${isBase ? "Base &#10003;" : "Select as Base"}</button>`
              : ""
          }
        </div>
      </div>`);
    card.querySelector(".select-base")?.addEventListener("click", () =>
      void store.selectAsBase(result.id),
    );
    host.append(card);
  }
}

let streamSubscription: Subscription | null = null;

function renderDeployPane(): void {
  const state = store.getState();
  el("deploy-info").innerHTML = state.deploy
    ? `<p>device page: <a href="${state.deploy.deviceUrl}" target="_blank">${state.deploy.deviceUrl}</a></p>`
    : '<p class="hint">deploy to get a device link and live preview</p>';
  el("live-face").innerHTML = state.liveFace ?? state.project?.base_face?.svg ?? "";

  const pushForm = el("push-form");
  pushForm.style.display = state.deploy ? "block" : "none";
}

function connectStream(): void {
  const state = store.getState();
  if (!state.deploy) return;
  streamSubscription?.close();
  streamSubscription = subscribe(api.streamUrl(state.deploy.token), (data) => {
    try {
      const frame = JSON.parse(data) as { svg: string };
      store.receiveFrame(frame.svg);
    } catch {
      /* ignore malformed frames */
    }
  });
}

// --- static wiring --------------------------------------------------------------

function bindStaticControls(): void {
  for (const button of el("mode-toggle").querySelectorAll<HTMLButtonElement>("button")) {
    button.addEventListener("click", () => store.setMode(button.dataset.mode as "design" | "test"));
  }
  for (const button of el("phase-toggle").querySelectorAll<HTMLButtonElement>("button")) {
    button.addEventListener("click", () => store.setPhase(button.dataset.phase as Phase));
  }
  for (const button of el("toolbar").querySelectorAll<HTMLButtonElement>("button[data-tool]")) {
    button.addEventListener("click", () => {
      activeTool = button.dataset.tool as typeof activeTool;
      renderToolbar();
    });
  }
  el("import-path").addEventListener("click", async () => {
    const d = window.prompt("Paste SVG path data (the d attribute):");
    if (!d) return;
    const state = store.getState();
    const taken = new Set(state.project?.elements.map((item) => item.id) ?? []);
    await store.addElement({
      id: freshElementId("import", taken),
      kind: "imported-path",
      geometry: { type: "path", d },
      fill: GRAYSCALE_PALETTE[1],
    });
  });

  const paletteHost = el("palette");
  for (const color of GRAYSCALE_PALETTE) {
    const swatch = h(`<button class="swatch" style="background:${color}" title="${color}"></button>`);
    swatch.addEventListener("click", () => {
      const selected = store.getState().selection;
      if (selected) void store.setFill(selected, color);
    });
    paletteHost.append(swatch);
  }

  el("rule-save").addEventListener("click", async () => {
    const input = el<HTMLInputElement>("rule-text");
    if (!input.value.trim()) return;
    const warnings = await store.addRule(input.value.trim());
    input.value = "";
    if (warnings.length) {
      el("rule-warnings").textContent = `unknown tags: ${warnings.join("; ")}`;
    } else {
      el("rule-warnings").textContent = "";
    }
  });

  el("factor-add").addEventListener("click", async () => {
    const input = el<HTMLInputElement>("factor-name");
    if (!input.value.trim()) return;
    await store.addFactor(input.value.trim());
    input.value = "";
  });

  el("mapping-save").addEventListener("click", async () => {
    const input = el<HTMLInputElement>("mapping-text");
    if (!input.value.trim()) return;
    await store.addMapping(input.value.trim());
    input.value = "";
  });

  el("run-test").addEventListener("click", () => void store.runTest());
  el("deploy-button").addEventListener("click", async () => {
    await store.deployToDevice();
    connectStream();
    renderDeployPane();
  });

  el("push-send").addEventListener("click", () => {
    const state = store.getState();
    const event: Record<string, string> = {};
    for (const input of el("push-fields").querySelectorAll<HTMLInputElement>("input")) {
      if (input.value.trim()) event[input.name] = input.value.trim();
    }
    if (Object.keys(event).length) void store.pushContext(event);
  });

  el("project-new").addEventListener("click", async () => {
    const name = window.prompt("Project name:");
    if (name) {
      await store.create(name);
      await refreshProjectList();
    }
  });
  el<HTMLSelectElement>("project-select").addEventListener("change", (event) => {
    const id = (event.target as HTMLSelectElement).value;
    if (id) void store.open(id);
  });
}

async function refreshProjectList(): Promise<void> {
  const select = el<HTMLSelectElement>("project-select");
  const { projects } = await api.listProjects();
  const current = store.getState().project?.id ?? "";
  select.innerHTML =
    '<option value="">open project...</option>' +
    projects
      .map(
        (id) => `<option value="${id}" ${id === current ? "selected" : ""}>${id}</option>`,
      )
      .join("");
}

function renderPushFields(): void {
  const state = store.getState();
  const host = el("push-fields");
  host.innerHTML = "";
  if (!state.project || !state.deploy) return;
  for (const factor of state.project.factors["expression-gen"]) {
    host.append(
      h(
        `<label class="sim-row">${escapeHtml(factor.name)}<input name="${escapeHtml(
          factor.name,
        )}"/></label>`,
      ),
    );
  }
}

function renderAll(): void {
  renderHeader();
  renderCanvas();
  renderElementPanel();
  renderTagEditor();
  renderRuleEditor();
  renderContextEditor();
  renderSimulator();
  renderGallery();
  renderDeployPane();
  renderPushFields();
}

export async function boot(): Promise<void> {
  bindStaticControls();
  bindCanvas();
  renderToolbar();
  store.subscribe(renderAll);
  await refreshProjectList();
}

if (typeof document !== "undefined" && document.getElementById("canvas-host")) {
  void boot();
}
