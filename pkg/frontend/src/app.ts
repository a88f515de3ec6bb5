/**
 * Browser wiring: owns the DOM skeleton, talks to the service through
 * ApiClient, and re-renders the pure scenes whenever payloads or
 * interaction state change. No analytics happen here; every drawn
 * number arrives in a server payload.
 */

import { ApiClient, ApiError } from "./api.js";
import { buildControlScene } from "./control.js";
import { buildFocusScene } from "./focus.js";
import { buildGlobalScene } from "./global.js";
import { buildInspectorModel, describeAdjustment, negate, remove } from "./adjustment.js";
import type { InspectorModel, InspectorRow } from "./adjustment.js";
import { buildPathScene } from "./path.js";
import { mount } from "./render.js";
import { setInspector, setNode, setTimeWindow, Store, toggleSelection } from "./state.js";
import type { TargetRefDoc, TreeDoc } from "./types.js";

const SKELETON = `
<header class="toolbar">
  <strong>scsim</strong>
  <label>companies <input type="file" id="file-companies" accept=".csv"></label>
  <label>edges <input type="file" id="file-edges" accept=".csv"></label>
  <button id="btn-create">new session</button>
  <label>log <input type="file" id="file-log" accept=".jsonl"></label>
  <button id="btn-import">import</button>
  <span class="spacer"></span>
  <label>turns <input type="number" id="in-turns" value="4" min="1" size="3"></label>
  <button id="btn-run">run</button>
  <button id="btn-export">export</button>
  <span id="status" class="status"></span>
</header>
<main>
  <section class="pane" id="pane-path">
    <h2>path</h2>
    <div class="canvas" id="view-path"></div>
    <div class="staged-bar" id="staged-bar"></div>
  </section>
  <section class="pane" id="pane-global">
    <h2>global</h2>
    <div class="canvas" id="view-global"></div>
  </section>
  <section class="pane" id="pane-focus">
    <h2>focus
      <label>firms <input type="text" id="in-focus" placeholder="C1, C2"></label>
      <label>window <input type="text" id="in-window" placeholder="0:7"></label>
      <button id="btn-focus">show</button>
    </h2>
    <div class="canvas" id="view-focus"></div>
  </section>
  <section class="pane" id="pane-inspector">
    <h2>reasoning <span id="inspector-company"></span></h2>
    <div id="view-inspector"></div>
  </section>
  <section class="pane" id="pane-control">
    <h2>control</h2>
    <div class="canvas" id="view-control"></div>
  </section>
</main>
`;

function el<T extends HTMLElement>(root: ParentNode, id: string): T {
  const found = root.querySelector(`#${id}`);
  if (!found) throw new Error(`missing element #${id}`);
  return found as T;
}

async function readFile(input: HTMLInputElement): Promise<string> {
  const file = input.files?.[0];
  if (!file) throw new Error("no file chosen");
  return file.text();
}

export class App {
  private readonly root: HTMLElement;
  private readonly api: ApiClient;
  private readonly store = new Store();
  private sessionId: string | null = null;
  private tree: TreeDoc | null = null;

  constructor(root: HTMLElement, api: ApiClient) {
    this.root = root;
    this.api = api;
    root.innerHTML = SKELETON;
    this.bind();
    const fromHash = new URLSearchParams(location.hash.slice(1)).get("session");
    if (fromHash) {
      this.sessionId = fromHash;
      void this.refreshTree();
    }
  }

  private bind(): void {
    el<HTMLButtonElement>(this.root, "btn-create").addEventListener("click", () => {
      void this.createSession();
    });
    el<HTMLButtonElement>(this.root, "btn-import").addEventListener("click", () => {
      void this.importSession();
    });
    el<HTMLButtonElement>(this.root, "btn-run").addEventListener("click", () => {
      void this.runSimulation();
    });
    el<HTMLButtonElement>(this.root, "btn-export").addEventListener("click", () => {
      void this.exportLog();
    });
    el<HTMLButtonElement>(this.root, "btn-focus").addEventListener("click", () => {
      this.applyFocusInputs();
      void this.renderViews();
    });

    el<HTMLElement>(this.root, "view-path").addEventListener("click", (event) => {
      const hit = (event.target as Element).closest("[data-node]");
      if (!hit) return;
      this.store.apply((s) => setNode(s, (hit as HTMLElement).dataset.node!));
      void this.renderViews();
    });
    const toggleCompany = (event: Event) => {
      const hit = (event.target as Element).closest("[data-company]");
      if (!hit) return;
      const cid = (hit as HTMLElement).dataset.company!;
      this.store.apply((s) => setInspector(toggleSelection(s, cid), cid));
      void this.renderViews();
    };
    el<HTMLElement>(this.root, "view-global").addEventListener("click", toggleCompany);
    el<HTMLElement>(this.root, "view-focus").addEventListener("click", toggleCompany);

    el<HTMLElement>(this.root, "view-inspector").addEventListener("click", (event) => {
      const button = (event.target as Element).closest("button[data-action]");
      if (!button) return;
      const action = (button as HTMLElement).dataset.action!;
      const target = JSON.parse((button as HTMLElement).dataset.target!) as TargetRefDoc;
      void this.stage(action, target);
    });
    el<HTMLElement>(this.root, "staged-bar").addEventListener("click", (event) => {
      const button = (event.target as Element).closest("button[data-staged-op]");
      if (!button) return;
      const op = (button as HTMLElement).dataset.stagedOp!;
      if (op === "apply") void this.applyStaged();
      if (op === "reset") void this.resetStaged();
    });
  }

  private status(text: string, error = false): void {
    const bar = el<HTMLElement>(this.root, "status");
    bar.textContent = text;
    bar.classList.toggle("error", error);
  }

  private async guard<T>(work: () => Promise<T>): Promise<T | undefined> {
    try {
      return await work();
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        // a sibling run got there first; the tree on screen is stale
        this.status(`${err.message} — refreshing the tree`, true);
        await this.refreshTree();
        return undefined;
      }
      this.status(err instanceof Error ? err.message : String(err), true);
      return undefined;
    }
  }

  private async createSession(): Promise<void> {
    await this.guard(async () => {
      const companies = await readFile(el<HTMLInputElement>(this.root, "file-companies"));
      const edges = await readFile(el<HTMLInputElement>(this.root, "file-edges"));
      const dataset = await this.api.createDataset({ companies, edges });
      const created = await this.api.createSession(dataset.datasetId);
      this.adoptSession(created.sessionId, created.tree);
      this.status(`session ${created.sessionId} on ${dataset.companies} firms`);
    });
  }

  private async importSession(): Promise<void> {
    await this.guard(async () => {
      const log = await readFile(el<HTMLInputElement>(this.root, "file-log"));
      const created = await this.api.importSession(log);
      this.adoptSession(created.sessionId, created.tree);
      this.status(`imported ${created.sessionId}`);
    });
  }

  private adoptSession(sessionId: string, tree: TreeDoc): void {
    this.sessionId = sessionId;
    this.tree = tree;
    location.hash = `session=${sessionId}`;
    this.store.apply((s) => setNode(s, tree.active));
    void this.renderViews();
  }

  private async refreshTree(): Promise<void> {
    if (!this.sessionId) return;
    const tree = await this.api.tree(this.sessionId);
    this.tree = tree;
    if (!this.store.get().nodeId) {
      this.store.apply((s) => setNode(s, tree.active));
    }
    await this.renderViews();
  }

  private async runSimulation(): Promise<void> {
    if (!this.sessionId) return;
    const turns = Number(el<HTMLInputElement>(this.root, "in-turns").value) || undefined;
    await this.guard(async () => {
      const fromNode = this.store.get().nodeId ?? undefined;
      this.status("running...");
      const started = await this.api.run(this.sessionId!, { fromNode, turns, wait: false });
      const run = await this.api.pollRun(this.sessionId!, started.runId, (r) => {
        this.status(`run ${r.runId}: ${r.status}, ${r.nodes.length} nodes`);
      });
      if (run.status === "failed") {
        this.status(`run failed: ${run.error ?? "unknown"}`, true);
      } else {
        this.status(`run ${run.runId} done`);
      }
      await this.refreshTree();
      const last = run.nodes[run.nodes.length - 1];
      if (last) this.store.apply((s) => setNode(s, last));
      await this.renderViews();
    });
  }

  private async exportLog(): Promise<void> {
    if (!this.sessionId) return;
    await this.guard(async () => {
      const text = await this.api.exportLog(this.sessionId!);
      const blob = new Blob([text], { type: "application/x-ndjson" });
      const link = document.createElement("a");
      link.href = URL.createObjectURL(blob);
      link.download = `${this.sessionId}.jsonl`;
      link.click();
      URL.revokeObjectURL(link.href);
    });
  }

  private applyFocusInputs(): void {
    const window = el<HTMLInputElement>(this.root, "in-window").value.trim();
    const [lo, hi] = window.includes(":") ? window.split(":", 2) : ["", ""];
    this.store.apply((s) =>
      setTimeWindow(s, lo ? Number(lo) : null, hi ? Number(hi) : null),
    );
  }

  private focusFirms(): string[] {
    return el<HTMLInputElement>(this.root, "in-focus")
      .value.split(",")
      .map((part) => part.trim())
      .filter(Boolean);
  }

  private async stage(action: string, target: TargetRefDoc): Promise<void> {
    const nodeId = this.store.get().nodeId;
    if (!this.sessionId || !nodeId) return;
    await this.guard(async () => {
      const doc = action === "negate" ? negate(target) : remove(target);
      await this.api.stageAdjustment(this.sessionId!, nodeId, doc);
      this.status(`staged: ${describeAdjustment(doc)}`);
      await this.refreshTree();
    });
  }

  private async applyStaged(): Promise<void> {
    const nodeId = this.store.get().nodeId;
    if (!this.sessionId || !nodeId) return;
    await this.guard(async () => {
      const applied = await this.api.applyAdjustments(this.sessionId!, nodeId);
      this.tree = applied.tree;
      this.store.apply((s) => setNode(s, applied.nodeId));
      this.status(`applied, new node ${applied.nodeId}`);
      await this.renderViews();
    });
  }

  private async resetStaged(): Promise<void> {
    const nodeId = this.store.get().nodeId;
    if (!this.sessionId || !nodeId) return;
    await this.guard(async () => {
      await this.api.resetAdjustments(this.sessionId!, nodeId);
      this.status("staged adjustments dropped");
      await this.refreshTree();
    });
  }

  private async renderViews(): Promise<void> {
    if (!this.sessionId || !this.tree) return;
    const state = this.store.get();
    const nodeId = state.nodeId ?? this.tree.active;

    mount(el(this.root, "view-path"), buildPathScene(this.tree));
    this.renderStagedBar(nodeId);

    await this.guard(async () => {
      const globalDoc = await this.api.globalView(this.sessionId!, nodeId);
      mount(el(this.root, "view-global"), buildGlobalScene(globalDoc, { selection: state.selection }));

      const firms = this.focusFirms().length > 0 ? this.focusFirms() : state.selection.slice(0, 3);
      if (firms.length > 0) {
        const range: { from?: number; to?: number } = {};
        if (state.tFrom !== null) range.from = state.tFrom;
        if (state.tTo !== null) range.to = state.tTo;
        const focusDoc = await this.api.focusView(this.sessionId!, nodeId, firms, range);
        mount(el(this.root, "view-focus"), buildFocusScene(focusDoc));
      } else {
        el(this.root, "view-focus").innerHTML =
          '<p class="hint">select firms in the global view or type ids above</p>';
      }

      const inspectorCompany = state.inspectorCompany;
      if (inspectorCompany) {
        const doc = await this.api.adjustmentView(this.sessionId!, nodeId, inspectorCompany);
        el(this.root, "inspector-company").textContent = inspectorCompany;
        this.renderInspector(buildInspectorModel(doc));
      }

      const controlDoc = await this.api.controlPanelView(
        this.sessionId!,
        nodeId,
        inspectorCompany ?? undefined,
      );
      mount(el(this.root, "view-control"), buildControlScene(controlDoc));
    });
  }

  private renderStagedBar(nodeId: string): void {
    const node = this.tree?.nodes.find((n) => n.nodeId === nodeId);
    const bar = el<HTMLElement>(this.root, "staged-bar");
    if (!node?.hasStaged) {
      bar.innerHTML = "";
      return;
    }
    bar.innerHTML =
      `<span>staged edits on ${nodeId}</span>` +
      '<button data-staged-op="apply">apply</button>' +
      '<button data-staged-op="reset">reset</button>';
  }

  private renderInspector(model: InspectorModel): void {
    const target = el<HTMLElement>(this.root, "view-inspector");
    const escape = (text: string) =>
      text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/"/g, "&quot;");
    const rowHtml = (row: InspectorRow): string => {
      const stagedCls = row.staged === "none" ? "" : ` staged staged-${row.staged}`;
      const buttons = row.target
        ? `<button data-action="negate" data-target="${escape(JSON.stringify(row.target))}">negate</button>` +
          `<button data-action="delete" data-target="${escape(JSON.stringify(row.target))}">delete</button>`
        : "";
      return (
        `<div class="row depth-${row.depth}${stagedCls}">` +
        `<span class="row-text">${escape(row.text)}</span>` +
        `<span class="row-detail">${escape(row.detail)}</span>${buttons}</div>`
      );
    };
    target.innerHTML = model.sections
      .map(
        (section) =>
          `<h3>${escape(section.title)}</h3>` + section.rows.map(rowHtml).join(""),
      )
      .join("");
    if (model.stagedAdds.length > 0) {
      target.innerHTML +=
        "<h3>staged additions</h3>" +
        model.stagedAdds
          .map((doc) => `<div class="row">${escape(describeAdjustment(doc))}</div>`)
          .join("");
    }
  }
}
