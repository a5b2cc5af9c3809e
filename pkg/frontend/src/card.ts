/** One card per substrate: header controls plus the grid visualization.
 *
 * The card issues ops through its host (which serializes one in-flight
 * mutation per card) and re-renders from fresh layout responses. It keeps no
 * derived analytics of its own: counts, fractions, and link highlights all
 * come from the layout document.
 */

import { ApiError } from "./api.js";
import * as ops from "./ops.js";
import { buildSvg, hoverInfo } from "./render.js";
import { CardSelection, facetId } from "./selection.js";
import type {
  Axis,
  ColumnInfo,
  FacetKeyDoc,
  LayoutDoc,
  OpDoc,
  SubstrateSummary,
} from "./types.js";

export interface CardHost {
  readonly sessionId: string;
  columns(): ColumnInfo[];
  hasEdges(): boolean;
  /** POST the op and fan the mutation out to every card. */
  execute(op: OpDoc): Promise<void>;
  /** Undo/redo until the log cursor reaches `cursor`. */
  jumpTo(cursor: number): Promise<void>;
  logEntries(): { cursor: number; kinds: string[] };
  fetchLayout(substrateId: number, w: number, h: number): Promise<LayoutDoc>;
  fetchHistogram(substrateId: number, attribute: string): Promise<{ category: string; count: number }[]>;
  exportUrl(substrateId: number): string;
  removeCard(card: Card): void;
  moveCard(card: Card, delta: number): void;
  showToast(message: string): void;
}

export function promptText(message: string, fallback: string | null = null): string | null {
  if (typeof window !== "undefined" && typeof window.prompt === "function") {
    return window.prompt(message, fallback ?? "");
  }
  return fallback;
}

const DEFAULT_BODY = { w: 800, h: 600 };

function option(label: string, value: string): HTMLOptionElement {
  const node = document.createElement("option");
  node.textContent = label;
  node.value = value;
  return node;
}

export class Card {
  readonly root: HTMLElement;
  readonly selection = new CardSelection();
  summary: SubstrateSummary;
  layout: LayoutDoc | null = null;
  collapsed = false;

  private host: CardHost;
  private queue: Promise<void> = Promise.resolve();
  private body!: HTMLElement;
  private scroller!: HTMLElement;
  private popup!: HTMLElement;
  private title!: HTMLElement;
  private stackRow!: HTMLElement;
  private partitionH!: HTMLSelectElement;
  private partitionV!: HTMLSelectElement;
  private peekSelect!: HTMLSelectElement;
  private pruneBtn!: HTMLButtonElement;
  private projectBtn!: HTMLButtonElement;
  private pileBtn!: HTMLButtonElement;
  private linksBox!: HTMLInputElement;
  private arrowsBox!: HTMLInputElement;
  private logSelect!: HTMLSelectElement;
  private histAttr!: HTMLSelectElement;
  private histBars!: HTMLElement;
  private histThreshold!: HTMLInputElement;
  private exportLink!: HTMLAnchorElement;

  constructor(host: CardHost, summary: SubstrateSummary) {
    this.host = host;
    this.summary = summary;
    this.root = document.createElement("section");
    this.root.className = "card";
    this.root.dataset.substrateId = String(summary.id);
    this.root.appendChild(this.buildHeader());
    this.body = document.createElement("div");
    this.body.className = "card-body";
    this.scroller = document.createElement("div");
    this.scroller.className = "card-scroll";
    this.body.appendChild(this.scroller);
    this.popup = document.createElement("div");
    this.popup.className = "popup";
    this.popup.hidden = true;
    this.body.appendChild(this.popup);
    this.root.appendChild(this.body);
    this.wireBodyEvents();
  }

  // --- header -------------------------------------------------------------

  private buildHeader(): HTMLElement {
    const header = document.createElement("header");
    header.className = "card-header";

    this.title = document.createElement("h2");
    header.appendChild(this.title);

    this.stackRow = document.createElement("div");
    this.stackRow.className = "stacks";
    header.appendChild(this.stackRow);

    const controls = document.createElement("div");
    controls.className = "controls";
    header.appendChild(controls);

    this.partitionH = this.makeSelect(controls, "partition-h", "partition ↔", (value) => {
      void this.run(ops.pivotPartitionOp(this.summary.id, "horizontal", value));
    });
    this.partitionV = this.makeSelect(controls, "partition-v", "partition ↕", (value) => {
      void this.run(ops.pivotPartitionOp(this.summary.id, "vertical", value));
    });
    this.peekSelect = this.makeSelect(controls, "peek", "peek", (value) => {
      void this.run(value === "" ? ops.clearPeekOp(this.summary.id) : ops.peekOp(this.summary.id, value));
    });

    this.pruneBtn = this.makeButton(controls, "prune", "prune", () => {
      void this.run(ops.pruneOp(this.selection.toWire(this.summary.id)), true);
    });
    this.projectBtn = this.makeButton(controls, "project", "project", () => {
      const name = promptText("Name for the new substrate (optional):");
      void this.run(ops.projectOp(this.selection.toWire(this.summary.id), name || undefined), true);
    });
    this.pileBtn = this.makeButton(controls, "pile", "pile", () => {
      const name = promptText("Name for the pile (optional):");
      void this.run(ops.pileOp(this.selection.toWire(this.summary.id), name || undefined), true);
    });

    this.linksBox = this.makeCheckbox(controls, "show-links", "links", (checked) => {
      void this.run(ops.toggleViewOp(this.summary.id, "links", checked));
    });
    this.arrowsBox = this.makeCheckbox(controls, "show-arrows", "arrows", (checked) => {
      void this.run(ops.toggleViewOp(this.summary.id, "arrows", checked));
    });

    this.logSelect = this.makeSelect(controls, "log", "log", (value) => {
      void this.host.jumpTo(Number(value)).catch((err) => this.report(err));
    });

    this.exportLink = document.createElement("a");
    this.exportLink.className = "save";
    this.exportLink.textContent = "save";
    this.exportLink.setAttribute("download", "");
    controls.appendChild(this.exportLink);

    this.makeButton(controls, "collapse", "▾", () => this.toggleCollapsed());
    this.makeButton(controls, "move-left", "◂", () => this.host.moveCard(this, -1));
    this.makeButton(controls, "move-right", "▸", () => this.host.moveCard(this, +1));
    this.makeButton(controls, "delete", "✕", () => this.host.removeCard(this));

    const hist = document.createElement("details");
    hist.className = "histogram";
    const summaryEl = document.createElement("summary");
    summaryEl.textContent = "histogram";
    hist.appendChild(summaryEl);
    this.histAttr = this.makeSelect(hist, "hist-attr", "attribute", (value) => {
      void this.loadHistogram(value);
    });
    this.histBars = document.createElement("div");
    this.histBars.className = "hist-bars";
    hist.appendChild(this.histBars);
    const thresholdRow = document.createElement("div");
    thresholdRow.className = "hist-threshold";
    this.histThreshold = document.createElement("input");
    this.histThreshold.type = "number";
    this.histThreshold.min = "1";
    this.histThreshold.value = "5";
    thresholdRow.appendChild(this.histThreshold);
    const apply = document.createElement("button");
    apply.dataset.action = "prune-by-frequency";
    apply.textContent = "prune rarer than";
    apply.addEventListener("click", () => {
      const attribute = this.histAttr.value;
      if (!attribute) return;
      void this.run(ops.pruneByFrequencyOp(this.summary.id, attribute, Number(this.histThreshold.value)));
    });
    thresholdRow.insertBefore(apply, this.histThreshold);
    hist.appendChild(thresholdRow);
    header.appendChild(hist);

    return header;
  }

  private makeSelect(
    parent: HTMLElement,
    action: string,
    placeholder: string,
    onPick: (value: string) => void,
  ): HTMLSelectElement {
    const select = document.createElement("select");
    select.dataset.action = action;
    select.appendChild(option(placeholder, ""));
    select.addEventListener("change", () => {
      const value = select.value;
      if (action === "partition-h" || action === "partition-v") select.value = "";
      if (value !== "" || action === "peek") onPick(value);
    });
    parent.appendChild(select);
    return select;
  }

  private makeButton(
    parent: HTMLElement,
    action: string,
    label: string,
    onClick: () => void,
  ): HTMLButtonElement {
    const button = document.createElement("button");
    button.dataset.action = action;
    button.textContent = label;
    button.addEventListener("click", onClick);
    parent.appendChild(button);
    return button;
  }

  private makeCheckbox(
    parent: HTMLElement,
    action: string,
    label: string,
    onChange: (checked: boolean) => void,
  ): HTMLInputElement {
    const wrap = document.createElement("label");
    wrap.className = "toggle";
    const box = document.createElement("input");
    box.type = "checkbox";
    box.dataset.action = action;
    box.addEventListener("change", () => onChange(box.checked));
    wrap.appendChild(box);
    wrap.appendChild(document.createTextNode(label));
    parent.appendChild(wrap);
    return box;
  }

  // --- state --------------------------------------------------------------

  /** Queue an op; one mutating request is in flight per card at a time. */
  run(op: OpDoc, consumesSelection = false): Promise<void> {
    this.queue = this.queue
      .then(() => this.host.execute(op))
      .then(() => {
        if (consumesSelection) {
          this.selection.clear();
          this.syncSelectionUi();
        }
      })
      .catch((err) => this.report(err));
    return this.queue;
  }

  private report(err: unknown): void {
    const message = err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
    this.host.showToast(message);
  }

  async refresh(summary: SubstrateSummary): Promise<void> {
    this.summary = summary;
    this.title.textContent = `${summary.name} — ${summary.liveCount.toLocaleString()} rows`
      + (summary.prunedCount ? ` (${summary.prunedCount.toLocaleString()} pruned)` : "");

    const onAxes = new Set([...summary.hAxis, ...summary.vAxis]);
    const fill = (select: HTMLSelectElement, columns: ColumnInfo[], keep: string) => {
      const placeholder = select.options[0];
      select.textContent = "";
      select.appendChild(placeholder);
      for (const column of columns) select.appendChild(option(column.name, column.name));
      select.value = keep;
    };
    const free = this.host.columns().filter((c) => !onAxes.has(c.name));
    fill(this.partitionH, free, "");
    fill(this.partitionV, free, "");
    fill(this.peekSelect, this.host.columns(), summary.peek ?? "");
    fill(this.histAttr, this.host.columns(), this.histAttr.value);

    this.stackRow.textContent = "";
    for (const [axis, stack] of [["horizontal", summary.hAxis], ["vertical", summary.vAxis]] as const) {
      for (const attribute of stack) {
        const chip = document.createElement("button");
        chip.className = "chip";
        chip.dataset.action = "unpartition";
        chip.dataset.axis = axis;
        chip.dataset.attribute = attribute;
        chip.textContent = `${axis === "horizontal" ? "↔" : "↕"} ${attribute} ✕`;
        chip.addEventListener("click", () => {
          void this.run(ops.unpartitionOp(this.summary.id, axis as Axis, attribute));
        });
        this.stackRow.appendChild(chip);
      }
    }

    this.linksBox.checked = summary.showLinks;
    this.linksBox.disabled = !this.host.hasEdges();
    this.arrowsBox.checked = summary.showArrows;
    this.arrowsBox.disabled = !this.host.hasEdges();

    const log = this.host.logEntries();
    this.logSelect.textContent = "";
    this.logSelect.appendChild(option("log", "__placeholder__"));
    this.logSelect.appendChild(option("0 · start", "0"));
    log.kinds.forEach((kind, i) => {
      this.logSelect.appendChild(option(`${i + 1} · ${kind}`, String(i + 1)));
    });
    this.logSelect.value = String(log.cursor);

    this.exportLink.href = this.host.exportUrl(summary.id);

    this.syncSelectionUi();
    if (!this.collapsed) await this.renderLayout();
  }

  private bodySize(): { w: number; h: number } {
    const w = this.body.clientWidth || DEFAULT_BODY.w;
    const h = this.body.clientHeight || DEFAULT_BODY.h;
    return { w, h };
  }

  async renderLayout(): Promise<void> {
    const { w, h } = this.bodySize();
    try {
      this.layout = await this.host.fetchLayout(this.summary.id, w, h);
    } catch (err) {
      this.scroller.textContent = "";
      const banner = document.createElement("div");
      banner.className = "error-banner";
      banner.textContent = err instanceof ApiError ? err.message : "failed to load layout";
      this.scroller.appendChild(banner);
      return;
    }
    this.scroller.textContent = "";
    this.scroller.appendChild(buildSvg(this.layout, this.selection));
  }

  private async loadHistogram(attribute: string): Promise<void> {
    if (!attribute) return;
    const bins = await this.host.fetchHistogram(this.summary.id, attribute).catch(() => []);
    this.histBars.textContent = "";
    const max = Math.max(1, ...bins.map((b) => b.count));
    for (const bin of bins) {
      const row = document.createElement("div");
      row.className = "hist-row";
      const bar = document.createElement("span");
      bar.className = "hist-bar";
      bar.style.width = `${(100 * bin.count) / max}%`;
      const label = document.createElement("span");
      label.textContent = `${bin.category} (${bin.count})`;
      row.appendChild(bar);
      row.appendChild(label);
      this.histBars.appendChild(row);
    }
  }

  toggleCollapsed(): void {
    this.collapsed = !this.collapsed;
    this.body.hidden = this.collapsed;
    if (!this.collapsed) void this.renderLayout();
  }

  // --- interaction ---------------------------------------------------------

  private wireBodyEvents(): void {
    this.scroller.addEventListener("click", (event) => {
      const target = event.target as Element;
      const node = target.closest<SVGElement>("g.supernode");
      if (node) {
        this.selection.toggleNode(this.cellKey(node));
        this.syncSelectionUi();
        return;
      }
      const label = target.closest<SVGElement>("text.axis-label");
      if (label) {
        this.selection.toggleFacet(
          label.getAttribute("data-axis") as Axis,
          label.getAttribute("data-attribute") ?? "",
          label.getAttribute("data-category") ?? "",
        );
        this.syncSelectionUi();
      }
    });

    this.scroller.addEventListener("pointerover", (event) => {
      const target = event.target as Element;
      const node = target.closest<SVGElement>("g.supernode");
      if (node) {
        this.showHover(node, event as PointerEvent);
        return;
      }
      const label = target.closest<SVGElement>("text.axis-label");
      if (label) this.highlightFacet(label, true);
    });
    this.scroller.addEventListener("pointerout", (event) => {
      const target = event.target as Element;
      if (target.closest("g.supernode")) this.clearHover();
      const label = target.closest<SVGElement>("text.axis-label");
      if (label) this.highlightFacet(label, false);
    });
  }

  private cellKey(node: SVGElement): FacetKeyDoc {
    const cell = (node as SVGElement & { __cell?: { key: FacetKeyDoc } }).__cell;
    if (!cell) throw new Error("mark without cell data");
    return cell.key;
  }

  private showHover(node: SVGElement, event: PointerEvent): void {
    if (!this.layout) return;
    const info = hoverInfo(this.layout, this.cellKey(node));
    this.popup.textContent = info.count.toLocaleString();
    this.popup.hidden = false;
    this.popup.style.left = `${event.clientX + 8}px`;
    this.popup.style.top = `${event.clientY - 18}px`;

    const svg = this.scroller.querySelector("svg");
    if (!svg) return;
    for (const id of info.origin) {
      const link = svg.querySelector<SVGElement>(`[data-link-id="${id}"]`);
      link?.classList.add("origin");
      link?.setAttribute("stroke", this.layout.style.originLinkColor);
    }
    for (const id of info.incoming) {
      const link = svg.querySelector<SVGElement>(`[data-link-id="${id}"]`);
      link?.classList.add("incoming");
      link?.setAttribute("stroke", this.layout.style.incomingLinkColor);
    }
    for (const { attribute, category } of info.labels) {
      svg.querySelectorAll<SVGElement>("text.axis-label").forEach((label) => {
        if (label.getAttribute("data-attribute") === attribute
          && label.getAttribute("data-category") === category) {
          label.classList.add("hover");
        }
      });
    }
  }

  private clearHover(): void {
    this.popup.hidden = true;
    const svg = this.scroller.querySelector("svg");
    if (!svg || !this.layout) return;
    svg.querySelectorAll<SVGElement>(".origin, .incoming").forEach((link) => {
      link.classList.remove("origin", "incoming");
      link.setAttribute("stroke", this.layout!.style.linkColor);
    });
    svg.querySelectorAll<SVGElement>("text.axis-label.hover").forEach((label) => {
      label.classList.remove("hover");
    });
  }

  private highlightFacet(label: SVGElement, on: boolean): void {
    const id = facetId(
      label.getAttribute("data-attribute") ?? "",
      label.getAttribute("data-category") ?? "",
    );
    this.scroller.querySelectorAll<SVGElement>("g.supernode").forEach((node) => {
      const parts = (node.getAttribute("data-key") ?? "").split(/[]/);
      if (parts.includes(id)) node.classList.toggle("facet-hover", on);
    });
  }

  syncSelectionUi(): void {
    const empty = this.selection.isEmpty();
    this.pruneBtn.disabled = empty;
    this.projectBtn.disabled = empty;
    this.pileBtn.disabled = empty;
    const svg = this.scroller.querySelector("svg");
    if (!svg) return;
    svg.querySelectorAll<SVGElement>("g.supernode").forEach((node) => {
      const cell = (node as SVGElement & { __cell?: { key: FacetKeyDoc } }).__cell;
      node.classList.toggle("selected", !!cell && this.selection.hasNode(cell.key));
    });
    svg.querySelectorAll<SVGElement>("text.axis-label").forEach((label) => {
      label.classList.toggle("selected", this.selection.hasFacet(
        label.getAttribute("data-attribute") ?? "",
        label.getAttribute("data-category") ?? "",
      ));
    });
  }
}
