/** Session bootstrap and card management.
 *
 * The app owns the session handle, keeps one card per substrate (project
 * responses spawn new cards), and fans each mutation response out to every
 * card so their headers and layouts stay current.
 */

import { ApiClient, UploadConfig } from "./api.js";
import { Card, CardHost } from "./card.js";
import type {
  ColumnInfo,
  LayoutDoc,
  MutationResponse,
  OpDoc,
  SessionInfo,
  SubstrateSummary,
} from "./types.js";

export class App implements CardHost {
  sessionId = "";
  readonly cards: Card[] = [];
  private info: SessionInfo | null = null;
  private log: { cursor: number; kinds: string[] } = { cursor: 0, kinds: [] };
  private removed = new Set<number>();

  constructor(
    readonly api: ApiClient,
    private container: HTMLElement,
    private toast: HTMLElement | null = null,
  ) {}

  columns(): ColumnInfo[] {
    return this.info?.dataset.columns ?? [];
  }

  hasEdges(): boolean {
    return this.info?.dataset.hasEdges ?? false;
  }

  logEntries(): { cursor: number; kinds: string[] } {
    return this.log;
  }

  async openSession(info: SessionInfo): Promise<void> {
    this.info = info;
    this.sessionId = info.sessionId;
    this.removed.clear();
    this.cards.splice(0).forEach((card) => card.root.remove());
    this.container.textContent = "";
    this.log = { cursor: info.log.cursor, kinds: info.log.entries.map((e) => e.kind) };
    await this.reconcile(info.substrates);
  }

  async execute(op: OpDoc): Promise<void> {
    const response = await this.api.postOp(this.sessionId, op);
    await this.applyMutation(response);
  }

  async jumpTo(cursor: number): Promise<void> {
    let guard = 1000;
    while (this.log.cursor !== cursor && guard-- > 0) {
      const response = this.log.cursor > cursor
        ? await this.api.undo(this.sessionId)
        : await this.api.redo(this.sessionId);
      await this.applyMutation(response);
    }
  }

  async applyMutation(response: MutationResponse): Promise<void> {
    this.log = { cursor: response.log.cursor, kinds: response.log.entries.map((e) => e.kind) };
    await this.reconcile(response.substrates);
  }

  private async reconcile(substrates: SubstrateSummary[]): Promise<void> {
    const byId = new Map(this.cards.map((card) => [card.summary.id, card]));
    for (const summary of substrates) {
      if (this.removed.has(summary.id)) continue;
      let card = byId.get(summary.id);
      if (!card) {
        card = new Card(this, summary);
        this.cards.push(card);
        this.container.appendChild(card.root); // new substrates appear to the right
      }
      await card.refresh(summary);
    }
  }

  fetchLayout(substrateId: number, w: number, h: number): Promise<LayoutDoc> {
    return this.api.layout(this.sessionId, substrateId, w, h);
  }

  async fetchHistogram(substrateId: number, attribute: string) {
    const doc = await this.api.histogram(this.sessionId, substrateId, attribute);
    return doc.bins;
  }

  exportUrl(substrateId: number): string {
    return this.api.exportUrl(this.sessionId, substrateId);
  }

  removeCard(card: Card): void {
    this.removed.add(card.summary.id);
    const index = this.cards.indexOf(card);
    if (index >= 0) this.cards.splice(index, 1);
    card.root.remove();
  }

  moveCard(card: Card, delta: number): void {
    const index = this.cards.indexOf(card);
    const target = index + delta;
    if (index < 0 || target < 0 || target >= this.cards.length) return;
    this.cards.splice(index, 1);
    this.cards.splice(target, 0, card);
    const anchor = this.container.children[target];
    this.container.insertBefore(card.root, delta > 0 ? anchor.nextSibling : anchor);
  }

  showToast(message: string): void {
    if (!this.toast) return;
    const note = document.createElement("div");
    note.className = "toast";
    note.textContent = message;
    this.toast.appendChild(note);
    setTimeout(() => note.remove(), 4000);
  }
}

/** Wire the upload form; resolves once the first session is open. */
export function bootstrap(root: Document | HTMLElement, api: ApiClient): App {
  const pick = <T extends Element>(selector: string) =>
    root.querySelector(selector) as T;
  const app = new App(api, pick<HTMLElement>("#cards"), pick<HTMLElement>("#toasts"));
  const form = pick<HTMLFormElement>("#upload-form");
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const nodes = pick<HTMLInputElement>("#node-file").files?.[0];
    if (!nodes) return;
    const edges = pick<HTMLInputElement>("#edge-file").files?.[0] ?? null;
    const config: UploadConfig = {};
    const keyColumn = pick<HTMLInputElement>("#key-column").value.trim();
    if (keyColumn) config.keyColumn = keyColumn;
    const weight = pick<HTMLInputElement>("#weight-column").value.trim();
    if (weight) config.edgeColumns = { weight };
    const nominal = pick<HTMLInputElement>("#nominal-columns").value.trim();
    if (nominal) {
      config.typeOverrides = Object.fromEntries(
        nominal.split(",").map((name) => [name.trim(), "nominal"]),
      );
    }
    api.createSession(nodes, edges, config)
      .then((info) => app.openSession(info))
      .catch((err) => app.showToast(String(err)));
  });
  return app;
}
