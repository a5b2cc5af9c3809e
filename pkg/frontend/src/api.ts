/** Thin fetch client for the sculpting service. */

import type {
  HistogramDoc,
  LayoutDoc,
  MutationResponse,
  OpDoc,
  SessionInfo,
} from "./types.js";

export class ApiError extends Error {
  constructor(public code: string, message: string, public status: number) {
    super(message);
  }
}

async function parse<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let code = "http_error";
    let message = `${response.status} ${response.statusText}`;
    try {
      const body = await response.json();
      if (body?.error) {
        code = body.error.code ?? code;
        message = body.error.message ?? message;
      }
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(code, message, response.status);
  }
  return response.json() as Promise<T>;
}

export interface UploadConfig {
  keyColumn?: string;
  edgeColumns?: { source?: string; target?: string; weight?: string };
  typeOverrides?: Record<string, string>;
  sample?: number;
  seed?: number;
}

export class ApiClient {
  constructor(private base: string = "") {}

  async createSession(nodes: File, edges: File | null, config: UploadConfig): Promise<SessionInfo> {
    const form = new FormData();
    form.append("nodes", nodes);
    if (edges) form.append("edges", edges);
    form.append("config", JSON.stringify(config));
    return parse(await fetch(`${this.base}/sessions`, { method: "POST", body: form }));
  }

  async getSession(sessionId: string): Promise<SessionInfo> {
    return parse(await fetch(`${this.base}/sessions/${sessionId}`));
  }

  async postOp(sessionId: string, op: OpDoc): Promise<MutationResponse> {
    return parse(await fetch(`${this.base}/sessions/${sessionId}/ops`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(op),
    }));
  }

  async undo(sessionId: string): Promise<MutationResponse> {
    return parse(await fetch(`${this.base}/sessions/${sessionId}/undo`, { method: "POST" }));
  }

  async redo(sessionId: string): Promise<MutationResponse> {
    return parse(await fetch(`${this.base}/sessions/${sessionId}/redo`, { method: "POST" }));
  }

  async layout(sessionId: string, substrateId: number, w: number, h: number): Promise<LayoutDoc> {
    return parse(await fetch(
      `${this.base}/sessions/${sessionId}/substrates/${substrateId}/layout?w=${w}&h=${h}`,
    ));
  }

  async histogram(sessionId: string, substrateId: number, attribute: string): Promise<HistogramDoc> {
    return parse(await fetch(
      `${this.base}/sessions/${sessionId}/substrates/${substrateId}/histogram?attr=${encodeURIComponent(attribute)}`,
    ));
  }

  exportUrl(sessionId: string, substrateId: number): string {
    return `${this.base}/sessions/${sessionId}/substrates/${substrateId}/export`;
  }
}
