/** Builders for the op JSON the service accepts; the engine owns semantics. */

import type { Axis, OpDoc, SelectionDoc } from "./types.js";

export function pivotPartitionOp(substrateId: number, axis: Axis, attribute: string): OpDoc {
  return { kind: "pivot-partition", params: { substrateId, axis, attribute } };
}

export function unpartitionOp(substrateId: number, axis: Axis, attribute: string): OpDoc {
  return { kind: "unpartition", params: { substrateId, axis, attribute } };
}

export function peekOp(substrateId: number, attribute: string): OpDoc {
  return { kind: "peek", params: { substrateId, attribute } };
}

export function clearPeekOp(substrateId: number): OpDoc {
  return { kind: "clear-peek", params: { substrateId } };
}

export function pileOp(selection: SelectionDoc, name?: string): OpDoc {
  const params: Record<string, unknown> = { selection };
  if (name) params.name = name;
  return { kind: "pile", params };
}

export function projectOp(selection: SelectionDoc, name?: string): OpDoc {
  const params: Record<string, unknown> = { selection };
  if (name) params.name = name;
  return { kind: "project", params };
}

export function pruneOp(selection: SelectionDoc): OpDoc {
  return { kind: "prune", params: { selection } };
}

export function pruneByFrequencyOp(substrateId: number, attribute: string, minCount: number): OpDoc {
  return { kind: "prune-by-frequency", params: { substrateId, attribute, minCount } };
}

export function configureSortOp(attribute: string, kind: string, sortOrder: string | string[]): OpDoc {
  return { kind: "configure", params: { attribute, spec: { name: attribute, kind, sortOrder } } };
}

export function toggleViewOp(substrateId: number, target: "links" | "arrows", value: boolean): OpDoc {
  return { kind: "toggle-view", params: { substrateId, target, value } };
}
