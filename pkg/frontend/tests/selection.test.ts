import { describe, expect, it } from "vitest";

import { CardSelection } from "../src/selection.js";
import type { FacetKeyDoc } from "../src/types.js";

const cell: FacetKeyDoc = { h: [["cylinders", "8"]], v: [["origin", "US"]] };
const other: FacetKeyDoc = { h: [["cylinders", "4"]], v: [["origin", "US"]] };

describe("CardSelection", () => {
  it("toggling a node twice returns to the prior value", () => {
    const sel = new CardSelection();
    sel.toggleNode(cell);
    expect(sel.isEmpty()).toBe(false);
    expect(sel.hasNode(cell)).toBe(true);
    sel.toggleNode(cell);
    expect(sel.isEmpty()).toBe(true);
    expect(sel.mode).toBeNull();
  });

  it("toggling a label twice returns to the prior value", () => {
    const sel = new CardSelection();
    sel.toggleFacet("horizontal", "cylinders", "8");
    sel.toggleFacet("horizontal", "cylinders", "4");
    sel.toggleFacet("horizontal", "cylinders", "4");
    expect(sel.toWire(1)).toEqual({
      substrateId: 1,
      mode: "column-facet",
      keys: [["cylinders", "8"]],
    });
  });

  it("node and facet selections are mutually exclusive", () => {
    const sel = new CardSelection();
    sel.toggleNode(cell);
    sel.toggleFacet("vertical", "origin", "US");
    expect(sel.mode).toBe("row-facet");
    expect(sel.hasNode(cell)).toBe(false);
    expect(sel.size).toBe(1);
  });

  it("accumulates nodes and serializes them as facet keys", () => {
    const sel = new CardSelection();
    sel.toggleNode(cell);
    sel.toggleNode(other);
    expect(sel.toWire(3)).toEqual({
      substrateId: 3,
      mode: "nodes",
      keys: [cell, other],
    });
  });

  it("column vs row facet mode follows the axis", () => {
    const sel = new CardSelection();
    sel.toggleFacet("horizontal", "a", "x");
    expect(sel.mode).toBe("column-facet");
    sel.toggleFacet("vertical", "b", "y");
    expect(sel.mode).toBe("row-facet");
  });

  it("toWire on an empty selection throws", () => {
    expect(() => new CardSelection().toWire(1)).toThrow("empty selection");
  });
});
