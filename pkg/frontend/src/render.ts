/** SVG rendering of a layout document.
 *
 * Every count, fraction, and highlight drawn here is read straight from the
 * layout response; nothing analytical is recomputed client-side.
 */

import { CardSelection, keyId } from "./selection.js";
import type { CellDoc, FacetKeyDoc, LayoutDoc, LinkDoc } from "./types.js";

export const SVG_NS = "http://www.w3.org/2000/svg";

export const H_BAND = 20; // px per horizontal label level
export const V_BAND = 84; // px per vertical label level

function hexToRgb(color: string): [number, number, number] {
  return [1, 3, 5].map((i) => parseInt(color.slice(i, i + 2), 16)) as [number, number, number];
}

export function lerpColor(ramp: string[], t: number): string {
  const [a, b] = [hexToRgb(ramp[0]), hexToRgb(ramp[1])];
  const mix = a.map((x, i) => Math.round(x + (b[i] - x) * t));
  return `#${mix.map((x) => x.toString(16).padStart(2, "0")).join("")}`;
}

function el<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string | number> = {},
): SVGElementTagNameMap[K] {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [name, value] of Object.entries(attrs)) {
    node.setAttribute(name, String(value));
  }
  return node;
}

function pieSlices(cell: CellDoc, radius: number, palette: string[]): SVGElement[] {
  const fractions = cell.peekFractions ?? [];
  const out: SVGElement[] = [];
  let angle = -Math.PI / 2;
  fractions.forEach((frac, i) => {
    if (frac <= 0) return;
    const color = palette[i % palette.length];
    if (frac >= 1 - 1e-12) {
      out.push(el("circle", { cx: cell.x, cy: cell.y, r: radius, fill: color }));
      return;
    }
    const end = angle + frac * 2 * Math.PI;
    const x1 = cell.x + radius * Math.cos(angle);
    const y1 = cell.y + radius * Math.sin(angle);
    const x2 = cell.x + radius * Math.cos(end);
    const y2 = cell.y + radius * Math.sin(end);
    const large = frac > 0.5 ? 1 : 0;
    out.push(el("path", {
      d: `M${cell.x},${cell.y} L${x1},${y1} A${radius},${radius} 0 ${large} 1 ${x2},${y2} Z`,
      fill: color,
    }));
    angle = end;
  });
  return out;
}

function linkPath(link: LinkDoc, left: number, top: number, nodeRadius: number): string {
  const [x1, y1, x2, y2] = [link.x1 + left, link.y1 + top, link.x2 + left, link.y2 + top];
  if (x1 === x2 && y1 === y2) {
    const r = Math.max(nodeRadius, 4);
    return `M${x1 - r * 0.4},${y1 - r * 0.6} A${r * 0.6},${r * 0.6} 0 1 1 ${x1 + r * 0.4},${y1 - r * 0.6}`;
  }
  const chord = Math.hypot(x2 - x1, y2 - y1);
  const ox = (-(y2 - y1) / chord) * chord * 0.15;
  const oy = ((x2 - x1) / chord) * chord * 0.15;
  return `M${x1},${y1} Q${(x1 + x2) / 2 + ox},${(y1 + y2) / 2 + oy} ${x2},${y2}`;
}

/** Size of the label margins for a layout. */
export function margins(layout: LayoutDoc): { left: number; top: number } {
  return { left: V_BAND * layout.vLabels.length, top: H_BAND * layout.hLabels.length };
}

export function buildSvg(layout: LayoutDoc, selection: CardSelection | null): SVGSVGElement {
  const { left, top } = margins(layout);
  const width = left + layout.surfaceWidth;
  const height = top + layout.surfaceHeight;
  const svg = el("svg", { width, height, viewBox: `0 0 ${width} ${height}` });
  svg.classList.add("grid-svg");

  if (layout.showArrows && layout.links.length) {
    const marker = el("marker", {
      id: `arrow-${layout.substrateId}`, viewBox: "0 0 10 10", refX: 9, refY: 5,
      markerWidth: 6, markerHeight: 6, orient: "auto-start-reverse",
    });
    marker.appendChild(el("path", { d: "M0,0 L10,5 L0,10 Z", fill: layout.style.linkColor }));
    const defs = el("defs");
    defs.appendChild(marker);
    svg.appendChild(defs);
  }

  // axis labels: horizontal bands on top, vertical bands on the left
  layout.hLabels.forEach((level, levelNo) => {
    const y = levelNo * H_BAND + H_BAND - 6;
    if (level.showName) {
      const name = el("text", { x: left - 6, y, "text-anchor": "end", class: "axis-name" });
      name.textContent = level.attribute;
      svg.appendChild(name);
    }
    level.spans.forEach((span, spanIndex) => {
      const text = el("text", {
        x: left + (span.start + span.end) / 2, y,
        "text-anchor": "middle", class: "axis-label",
        "data-axis": "horizontal", "data-attribute": level.attribute,
        "data-category": span.label, "data-level": levelNo, "data-span": spanIndex,
      });
      text.textContent = span.label;
      if (selection?.hasFacet(level.attribute, span.label)) text.classList.add("selected");
      svg.appendChild(text);
    });
  });
  layout.vLabels.forEach((level, levelNo) => {
    const x = levelNo * V_BAND + 6;
    if (level.showName && level.spans.length) {
      const name = el("text", { x, y: top - 6, class: "axis-name" });
      name.textContent = level.attribute;
      svg.appendChild(name);
    }
    level.spans.forEach((span, spanIndex) => {
      const text = el("text", {
        x, y: top + (span.start + span.end) / 2 + 4, class: "axis-label",
        "data-axis": "vertical", "data-attribute": level.attribute,
        "data-category": span.label, "data-level": levelNo, "data-span": spanIndex,
      });
      text.textContent = span.label;
      if (selection?.hasFacet(level.attribute, span.label)) text.classList.add("selected");
      svg.appendChild(text);
    });
  });

  for (const link of layout.links) {
    const path = el("path", {
      d: linkPath(link, left, top, layout.nodeRadius),
      fill: "none",
      stroke: layout.style.linkColor,
      "stroke-opacity": layout.style.linkOpacity,
      "stroke-width": link.thickness,
      class: "superlink",
      "data-link-id": link.id,
      "data-source": keyId(link.source),
      "data-target": keyId(link.target),
    });
    if (layout.showArrows) path.setAttribute("marker-end", `url(#arrow-${layout.substrateId})`);
    svg.appendChild(path);
  }

  for (const cell of layout.cells) {
    if (!cell.count) continue; // empty combinations keep their grid slot, no mark
    const group = el("g", {
      class: "supernode",
      "data-key": keyId(cell.key),
      "data-count": cell.count,
      "data-h": cell.hIndex,
      "data-v": cell.vIndex,
    });
    const shifted = { ...cell, x: cell.x + left, y: cell.y + top };
    if (cell.peekFractions) {
      for (const slice of pieSlices(shifted, layout.nodeRadius, layout.style.palette)) {
        group.appendChild(slice);
      }
    } else {
      group.appendChild(el("circle", {
        cx: shifted.x, cy: shifted.y, r: layout.nodeRadius,
        fill: lerpColor(layout.style.colorRamp, cell.colorValue),
      }));
    }
    if (layout.showCountLabels) {
      const text = el("text", {
        x: shifted.x, y: shifted.y + 3, "text-anchor": "middle", class: "count-label",
      });
      if (!cell.peekFractions && cell.colorValue > 0.6) text.classList.add("inverse");
      text.textContent = String(cell.count);
      group.appendChild(text);
    }
    if (selection?.hasNode(cell.key)) group.classList.add("selected");
    (group as SVGElement & { __cell?: CellDoc }).__cell = cell;
    svg.appendChild(group);
  }

  return svg;
}

export interface HoverInfo {
  count: number;
  labels: { axis: string; attribute: string; category: string }[];
  origin: string[];
  incoming: string[];
}

/** What lights up when a node is hovered, read from the layout doc. */
export function hoverInfo(layout: LayoutDoc, key: FacetKeyDoc): HoverInfo {
  const id = keyId(key);
  const cell = layout.cells.find((c) => keyId(c.key) === id);
  if (!cell) throw new Error("no grid cell with this key");
  const labels = [
    ...key.h.map(([attribute, category]) => ({ axis: "horizontal", attribute, category })),
    ...key.v.map(([attribute, category]) => ({ axis: "vertical", attribute, category })),
  ];
  return {
    count: cell.count,
    labels,
    origin: layout.links.filter((l) => keyId(l.source) === id).map((l) => l.id),
    incoming: layout.links.filter((l) => keyId(l.target) === id).map((l) => l.id),
  };
}
