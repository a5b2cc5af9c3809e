"""Static SVG rendering of a GridLayout, used by the CLI's headless mode."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

from .layout import (
    ARC_BULGE_RATIO,
    CATEGORICAL_PALETTE,
    COLOR_RAMP,
    GridLayout,
    LINK_COLOR,
    LINK_OPACITY,
)

H_BAND = 16.0   # height of one horizontal label level
V_BAND = 80.0   # width of one vertical label level
FONT = "font-family=\"sans-serif\""


def _hex_to_rgb(color: str):
    return tuple(int(color[i:i + 2], 16) for i in (1, 3, 5))


def _lerp_color(t: float) -> str:
    a, b = _hex_to_rgb(COLOR_RAMP[0]), _hex_to_rgb(COLOR_RAMP[1])
    return "#%02x%02x%02x" % tuple(round(x + (y - x) * t) for x, y in zip(a, b))


def _pie_paths(cx: float, cy: float, r: float, fractions, palette) -> list:
    parts = []
    angle = -math.pi / 2
    for i, frac in enumerate(fractions):
        if frac <= 0:
            continue
        color = palette[i % len(palette)]
        if frac >= 1.0 - 1e-12:
            parts.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="{r:.2f}" fill="{color}"/>')
            break
        end = angle + frac * 2 * math.pi
        x1, y1 = cx + r * math.cos(angle), cy + r * math.sin(angle)
        x2, y2 = cx + r * math.cos(end), cy + r * math.sin(end)
        large = 1 if frac > 0.5 else 0
        parts.append(
            f'<path d="M{cx:.2f},{cy:.2f} L{x1:.2f},{y1:.2f} '
            f'A{r:.2f},{r:.2f} 0 {large} 1 {x2:.2f},{y2:.2f} Z" fill="{color}"/>'
        )
        angle = end
    return parts


def _link_path(x1, y1, x2, y2, node_radius) -> str:
    if x1 == x2 and y1 == y2:
        # self-link: small loop above the node
        r = max(node_radius, 4.0)
        return (
            f"M{x1 - r * 0.4:.2f},{y1 - r * 0.6:.2f} "
            f"A{r * 0.6:.2f},{r * 0.6:.2f} 0 1 1 {x1 + r * 0.4:.2f},{y1 - r * 0.6:.2f}"
        )
    mx, my = (x1 + x2) / 2, (y1 + y2) / 2
    dx, dy = x2 - x1, y2 - y1
    chord = math.hypot(dx, dy)
    # control point offset perpendicular to the chord
    ox, oy = -dy / chord * chord * ARC_BULGE_RATIO, dx / chord * chord * ARC_BULGE_RATIO
    return f"M{x1:.2f},{y1:.2f} Q{mx + ox:.2f},{my + oy:.2f} {x2:.2f},{y2:.2f}"


def render_svg(layout: GridLayout) -> str:
    """Render the layout to a standalone SVG document."""
    left = V_BAND * len(layout.v_labels)
    top = H_BAND * len(layout.h_labels)
    width = left + layout.surface_width
    height = top + layout.surface_height

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{height:.0f}" '
        f'viewBox="0 0 {width:.2f} {height:.2f}">',
        f'<rect width="{width:.2f}" height="{height:.2f}" fill="white"/>',
    ]
    if layout.show_arrows:
        out.append(
            '<defs><marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" '
            'markerWidth="6" markerHeight="6" orient="auto-start-reverse">'
            f'<path d="M0,0 L10,5 L0,10 Z" fill="{LINK_COLOR}"/></marker></defs>'
        )

    for level_no, level in enumerate(layout.h_labels):
        y = level_no * H_BAND + H_BAND - 4
        if level.show_name:
            out.append(
                f'<text x="{left - 4:.2f}" y="{y:.2f}" text-anchor="end" font-size="10" '
                f'{FONT} fill="#666">{escape(level.attribute)}</text>'
            )
        for span in level.spans:
            cx = left + (span.start + span.end) / 2
            out.append(
                f'<text x="{cx:.2f}" y="{y:.2f}" text-anchor="middle" font-size="11" {FONT}>'
                f"{escape(span.label)}</text>"
            )
            out.append(
                f'<line x1="{left + span.start:.2f}" y1="{y + 3:.2f}" x2="{left + span.end:.2f}" '
                f'y2="{y + 3:.2f}" stroke="#ddd"/>'
            )

    for level_no, level in enumerate(layout.v_labels):
        x = level_no * V_BAND + 4
        if level.show_name and level.spans:
            out.append(
                f'<text x="{x:.2f}" y="{top - 4:.2f}" font-size="10" {FONT} fill="#666">'
                f"{escape(level.attribute)}</text>"
            )
        for span in level.spans:
            cy = top + (span.start + span.end) / 2
            out.append(
                f'<text x="{x:.2f}" y="{cy + 4:.2f}" font-size="11" {FONT}>{escape(span.label)}</text>'
            )

    for link in layout.links:
        path = _link_path(left + link.x1, top + link.y1, left + link.x2, top + link.y2, layout.node_radius)
        marker = ' marker-end="url(#arrow)"' if layout.show_arrows else ""
        out.append(
            f'<path d="{path}" fill="none" stroke="{LINK_COLOR}" stroke-opacity="{LINK_OPACITY}" '
            f'stroke-width="{link.thickness:.2f}"{marker}/>'
        )

    for cell in layout.cells:
        if cell.count == 0:
            continue
        cx, cy = left + cell.x, top + cell.y
        if cell.peek_fractions is not None:
            out.extend(_pie_paths(cx, cy, layout.node_radius, cell.peek_fractions, CATEGORICAL_PALETTE))
        else:
            out.append(
                f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="{layout.node_radius:.2f}" '
                f'fill="{_lerp_color(cell.color_value)}"/>'
            )
        if layout.show_count_labels:
            fill = "#fff" if cell.peek_fractions is None and cell.color_value > 0.6 else "#222"
            out.append(
                f'<text x="{cx:.2f}" y="{cy + 3:.2f}" text-anchor="middle" font-size="10" '
                f'{FONT} fill="{fill}">{cell.count}</text>'
            )

    out.append("</svg>")
    return "\n".join(out)
