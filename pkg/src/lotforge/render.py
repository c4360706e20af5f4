"""Deterministic top-down SVG plan views.

The drawing is a shareable design artifact: lot boundary, per-category
glyphs, optional sun shadows, a scale bar, a north arrow, and an optional
legend. Output is byte-identical for equal (scene, catalog, options):
instances draw in id order, floats are formatted to fixed precision, and
nothing depends on wall-clock time or randomness.

Coordinate system: 1 meter = 10 SVG user units, y flipped so north is up.
"""

from __future__ import annotations

from dataclasses import dataclass

from .catalog import Catalog
from .metrics import SunSample, shadow_polygon
from .scene import Scene

UNITS_PER_M = 10.0
MARGIN_M = 3.0          # white space around the lot
FOOTER_M = 4.0          # room for the scale bar
LEGEND_WIDTH_M = 14.0

# Category style table: fill, stroke, glyph shape.
CATEGORY_STYLES = {
    "greenery": ("#7cb668", "#4e7a3f", "circle"),
    "seating": ("#b08968", "#7f5539", "rect"),
    "play": ("#f2a65a", "#c47f2e", "rect"),
    "structure": ("#adb5bd", "#6c757d", "rect"),
    "market": ("#e07a5f", "#b45744", "rect"),
    "lighting": ("#f4d35e", "#c9a227", "circle"),
    "animal": ("#c39bd3", "#8e5ba6", "circle"),
    "garden": ("#90be6d", "#5a8f3d", "rect"),
    "art": ("#8ecae6", "#4a90b8", "rect"),
    "surface": ("#d8d4c5", "#b3ae9c", "rect"),
}

SHADOW_FILL = "#30343a"
SHADOW_OPACITY = "0.35"

# Shadow preview defaults to the primary noon-ish sample.
DEFAULT_RENDER_SUN = SunSample(70.0, 180.0, 1.0)


@dataclass(frozen=True)
class RenderOptions:
    show_shadows: bool = False
    sun: SunSample | None = None
    legend: bool = False


def _fmt(v: float) -> str:
    text = f"{v:.2f}".rstrip("0").rstrip(".")
    return text if text not in ("", "-0") else "0"


class _Canvas:
    """Accumulates SVG elements with world-to-user coordinate mapping."""

    def __init__(self, lot_depth: float):
        self.lot_depth = lot_depth
        self.parts: list[str] = []

    def ux(self, x: float) -> float:
        return (x + MARGIN_M) * UNITS_PER_M

    def uy(self, y: float) -> float:
        # y flip: world north (+y) points up the page
        return (self.lot_depth - y + MARGIN_M) * UNITS_PER_M

    def add(self, text: str) -> None:
        self.parts.append(text)

    def polygon(self, pts, fill: str, extra: str = "") -> None:
        coords = " ".join(f"{_fmt(self.ux(x))},{_fmt(self.uy(y))}" for x, y in pts)
        self.add(f'<polygon points="{coords}" fill="{fill}"{extra} />')

    def circle(self, cx: float, cy: float, r_m: float, fill: str, stroke: str,
               extra: str = "") -> None:
        self.add(
            f'<circle cx="{_fmt(self.ux(cx))}" cy="{_fmt(self.uy(cy))}" '
            f'r="{_fmt(r_m * UNITS_PER_M)}" fill="{fill}" stroke="{stroke}"{extra} />'
        )


def render_plan(
    scene: Scene, catalog: Catalog, options: RenderOptions | None = None
) -> str:
    """Render a scene as an SVG 1.1 document string."""
    opts = options or RenderOptions()
    lot = scene.lot
    width_m = lot.width + 2 * MARGIN_M + (LEGEND_WIDTH_M if opts.legend else 0.0)
    height_m = lot.depth + 2 * MARGIN_M + FOOTER_M
    canvas = _Canvas(lot.depth)

    canvas.add(
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'viewBox="0 0 {_fmt(width_m * UNITS_PER_M)} {_fmt(height_m * UNITS_PER_M)}">'
    )
    canvas.add(f'<rect width="{_fmt(width_m * UNITS_PER_M)}" '
               f'height="{_fmt(height_m * UNITS_PER_M)}" fill="#fafaf7" />')

    # Lot boundary
    canvas.add('<g id="lot">')
    canvas.add(
        f'<rect x="{_fmt(canvas.ux(0))}" y="{_fmt(canvas.uy(lot.depth))}" '
        f'width="{_fmt(lot.width * UNITS_PER_M)}" height="{_fmt(lot.depth * UNITS_PER_M)}" '
        'fill="#efe9dc" stroke="#555046" stroke-width="2" />'
    )
    canvas.add("</g>")

    ordered = sorted(scene.instances, key=lambda i: i.instance_id)

    if opts.show_shadows:
        sun = opts.sun or DEFAULT_RENDER_SUN
        canvas.add('<g id="shadows">')
        for inst in ordered:
            if not catalog.entry(inst.entry_id).is_shade_caster():
                continue
            poly = shadow_polygon(inst, catalog, sun, lot)
            if poly:
                canvas.polygon(
                    poly, SHADOW_FILL, f' fill-opacity="{SHADOW_OPACITY}"'
                )
        canvas.add("</g>")

    if ordered:
        canvas.add('<g id="elements">')
        # Ground surfaces draw under everything else.
        layered = sorted(
            ordered,
            key=lambda i: (0 if catalog.entry(i.entry_id).category == "surface" else 1,
                           i.instance_id),
        )
        for inst in layered:
            entry = catalog.entry(inst.entry_id)
            fill, stroke, shape = CATEGORY_STYLES[entry.category]
            pose = inst.pose
            px, py = pose.position.x, pose.position.y
            title = f"<title>{inst.instance_id}: {entry.entry_id}</title>"
            if shape == "circle":
                radius = max(entry.canopy_radius, entry.footprint_w / 2.0) * pose.scale
                canvas.add(f'<g id="{inst.instance_id}">{title}')
                if entry.light_radius > 0:
                    canvas.circle(
                        px, py, entry.light_radius * pose.scale, "none", stroke,
                        ' stroke-dasharray="6 6" stroke-width="1"',
                    )
                canvas.circle(px, py, radius, fill, stroke,
                              ' stroke-width="1.5" fill-opacity="0.85"')
                canvas.add("</g>")
            else:
                w = entry.footprint_w * pose.scale * UNITS_PER_M
                d = entry.footprint_d * pose.scale * UNITS_PER_M
                cx, cy = canvas.ux(px), canvas.uy(py)
                canvas.add(f'<g id="{inst.instance_id}">{title}')
                canvas.add(
                    f'<rect x="{_fmt(cx - w / 2)}" y="{_fmt(cy - d / 2)}" '
                    f'width="{_fmt(w)}" height="{_fmt(d)}" '
                    f'fill="{fill}" stroke="{stroke}" stroke-width="1.5" '
                    f'transform="rotate({_fmt(pose.rotation_deg)} {_fmt(cx)} {_fmt(cy)})" />'
                )
                canvas.add("</g>")
        canvas.add("</g>")

    _draw_scale_bar(canvas, lot)
    _draw_north_arrow(canvas, lot)
    if opts.legend:
        _draw_legend(canvas, catalog, scene, lot)

    canvas.add("</svg>")
    return "\n".join(canvas.parts) + "\n"


def _draw_scale_bar(canvas: _Canvas, lot) -> None:
    bar_m = 10.0 if lot.width >= 15 else 2.0
    x0 = canvas.ux(0)
    y = canvas.uy(-1.5)
    canvas.add('<g id="scale-bar">')
    canvas.add(
        f'<line x1="{_fmt(x0)}" y1="{_fmt(y)}" x2="{_fmt(x0 + bar_m * UNITS_PER_M)}" '
        f'y2="{_fmt(y)}" stroke="#333" stroke-width="3" />'
    )
    for tick in (0.0, bar_m):
        tx = x0 + tick * UNITS_PER_M
        canvas.add(
            f'<line x1="{_fmt(tx)}" y1="{_fmt(y - 5)}" x2="{_fmt(tx)}" '
            f'y2="{_fmt(y + 5)}" stroke="#333" stroke-width="3" />'
        )
    canvas.add(
        f'<text x="{_fmt(x0 + bar_m * UNITS_PER_M / 2)}" y="{_fmt(y - 8)}" '
        f'font-family="sans-serif" font-size="12" text-anchor="middle" '
        f'fill="#333">{_fmt(bar_m)} m</text>'
    )
    canvas.add("</g>")


def _draw_north_arrow(canvas: _Canvas, lot) -> None:
    cx = canvas.ux(lot.width + 1.2)
    cy = canvas.uy(lot.depth - 1.0)
    canvas.add('<g id="north-arrow">')
    canvas.add(
        f'<polygon points="{_fmt(cx)},{_fmt(cy - 14)} {_fmt(cx - 7)},{_fmt(cy + 10)} '
        f'{_fmt(cx + 7)},{_fmt(cy + 10)}" fill="#333" />'
    )
    canvas.add(
        f'<text x="{_fmt(cx)}" y="{_fmt(cy + 26)}" font-family="sans-serif" '
        f'font-size="13" text-anchor="middle" fill="#333">N</text>'
    )
    canvas.add("</g>")


def _draw_legend(canvas: _Canvas, catalog: Catalog, scene: Scene, lot) -> None:
    present = sorted(
        {catalog.entry(i.entry_id).category for i in scene.instances},
        key=lambda c: list(CATEGORY_STYLES).index(c),
    )
    x = canvas.ux(lot.width + 3.0)
    y = canvas.uy(lot.depth - 4.0)
    canvas.add('<g id="legend">')
    canvas.add(
        f'<text x="{_fmt(x)}" y="{_fmt(y - 18)}" font-family="sans-serif" '
        f'font-size="13" fill="#333">Legend</text>'
    )
    for row, category in enumerate(present):
        fill, stroke, _ = CATEGORY_STYLES[category]
        ry = y + row * 20
        canvas.add(
            f'<rect x="{_fmt(x)}" y="{_fmt(ry)}" width="14" height="14" '
            f'fill="{fill}" stroke="{stroke}" />'
        )
        canvas.add(
            f'<text x="{_fmt(x + 20)}" y="{_fmt(ry + 11)}" font-family="sans-serif" '
            f'font-size="12" fill="#333">{category}</text>'
        )
    canvas.add("</g>")
