// Canvas drawing: top-down plan view with an optional isometric tilt
// preset (y squashed, elements lifted by height). Colors follow the
// service's plan-view category table so saved SVGs and the live editor
// stay visually consistent.

import { footprintCorners } from "./scene.js";
import type { Camera } from "./state.js";
import type { CatalogDoc, EntryDoc, InstanceDoc, SceneDoc } from "./types.js";

export const CATEGORY_COLORS: Record<string, [string, string]> = {
  greenery: ["#7cb668", "#4e7a3f"],
  seating: ["#b08968", "#7f5539"],
  play: ["#f2a65a", "#c47f2e"],
  structure: ["#adb5bd", "#6c757d"],
  market: ["#e07a5f", "#b45744"],
  lighting: ["#f4d35e", "#c9a227"],
  animal: ["#c39bd3", "#8e5ba6"],
  garden: ["#90be6d", "#5a8f3d"],
  art: ["#8ecae6", "#4a90b8"],
  surface: ["#d8d4c5", "#b3ae9c"],
};

const ISO_SQUASH = 0.55;
const ISO_LIFT = 0.6;
const MARGIN = 40;

export interface Projection {
  toScreen(x: number, y: number, height?: number): [number, number];
  fromScreen(sx: number, sy: number): [number, number];
}

export function projection(camera: Camera, scene: SceneDoc): Projection {
  const squash = camera.tilt === "iso" ? ISO_SQUASH : 1.0;
  const depth = scene.lot.depth;
  return {
    toScreen(x, y, height = 0) {
      const sx = MARGIN + camera.panX + x * camera.zoom;
      const sy =
        MARGIN +
        camera.panY +
        (depth - y) * camera.zoom * squash -
        height * camera.zoom * (camera.tilt === "iso" ? ISO_LIFT : 0);
      return [sx, sy];
    },
    fromScreen(sx, sy) {
      const x = (sx - MARGIN - camera.panX) / camera.zoom;
      const y = depth - (sy - MARGIN - camera.panY) / (camera.zoom * squash);
      return [x, y];
    },
  };
}

function entryFor(catalog: CatalogDoc, inst: InstanceDoc): EntryDoc | undefined {
  return catalog.entries.find((e) => e.entry_id === inst.entry);
}

export interface DrawOptions {
  selection: string | null;
  highlight: Set<string>;
  ghost: SceneDoc | null; // e.g. the practice target shown as a guide
}

export function drawScene(
  ctx: CanvasRenderingContext2D,
  scene: SceneDoc,
  catalog: CatalogDoc,
  camera: Camera,
  options: DrawOptions,
): void {
  const proj = projection(camera, scene);
  ctx.clearRect(0, 0, ctx.canvas.width, ctx.canvas.height);
  ctx.fillStyle = "#fafaf7";
  ctx.fillRect(0, 0, ctx.canvas.width, ctx.canvas.height);

  drawLot(ctx, scene, proj);
  if (options.ghost) {
    drawInstances(ctx, options.ghost, catalog, camera, proj, {
      selection: null,
      highlight: new Set(),
      ghost: null,
    }, 0.28);
  }
  drawInstances(ctx, scene, catalog, camera, proj, options, 1.0);
}

function drawLot(ctx: CanvasRenderingContext2D, scene: SceneDoc, proj: Projection): void {
  const { width, depth } = scene.lot;
  const corners: [number, number][] = [
    proj.toScreen(0, 0),
    proj.toScreen(width, 0),
    proj.toScreen(width, depth),
    proj.toScreen(0, depth),
  ];
  ctx.beginPath();
  ctx.moveTo(...corners[0]!);
  for (const corner of corners.slice(1)) ctx.lineTo(...corner);
  ctx.closePath();
  ctx.fillStyle = "#efe9dc";
  ctx.fill();
  ctx.strokeStyle = "#555046";
  ctx.lineWidth = 2;
  ctx.stroke();

  ctx.strokeStyle = "#ddd6c4";
  ctx.lineWidth = 1;
  for (let gx = 5; gx < width; gx += 5) {
    ctx.beginPath();
    ctx.moveTo(...proj.toScreen(gx, 0));
    ctx.lineTo(...proj.toScreen(gx, depth));
    ctx.stroke();
  }
  for (let gy = 5; gy < depth; gy += 5) {
    ctx.beginPath();
    ctx.moveTo(...proj.toScreen(0, gy));
    ctx.lineTo(...proj.toScreen(width, gy));
    ctx.stroke();
  }
}

function drawInstances(
  ctx: CanvasRenderingContext2D,
  scene: SceneDoc,
  catalog: CatalogDoc,
  camera: Camera,
  proj: Projection,
  options: DrawOptions,
  alpha: number,
): void {
  // surfaces under everything, then by southness so iso overlaps look right
  const ordered = [...scene.instances].sort((a, b) => {
    const ca = entryFor(catalog, a)?.category === "surface" ? 0 : 1;
    const cb = entryFor(catalog, b)?.category === "surface" ? 0 : 1;
    if (ca !== cb) return ca - cb;
    return b.y - a.y || (a.id < b.id ? -1 : 1);
  });
  ctx.globalAlpha = alpha;
  for (const inst of ordered) {
    const entry = entryFor(catalog, inst);
    if (!entry) continue;
    const [fill, stroke] = CATEGORY_COLORS[entry.category] ?? ["#999", "#666"];
    const selected = options.selection === inst.id;
    const flagged = options.highlight.has(inst.id);

    const isRound = entry.category === "greenery" || entry.category === "lighting"
      || entry.category === "animal";
    if (isRound) {
      const radius = Math.max(entry.canopy_radius ?? 0, entry.footprint_w / 2) * inst.scale;
      const [cx, cy] = proj.toScreen(inst.x, inst.y, entry.height ?? 0);
      ctx.beginPath();
      ctx.ellipse(
        cx, cy,
        radius * camera.zoom,
        radius * camera.zoom * (camera.tilt === "iso" ? ISO_SQUASH : 1.0),
        0, 0, Math.PI * 2,
      );
      ctx.fillStyle = fill;
      ctx.fill();
      ctx.strokeStyle = flagged ? "#d62828" : selected ? "#1d3557" : stroke;
      ctx.lineWidth = selected || flagged ? 3 : 1.5;
      ctx.stroke();
      if (camera.tilt === "iso" && (entry.height ?? 0) > 0) {
        const [bx, by] = proj.toScreen(inst.x, inst.y, 0);
        ctx.beginPath();
        ctx.moveTo(bx, by);
        ctx.lineTo(cx, cy);
        ctx.strokeStyle = stroke;
        ctx.lineWidth = 1;
        ctx.stroke();
      }
    } else {
      const corners = footprintCorners(entry, inst);
      const lifted = corners.map(([x, y]) => proj.toScreen(x, y, entry.height ?? 0));
      ctx.beginPath();
      ctx.moveTo(...lifted[0]!);
      for (const corner of lifted.slice(1)) ctx.lineTo(...corner);
      ctx.closePath();
      ctx.fillStyle = fill;
      ctx.fill();
      ctx.strokeStyle = flagged ? "#d62828" : selected ? "#1d3557" : stroke;
      ctx.lineWidth = selected || flagged ? 3 : 1.5;
      ctx.stroke();
    }
  }
  ctx.globalAlpha = 1.0;
}

/** Hit test in lot coordinates: topmost instance whose footprint box covers the point. */
export function pickInstance(
  scene: SceneDoc,
  catalog: CatalogDoc,
  x: number,
  y: number,
): string | null {
  for (let i = scene.instances.length - 1; i >= 0; i--) {
    const inst = scene.instances[i]!;
    const entry = entryFor(catalog, inst);
    if (!entry) continue;
    const reach = Math.max(
      (entry.canopy_radius ?? 0) * inst.scale,
      (Math.hypot(entry.footprint_w, entry.footprint_d) / 2) * inst.scale,
      0.5,
    );
    if (Math.hypot(inst.x - x, inst.y - y) <= reach) return inst.id;
  }
  return null;
}
