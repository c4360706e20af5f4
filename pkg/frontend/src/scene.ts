// Scene-document logic mirroring the service's placement rules exactly:
// pose bounds, footprint-on-lot checks, id allocation, canonical-precision
// serialization. The editor never invents its own geometry rules, so any
// placement accepted here is also accepted by the service on save.

import type { EntryDoc, InstanceDoc, LotDoc, SceneDoc } from "./types.js";

export const SCALE_MIN = 0.5;
export const SCALE_MAX = 2.0;

export type Point = [number, number];

export function round6(v: number): number {
  return Math.round(v * 1e6) / 1e6;
}

export function normalizeRotation(deg: number): number {
  const r = deg % 360;
  return r < 0 ? r + 360 : r;
}

export function clampScale(scale: number): number {
  return Math.min(SCALE_MAX, Math.max(SCALE_MIN, scale));
}

export function footprintCorners(entry: EntryDoc, inst: InstanceDoc): Point[] {
  const hw = (entry.footprint_w * inst.scale) / 2;
  const hd = (entry.footprint_d * inst.scale) / 2;
  const rad = (inst.rot * Math.PI) / 180;
  const c = Math.cos(rad);
  const s = Math.sin(rad);
  const local: Point[] = [
    [-hw, -hd],
    [hw, -hd],
    [hw, hd],
    [-hw, hd],
  ];
  // clockwise rotation, matching the service
  return local.map(([lx, ly]) => [inst.x + lx * c + ly * s, inst.y - lx * s + ly * c]);
}

function polygonArea(poly: Point[]): number {
  let total = 0;
  for (let i = 0; i < poly.length; i++) {
    const [x0, y0] = poly[i]!;
    const [x1, y1] = poly[(i + 1) % poly.length]!;
    total += x0 * y1 - x1 * y0;
  }
  return total / 2;
}

function clipHalf(
  points: Point[],
  inside: (p: Point) => boolean,
  intersect: (a: Point, b: Point) => Point,
): Point[] {
  if (points.length === 0) return [];
  const out: Point[] = [];
  let prev = points[points.length - 1]!;
  let prevIn = inside(prev);
  for (const cur of points) {
    const curIn = inside(cur);
    if (curIn) {
      if (!prevIn) out.push(intersect(prev, cur));
      out.push(cur);
    } else if (prevIn) {
      out.push(intersect(prev, cur));
    }
    prev = cur;
    prevIn = curIn;
  }
  return out;
}

export function clipToLot(poly: Point[], lot: LotDoc): Point[] {
  const xCross = (a: Point, b: Point, x: number): Point => {
    const t = (x - a[0]) / (b[0] - a[0]);
    return [x, a[1] + t * (b[1] - a[1])];
  };
  const yCross = (a: Point, b: Point, y: number): Point => {
    const t = (y - a[1]) / (b[1] - a[1]);
    return [a[0] + t * (b[0] - a[0]), y];
  };
  let out = clipHalf(poly, (p) => p[0] >= 0, (a, b) => xCross(a, b, 0));
  out = clipHalf(out, (p) => p[0] <= lot.width, (a, b) => xCross(a, b, lot.width));
  out = clipHalf(out, (p) => p[1] >= 0, (a, b) => yCross(a, b, 0));
  out = clipHalf(out, (p) => p[1] <= lot.depth, (a, b) => yCross(a, b, lot.depth));
  return out;
}

export function footprintOnLot(entry: EntryDoc, inst: InstanceDoc, lot: LotDoc): boolean {
  return polygonArea(clipToLot(footprintCorners(entry, inst), lot)) > 1e-12;
}

export function emptyScene(lot: LotDoc, scenarioId: string | null): SceneDoc {
  return { format_version: "1", lot, scenario_id: scenarioId, instances: [] };
}

export function nextInstanceId(scene: SceneDoc): string {
  let highest = 0;
  for (const inst of scene.instances) {
    const m = /^i(\d+)$/.exec(inst.id);
    if (m) highest = Math.max(highest, parseInt(m[1]!, 10));
  }
  return `i${String(highest + 1).padStart(4, "0")}`;
}

export function withInstance(scene: SceneDoc, inst: InstanceDoc): SceneDoc {
  return { ...scene, instances: [...scene.instances, inst] };
}

export function withoutInstance(scene: SceneDoc, id: string): SceneDoc {
  return { ...scene, instances: scene.instances.filter((i) => i.id !== id) };
}

export function withPose(scene: SceneDoc, id: string, patch: Partial<InstanceDoc>): SceneDoc {
  return {
    ...scene,
    instances: scene.instances.map((i) => (i.id === id ? { ...i, ...patch } : i)),
  };
}

/** Serialize with canonical precision: sorted instances, numbers at 6 dp. */
export function encodeScene(scene: SceneDoc): string {
  const instances = [...scene.instances]
    .sort((a, b) => (a.id < b.id ? -1 : a.id > b.id ? 1 : 0))
    .map((i) => ({
      id: i.id,
      entry: i.entry,
      x: round6(i.x),
      y: round6(i.y),
      rot: round6(normalizeRotation(i.rot)),
      scale: round6(i.scale),
    }));
  const doc = {
    format_version: scene.format_version,
    lot: {
      width: round6(scene.lot.width),
      depth: round6(scene.lot.depth),
      location_tag: scene.lot.location_tag,
    },
    scenario_id: scene.scenario_id,
    instances,
  };
  return JSON.stringify(doc, null, 2) + "\n";
}

export function decodeScene(text: string): SceneDoc {
  const doc = JSON.parse(text) as SceneDoc;
  if (doc.format_version !== "1") {
    throw new Error(`unsupported scene format_version ${String(doc.format_version)}`);
  }
  return doc;
}
