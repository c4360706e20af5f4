// Editor state and its pure transitions. Everything here is DOM-free so it
// can be unit tested; main.ts owns the wiring and rendering.

import {
  clampScale,
  emptyScene,
  footprintOnLot,
  nextInstanceId,
  normalizeRotation,
  withInstance,
  withPose,
  withoutInstance,
} from "./scene.js";
import type { CatalogDoc, EntryDoc, LotDoc, MetricScores, SceneDoc } from "./types.js";

export type Tool = "place" | "move" | "rotate" | "scale" | "delete";
export type TiltPreset = "top" | "iso";

export interface Camera {
  panX: number;
  panY: number;
  zoom: number; // screen pixels per meter
  tilt: TiltPreset;
}

export interface EditorState {
  scene: SceneDoc;
  revision: number;
  selection: string | null;
  tool: Tool;
  camera: Camera;
  dirty: boolean;
  placeEntryId: string | null;
}

export interface ScorePanelState {
  vector: MetricScores | null;
  stale: boolean;
  lastScoredRevision: number;
  offline: boolean;
}

export const DEFAULT_CAMERA: Camera = { panX: 0, panY: 0, zoom: 18, tilt: "top" };

export function initialEditorState(lot: LotDoc, scenarioId: string | null): EditorState {
  return {
    scene: emptyScene(lot, scenarioId),
    revision: 0,
    selection: null,
    tool: "place",
    camera: { ...DEFAULT_CAMERA },
    dirty: false,
    placeEntryId: null,
  };
}

export function initialScorePanel(): ScorePanelState {
  return { vector: null, stale: true, lastScoredRevision: -1, offline: false };
}

function bumped(state: EditorState, scene: SceneDoc): EditorState {
  return { ...state, scene, revision: state.revision + 1, dirty: true };
}

function entryById(catalog: CatalogDoc, entryId: string): EntryDoc | undefined {
  return catalog.entries.find((e) => e.entry_id === entryId);
}

/**
 * Drop an element from the palette at a lot point. Mirrors the service's
 * add rules: entry must exist, pose bounds hold, footprint must land on
 * the lot. Returns the same state (no change) when the drop is rejected.
 */
export function placeFromPalette(
  state: EditorState,
  catalog: CatalogDoc,
  entryId: string,
  x: number,
  y: number,
  rot = 0,
  scale = 1,
): { state: EditorState; placedId: string | null } {
  const entry = entryById(catalog, entryId);
  if (!entry) return { state, placedId: null };
  const inst = {
    id: nextInstanceId(state.scene),
    entry: entryId,
    x,
    y,
    rot: normalizeRotation(rot),
    scale: clampScale(scale),
  };
  if (!footprintOnLot(entry, inst, state.scene.lot)) {
    return { state, placedId: null };
  }
  const next = bumped(state, withInstance(state.scene, inst));
  return { state: { ...next, selection: inst.id }, placedId: inst.id };
}

export function moveSelection(
  state: EditorState,
  catalog: CatalogDoc,
  x: number,
  y: number,
): EditorState {
  if (!state.selection) return state;
  const inst = state.scene.instances.find((i) => i.id === state.selection);
  if (!inst) return state;
  const entry = entryById(catalog, inst.entry);
  if (!entry) return state;
  const moved = { ...inst, x, y };
  if (!footprintOnLot(entry, moved, state.scene.lot)) return state;
  return bumped(state, withPose(state.scene, inst.id, { x, y }));
}

export function rotateSelection(state: EditorState, deltaDeg: number): EditorState {
  if (!state.selection) return state;
  const inst = state.scene.instances.find((i) => i.id === state.selection);
  if (!inst) return state;
  return bumped(
    state,
    withPose(state.scene, inst.id, { rot: normalizeRotation(inst.rot + deltaDeg) }),
  );
}

export function scaleSelection(
  state: EditorState,
  catalog: CatalogDoc,
  factor: number,
): EditorState {
  if (!state.selection) return state;
  const inst = state.scene.instances.find((i) => i.id === state.selection);
  if (!inst) return state;
  const entry = entryById(catalog, inst.entry);
  if (!entry) return state;
  const scaled = { ...inst, scale: clampScale(inst.scale * factor) };
  if (scaled.scale === inst.scale) return state;
  if (!footprintOnLot(entry, scaled, state.scene.lot)) return state;
  return bumped(state, withPose(state.scene, inst.id, { scale: scaled.scale }));
}

export function deleteSelection(state: EditorState): EditorState {
  if (!state.selection) return state;
  if (!state.scene.instances.some((i) => i.id === state.selection)) return state;
  const next = bumped(state, withoutInstance(state.scene, state.selection));
  return { ...next, selection: null };
}

export function selectInstance(state: EditorState, id: string | null): EditorState {
  if (id !== null && !state.scene.instances.some((i) => i.id === id)) return state;
  return { ...state, selection: id };
}

export function setTool(state: EditorState, tool: Tool): EditorState {
  return { ...state, tool };
}

export function panCamera(state: EditorState, dx: number, dy: number): EditorState {
  const camera = { ...state.camera, panX: state.camera.panX + dx, panY: state.camera.panY + dy };
  return { ...state, camera };
}

export function zoomCamera(state: EditorState, factor: number): EditorState {
  const zoom = Math.min(80, Math.max(5, state.camera.zoom * factor));
  return { ...state, camera: { ...state.camera, zoom } };
}

export function toggleTilt(state: EditorState): EditorState {
  const tilt: TiltPreset = state.camera.tilt === "top" ? "iso" : "top";
  return { ...state, camera: { ...state.camera, tilt } };
}

export function markSaved(state: EditorState): EditorState {
  return { ...state, dirty: false };
}

// --- score panel -----------------------------------------------------------

export function panelIsStale(panel: ScorePanelState, editor: EditorState): boolean {
  return editor.revision > panel.lastScoredRevision;
}

export function panelScored(
  _panel: ScorePanelState,
  editor: EditorState,
  vector: MetricScores,
): ScorePanelState {
  return { vector, stale: false, lastScoredRevision: editor.revision, offline: false };
}

export function panelOffline(panel: ScorePanelState): ScorePanelState {
  // keep the last vector; just badge the panel
  return { ...panel, offline: true };
}

export function panelTouched(panel: ScorePanelState, editor: EditorState): ScorePanelState {
  return { ...panel, stale: panelIsStale(panel, editor) };
}
