// Studio entry point: wires the editor state, canvas, palette, score
// panel, practice gate, and submission flow to the design service.

import { ApiError, DesignServiceClient } from "./api.js";
import { decodeScene, encodeScene } from "./scene.js";
import {
  DEFAULT_CAMERA,
  EditorState,
  ScorePanelState,
  deleteSelection,
  initialEditorState,
  initialScorePanel,
  markSaved,
  moveSelection,
  panCamera,
  panelOffline,
  panelScored,
  panelTouched,
  placeFromPalette,
  rotateSelection,
  scaleSelection,
  selectInstance,
  setTool,
  toggleTilt,
  zoomCamera,
} from "./state.js";
import { drawScene, pickInstance, projection } from "./render.js";
import type { AssignmentDoc, CatalogDoc, MetricScores, SceneDoc } from "./types.js";
import { METRICS } from "./types.js";

type Stage = { kind: "practice" } | { kind: "scenario"; index: number } | { kind: "done" };

const client = new DesignServiceClient("");

let catalog: CatalogDoc;
let assignment: AssignmentDoc;
let practiceTarget: SceneDoc;
let stage: Stage = { kind: "practice" };
let editor: EditorState;
let panel: ScorePanelState = initialScorePanel();
let highlight = new Set<string>();
let practicePassed = false;
let banner = "";

const canvas = document.getElementById("canvas") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;

function el<T extends HTMLElement>(id: string): T {
  return document.getElementById(id) as T;
}

function currentScenarioId(): string | null {
  return stage.kind === "scenario" ? assignment.scenario_order[stage.index]! : null;
}

function defaultLot() {
  return { width: 40, depth: 30, location_tag: "Los Angeles, CA" };
}

function resetEditor(scenarioId: string | null): void {
  editor = initialEditorState(defaultLot(), scenarioId);
  panel = initialScorePanel();
  highlight = new Set();
  banner = "";
}

function redraw(): void {
  canvas.width = canvas.clientWidth;
  canvas.height = canvas.clientHeight;
  drawScene(ctx, editor.scene, catalog, editor.camera, {
    selection: editor.selection,
    highlight,
    ghost: stage.kind === "practice" ? practiceTarget : null,
  });
  renderSidebar();
}

function renderSidebar(): void {
  const brief = el<HTMLElement>("brief");
  if (stage.kind === "practice") {
    brief.textContent =
      "Practice: replicate the ghosted target scene, then run the check. " +
      "You must pass before the design scenarios unlock.";
  } else if (stage.kind === "scenario") {
    const scenario = catalog.scenarios.find((s) => s.scenario_id === currentScenarioId());
    brief.textContent = scenario
      ? `${scenario.scenario_id}: ${scenario.brief}`
      : "";
  } else {
    brief.textContent = "All scenarios submitted. Thank you!";
  }

  el<HTMLElement>("banner").textContent = banner;
  el<HTMLElement>("revision").textContent =
    `rev ${editor.revision}${editor.dirty ? " (unsaved)" : ""}`;

  const gauges = el<HTMLElement>("gauges");
  gauges.innerHTML = "";
  for (const metric of METRICS) {
    const value = panel.vector?.[metric] ?? null;
    const row = document.createElement("div");
    row.className = "gauge";
    const label = document.createElement("span");
    label.textContent = metric;
    const bar = document.createElement("div");
    bar.className = "bar";
    const fillEl = document.createElement("div");
    fillEl.className = "fill";
    const fraction = value === null ? 0 : (value - 1) / 6;
    fillEl.style.width = `${Math.round(fraction * 100)}%`;
    bar.appendChild(fillEl);
    const num = document.createElement("span");
    num.className = "num";
    num.textContent = value === null ? "-" : value.toFixed(2);
    row.append(label, bar, num);
    gauges.appendChild(row);
  }
  el<HTMLElement>("panel-state").textContent = panel.offline
    ? "offline - showing last scores"
    : panel.stale
      ? "stale - save & score to refresh"
      : panel.vector
        ? "up to date"
        : "no scores yet";

  el<HTMLButtonElement>("check-practice").style.display =
    stage.kind === "practice" ? "block" : "none";
  el<HTMLButtonElement>("submit").style.display =
    stage.kind === "scenario" ? "block" : "none";
}

function renderPalette(): void {
  const scenario = catalog.scenarios.find((s) => s.scenario_id === currentScenarioId());
  const suggested = scenario?.suggested_entries ?? [];
  const rest = catalog.entries
    .filter((e) => !suggested.includes(e.entry_id))
    .sort((a, b) => a.category.localeCompare(b.category));
  const ordered = [
    ...suggested
      .map((id) => catalog.entries.find((e) => e.entry_id === id))
      .filter((e): e is NonNullable<typeof e> => !!e),
    ...rest,
  ];
  const paletteEl = el<HTMLElement>("palette");
  paletteEl.innerHTML = "";
  for (const entry of ordered) {
    const button = document.createElement("button");
    button.className = "palette-item" + (editor.placeEntryId === entry.entry_id ? " active" : "");
    button.textContent = entry.display_name;
    button.title = `${entry.entry_id} (${entry.category})`;
    button.onclick = () => {
      editor = { ...editor, placeEntryId: entry.entry_id, tool: "place" };
      renderPalette();
      redraw();
    };
    paletteEl.appendChild(button);
  }
}

function touchPanel(): void {
  panel = panelTouched(panel, editor);
}

async function saveAndScore(): Promise<string | null> {
  const revisionAtSave = editor.revision;
  try {
    const sceneId = await client.saveScene(encodeScene(editor.scene));
    const score = await client.scoreScene(sceneId);
    panel = panelScored(panel, { ...editor, revision: revisionAtSave }, score.scores as MetricScores);
    panel = panelTouched(panel, editor);
    editor = markSaved(editor);
    banner = "";
    return sceneId;
  } catch (error) {
    if (error instanceof ApiError) {
      banner = `rejected: ${error.body.message}`;
    } else {
      panel = panelOffline(panel);
      banner = "service unreachable";
    }
    return null;
  }
}

async function checkPractice(): Promise<void> {
  try {
    const report = await client.validatePractice(encodeScene(editor.scene));
    highlight = new Set(report.extras);
    if (report.passed) {
      practicePassed = true;
      banner = "Practice passed. Loading your first scenario...";
      redraw();
      stage = { kind: "scenario", index: 0 };
      resetEditor(currentScenarioId());
      renderPalette();
    } else {
      const missing = report.missing.length;
      const extras = report.extras.length;
      banner = `Not yet: ${missing} missing, ${extras} extra element(s) highlighted.`;
    }
  } catch {
    banner = "service unreachable";
  }
  redraw();
}

async function submitDesign(): Promise<void> {
  if (!practicePassed || stage.kind !== "scenario") return;
  const sceneId = await saveAndScore();
  if (!sceneId) {
    redraw();
    return;
  }
  const screenshot = canvas.toDataURL("image/png").split(",")[1] ?? null;
  try {
    const submissionId = await client.submit(
      assignment.participant_id, currentScenarioId()!, sceneId, screenshot,
    );
    banner = `Submitted (${submissionId.slice(0, 8)}).`;
    const nextIndex = stage.index + 1;
    if (nextIndex < assignment.scenario_order.length) {
      stage = { kind: "scenario", index: nextIndex };
      resetEditor(currentScenarioId());
      renderPalette();
    } else {
      stage = { kind: "done" };
    }
  } catch (error) {
    banner = error instanceof ApiError ? `submit failed: ${error.body.message}` : "service unreachable";
  }
  redraw();
}

function canvasPoint(event: MouseEvent): [number, number] {
  const rect = canvas.getBoundingClientRect();
  const proj = projection(editor.camera, editor.scene);
  return proj.fromScreen(event.clientX - rect.left, event.clientY - rect.top);
}

function wireCanvas(): void {
  let dragging = false;
  canvas.addEventListener("mousedown", (event) => {
    const [x, y] = canvasPoint(event);
    if (editor.tool === "place" && editor.placeEntryId) {
      const result = placeFromPalette(editor, catalog, editor.placeEntryId, x, y);
      if (result.placedId === null) {
        banner = "off-lot drop rejected";
      } else {
        banner = "";
        editor = result.state;
        touchPanel();
      }
      redraw();
      return;
    }
    const hit = pickInstance(editor.scene, catalog, x, y);
    editor = selectInstance(editor, hit);
    if (editor.tool === "delete" && hit) {
      editor = deleteSelection(editor);
      touchPanel();
    }
    dragging = editor.tool === "move" && hit !== null;
    redraw();
  });
  canvas.addEventListener("mousemove", (event) => {
    if (!dragging) return;
    const [x, y] = canvasPoint(event);
    editor = moveSelection(editor, catalog, x, y);
    touchPanel();
    redraw();
  });
  window.addEventListener("mouseup", () => {
    dragging = false;
  });
}

function wireKeyboard(): void {
  window.addEventListener("keydown", (event) => {
    if (event.target instanceof HTMLInputElement) return;
    switch (event.key) {
      case "ArrowLeft": editor = panCamera(editor, 20, 0); break;
      case "ArrowRight": editor = panCamera(editor, -20, 0); break;
      case "ArrowUp": editor = panCamera(editor, 0, 20); break;
      case "ArrowDown": editor = panCamera(editor, 0, -20); break;
      case "+": case "=": editor = zoomCamera(editor, 1.15); break;
      case "-": editor = zoomCamera(editor, 1 / 1.15); break;
      case "r": case "R": editor = rotateSelection(editor, 15); touchPanel(); break;
      case "[": editor = scaleSelection(editor, catalog, 1 / 1.1); touchPanel(); break;
      case "]": editor = scaleSelection(editor, catalog, 1.1); touchPanel(); break;
      case "Delete": case "Backspace": editor = deleteSelection(editor); touchPanel(); break;
      case "t": case "T": editor = toggleTilt(editor); break;
      case "Escape": editor = selectInstance(editor, null); break;
      case "?": toggleHelp(); break;
      default: return;
    }
    event.preventDefault();
    redraw();
  });
}

function toggleHelp(): void {
  const overlay = el<HTMLElement>("help-overlay");
  overlay.style.display = overlay.style.display === "none" ? "flex" : "none";
}

function wireButtons(): void {
  el<HTMLButtonElement>("help").onclick = toggleHelp;
  el<HTMLButtonElement>("help-close").onclick = toggleHelp;
  el<HTMLButtonElement>("tool-move").onclick = () => { editor = setTool(editor, "move"); redraw(); };
  el<HTMLButtonElement>("tool-place").onclick = () => { editor = setTool(editor, "place"); redraw(); };
  el<HTMLButtonElement>("tool-delete").onclick = () => { editor = setTool(editor, "delete"); redraw(); };
  el<HTMLButtonElement>("tilt").onclick = () => { editor = toggleTilt(editor); redraw(); };
  el<HTMLButtonElement>("refresh-score").onclick = () => void saveAndScore().then(redraw);
  el<HTMLButtonElement>("check-practice").onclick = () => void checkPractice();
  el<HTMLButtonElement>("submit").onclick = () => void submitDesign();
}

async function start(): Promise<void> {
  const participantId =
    localStorage.getItem("lotforge-participant") ??
    `p-${Math.random().toString(36).slice(2, 10)}`;
  localStorage.setItem("lotforge-participant", participantId);

  catalog = await client.getCatalog();
  assignment = await client.createAssignment(participantId);
  const practice = await client.getPractice();
  practiceTarget = decodeScene(practice.scene);
  resetEditor(null);
  editor = { ...editor, camera: { ...DEFAULT_CAMERA } };
  renderPalette();
  wireCanvas();
  wireKeyboard();
  wireButtons();
  redraw();
  window.addEventListener("resize", redraw);
}

void start();
