// Contract replay against the real design service: the scripted session a
// participant would run through the editor, driven through the same state
// transitions the UI uses. Spawns `python3 -m lotforge serve` on a scratch
// data directory.

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { DesignServiceClient } from "../src/api.js";
import { decodeScene, encodeScene } from "../src/scene.js";
import { initialEditorState, placeFromPalette, type EditorState } from "../src/state.js";
import type { CatalogDoc } from "../src/types.js";

const PORT = 19000 + Math.floor(Math.random() * 2000);
const BASE = `http://127.0.0.1:${PORT}`;
const LOT = { width: 40, depth: 30, location_tag: "Los Angeles, CA" };

let server: ChildProcess;
let dataDir: string;
let client: DesignServiceClient;
let catalog: CatalogDoc;

function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

async function waitForService(): Promise<void> {
  const deadline = Date.now() + 60_000;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${BASE}/api/catalog`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 150));
  }
  throw new Error("design service did not come up");
}

beforeAll(async () => {
  dataDir = mkdtempSync(join(tmpdir(), "lotforge-ui-"));
  server = spawn(
    "python3",
    ["-m", "lotforge", "--quiet", "serve", "--port", String(PORT), "--data-dir", dataDir],
    { stdio: "ignore" },
  );
  await waitForService();
  client = new DesignServiceClient(BASE);
  catalog = await client.getCatalog();
});

afterAll(() => {
  server?.kill("SIGTERM");
});

describe("UI contract replay", () => {
  it("passes the practice gate by replicating the target", async () => {
    const practice = await client.getPractice();
    const target = decodeScene(practice.scene);

    // replay the target through the editor's own placement transitions
    let editor = initialEditorState(LOT, null);
    for (const inst of target.instances) {
      const result = placeFromPalette(
        editor, catalog, inst.entry, inst.x, inst.y, inst.rot, inst.scale,
      );
      expect(result.placedId).not.toBeNull();
      editor = result.state;
    }
    const report = await client.validatePractice(encodeScene(editor.scene));
    expect(report.passed).toBe(true);
    expect(report.missing).toEqual([]);
    expect(report.extras).toEqual([]);

    // an extra element must fail the gate and come back highlighted
    const withExtra = placeFromPalette(editor, catalog, "goat", 5, 5).state;
    const failed = await client.validatePractice(encodeScene(withExtra.scene));
    expect(failed.passed).toBe(false);
    expect(failed.extras).toHaveLength(1);
  });

  it("designs A4, submits, and the stored scene outscores the empty lot", async () => {
    const assignment = await client.createAssignment("ui-replay");
    expect(assignment.group).toBe("A"); // first participant, round-robin
    expect([...assignment.scenario_order].sort()).toEqual(["A1", "A2", "A3", "A4"]);

    // empty-lot baseline
    const emptyId = await client.saveScene(
      encodeScene(initialEditorState(LOT, "A4").scene),
    );
    const emptyScores = (await client.scoreScene(emptyId)).scores;
    expect(emptyScores.nature).toBe(1.0);
    expect(emptyScores.sociability).toBe(1.0);

    // ten placements for the community-garden brief
    const placements: [string, number, number][] = [
      ["tree.oak", 10, 20],
      ["tree.oak", 30, 20],
      ["garden.bed.raised", 12, 8],
      ["garden.bed.raised", 16, 8],
      ["garden.bed.raised", 20, 8],
      ["garden.bed.flower", 24, 8],
      ["bench.basic", 14, 15],
      ["bench.basic", 16, 15],
      ["table.picnic", 20, 16],
      ["goat", 32, 10],
    ];
    let editor = initialEditorState(LOT, "A4");
    for (const [entry, x, y] of placements) {
      const result = placeFromPalette(editor, catalog, entry, x, y);
      expect(result.placedId).not.toBeNull();
      editor = result.state;
    }
    expect(editor.scene.instances).toHaveLength(10);

    const sceneId = await client.saveScene(encodeScene(editor.scene));
    const scores = (await client.scoreScene(sceneId)).scores;
    expect(scores.nature).toBeGreaterThan(emptyScores.nature!);
    expect(scores.sociability).toBeGreaterThan(emptyScores.sociability!);

    // the stored scene round-trips: same instances after canonicalization
    const stored = decodeScene(await client.getScene(sceneId));
    expect(stored.instances).toHaveLength(10);
    const byId = new Map(stored.instances.map((i) => [i.id, i]));
    for (const inst of editor.scene.instances) {
      const got = byId.get(inst.id)!;
      expect(got.entry).toBe(inst.entry);
      expect(got.x).toBeCloseTo(inst.x, 6);
      expect(got.y).toBeCloseTo(inst.y, 6);
    }

    const submissionId = await client.submit(
      "ui-replay", "A4", sceneId, "ZmFrZS1zY3JlZW5zaG90",
    );
    expect(submissionId).toBeTruthy();

    // the stored submission carries the server-rendered plan SVG
    const log = readFileSync(join(dataDir, "submissions.ndjson"), "utf-8")
      .trim()
      .split("\n")
      .map((line) => JSON.parse(line) as { id: string; body: Record<string, unknown> });
    const record = log.find((r) => r.id === submissionId);
    expect(record).toBeDefined();
    expect(String(record!.body.plan_svg)).toMatch(/^<svg/);
    expect(record!.body.screenshot).toBe("ZmFrZS1zY3JlZW5zaG90");
    expect(record!.body.scenario_id).toBe("A4");
  });

  it("never accepts locally what the service would reject", async () => {
    const rand = mulberry32(20260810);
    let editor: EditorState = initialEditorState(LOT, "A1");
    const entries = catalog.entries.map((e) => e.entry_id);
    let accepted = 0;
    let rejected = 0;
    for (let i = 0; i < 60; i++) {
      const entry = entries[Math.floor(rand() * entries.length)]!;
      const x = -5 + rand() * 50; // deliberately straying beyond the lot
      const y = -5 + rand() * 40;
      const rot = rand() * 360;
      const scale = 0.5 + rand() * 1.5;
      const result = placeFromPalette(editor, catalog, entry, x, y, rot, scale);
      if (result.placedId) {
        accepted += 1;
        editor = result.state;
      } else {
        rejected += 1;
      }
    }
    expect(accepted).toBeGreaterThan(0);
    expect(rejected).toBeGreaterThan(0); // the stray drops were rejected locally
    // everything accepted locally is accepted by the service in one save
    const sceneId = await client.saveScene(encodeScene(editor.scene));
    expect(sceneId).toBeTruthy();
    const stored = decodeScene(await client.getScene(sceneId));
    expect(stored.instances).toHaveLength(accepted);
  });
});
