// Thin typed client for the design service. All calls go through fetch;
// callers decide how to surface failures (the score panel keeps its last
// vector and shows an offline badge, the submit flow shows a toast).

import type {
  ApiErrorBody,
  AssignmentDoc,
  CatalogDoc,
  MatchReportDoc,
  PracticeResponse,
  ScoreResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public body: ApiErrorBody,
  ) {
    super(body.message);
  }
}

async function parseError(response: Response): Promise<never> {
  let body: ApiErrorBody;
  try {
    body = (await response.json()) as ApiErrorBody;
  } catch {
    body = { code: "unknown", message: response.statusText, details: [] };
  }
  throw new ApiError(response.status, body);
}

export class DesignServiceClient {
  constructor(private base: string = "") {}

  private async getJson<T>(path: string): Promise<T> {
    const response = await fetch(this.base + path);
    if (!response.ok) return parseError(response);
    return (await response.json()) as T;
  }

  async getCatalog(): Promise<CatalogDoc> {
    return this.getJson<CatalogDoc>("/api/catalog");
  }

  async getPractice(): Promise<PracticeResponse> {
    return this.getJson<PracticeResponse>("/api/practice");
  }

  async createAssignment(participantId: string): Promise<AssignmentDoc> {
    const response = await fetch(this.base + "/api/assignments", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ participant_id: participantId }),
    });
    if (!response.ok) return parseError(response);
    return (await response.json()) as AssignmentDoc;
  }

  async saveScene(sceneText: string): Promise<string> {
    const response = await fetch(this.base + "/api/scenes", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: sceneText,
    });
    if (!response.ok) return parseError(response);
    const body = (await response.json()) as { scene_id: string };
    return body.scene_id;
  }

  async getScene(sceneId: string): Promise<string> {
    const response = await fetch(this.base + `/api/scenes/${sceneId}`);
    if (!response.ok) return parseError(response);
    return response.text();
  }

  async validatePractice(sceneText: string): Promise<MatchReportDoc> {
    const response = await fetch(this.base + "/api/scenes/validate-practice", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: sceneText,
    });
    if (!response.ok) return parseError(response);
    return (await response.json()) as MatchReportDoc;
  }

  async scoreScene(sceneId: string): Promise<ScoreResponse> {
    return this.getJson<ScoreResponse>(`/api/scenes/${sceneId}/score`);
  }

  async submit(
    participantId: string,
    scenarioId: string,
    sceneId: string,
    screenshot: string | null,
  ): Promise<string> {
    const response = await fetch(this.base + "/api/submissions", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({
        participant_id: participantId,
        scenario_id: scenarioId,
        scene_id: sceneId,
        screenshot,
      }),
    });
    if (!response.ok) return parseError(response);
    const body = (await response.json()) as { submission_id: string };
    return body.submission_id;
  }
}
