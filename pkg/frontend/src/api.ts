/** Thin typed client for the vtkb HTTP service.
 *
 * Every composer feature goes through this module; the UI never derives
 * a candidate list, conflict, or score on its own.
 */

import type {
  CheckResponse,
  DataItemDoc,
  MatchResponse,
  PlacementDoc,
  RecommendResponse,
  SceneDoc,
  ServiceErrorPayload,
  SummaryDoc,
  TechniqueDoc,
} from "./types.js";

export type FetchLike = (
  url: string,
  init?: RequestInit,
) => Promise<Response>;

export class ServiceError extends Error {
  readonly status: number;
  readonly payload: ServiceErrorPayload;

  constructor(status: number, payload: ServiceErrorPayload) {
    super(payload.message ?? `service returned ${status}`);
    this.name = "ServiceError";
    this.status = status;
    this.payload = payload;
  }
}

export function isAbort(err: unknown): boolean {
  return err instanceof Error && err.name === "AbortError";
}

export class ApiClient {
  private readonly baseUrl: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl: string, fetchImpl?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
    this.fetchImpl =
      fetchImpl ?? ((url, init) => globalThis.fetch(url, init));
  }

  summary(signal?: AbortSignal): Promise<SummaryDoc> {
    return this.get("/kb/summary", signal);
  }

  techniques(signal?: AbortSignal): Promise<TechniqueDoc[]> {
    return this.get("/techniques", signal);
  }

  match(item: DataItemDoc, signal?: AbortSignal): Promise<MatchResponse> {
    return this.post("/match", item, signal);
  }

  recommend(
    scene: SceneDoc,
    opts?: { topN?: number; signal?: AbortSignal },
  ): Promise<RecommendResponse> {
    // top_n is omitted at the default so the request matches what a
    // plain scene submission looks like
    const body =
      opts?.topN === undefined ? scene : { ...scene, top_n: opts.topN };
    return this.post("/recommend", body, opts?.signal);
  }

  check(
    scene: SceneDoc,
    placements: PlacementDoc[],
    signal?: AbortSignal,
  ): Promise<CheckResponse> {
    return this.post("/check", { scene, plan: { placements } }, signal);
  }

  private async get<T>(path: string, signal?: AbortSignal): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, { signal });
    return this.decode<T>(response);
  }

  private async post<T>(
    path: string,
    body: unknown,
    signal?: AbortSignal,
  ): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
      signal,
    });
    return this.decode<T>(response);
  }

  private async decode<T>(response: Response): Promise<T> {
    if (response.ok) {
      return (await response.json()) as T;
    }
    let payload: ServiceErrorPayload;
    try {
      payload = (await response.json()) as ServiceErrorPayload;
    } catch {
      payload = { error: "unreadable", message: response.statusText };
    }
    throw new ServiceError(response.status, payload);
  }
}
