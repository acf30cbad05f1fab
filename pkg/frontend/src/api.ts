/**
 * Thin typed client for the scheduling service.
 *
 * `fetchFn` is injectable so contract tests can replay recorded payloads
 * without a network.
 */

import type {
  ActivityView,
  ApiError,
  EnergyView,
  ExplanationDoc,
  PatchResult,
  PowerView,
  ScheduleDoc,
  SessionCreated,
  StepView,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ServiceError extends Error {
  status: number;
  details: string[];

  constructor(status: number, body: ApiError) {
    super(body.error ?? `request failed with ${status}`);
    this.status = status;
    this.details = body.errors ?? [];
  }
}

export class Api {
  constructor(
    private base: string = "",
    private fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(method: string, path: string, body?: string): Promise<T> {
    const response = await this.fetchFn(this.base + path, { method, body });
    const text = await response.text();
    const doc = text ? JSON.parse(text) : {};
    if (!response.ok) {
      throw new ServiceError(response.status, doc as ApiError);
    }
    return doc as T;
  }

  createSession(planJson: string): Promise<SessionCreated> {
    return this.request("POST", "/sessions", planJson);
  }

  schedule(sid: string): Promise<ScheduleDoc> {
    return this.request("GET", `/sessions/${sid}/schedule`);
  }

  stepView(sid: string, step: number): Promise<StepView> {
    return this.request("GET", `/sessions/${sid}/schedule?step=${step}`);
  }

  activity(sid: string, aid: string): Promise<ActivityView> {
    return this.request("GET", `/sessions/${sid}/activities/${aid}`);
  }

  explanation(sid: string, aid: string): Promise<ExplanationDoc> {
    return this.request("GET", `/sessions/${sid}/activities/${aid}/explanation`);
  }

  energy(sid: string, t: number): Promise<EnergyView> {
    return this.request("GET", `/sessions/${sid}/energy?t=${t}`);
  }

  power(sid: string, t: number): Promise<PowerView> {
    return this.request("GET", `/sessions/${sid}/power?t=${t}`);
  }

  patchActivity(
    sid: string,
    aid: string,
    edits: Record<string, unknown>,
    revision?: number,
  ): Promise<PatchResult> {
    const body = revision === undefined ? edits : { revision, ...edits };
    return this.request("PATCH", `/sessions/${sid}/activities/${aid}`, JSON.stringify(body));
  }
}
