// Thin typed client over the service's JSON API. All state changes are
// POSTs; reads are idempotent snapshots safe to poll.

import type {
  BucketDetail,
  BucketSummary,
  CampaignStats,
  CampaignSummary,
  CoveragePoint,
  MinimizeInfo,
  StartRequest,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export function apiUrl(base: string, path: string): string {
  const trimmed = base.endsWith("/") ? base.slice(0, -1) : base;
  return `${trimmed}${path}`;
}

async function detailOf(response: Response): Promise<string> {
  try {
    const body = (await response.json()) as { detail?: unknown };
    if (typeof body.detail === "string") return body.detail;
    return JSON.stringify(body.detail ?? body);
  } catch {
    return response.statusText || "request failed";
  }
}

export class Client {
  constructor(
    private readonly base: string = "",
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(apiUrl(this.base, path), init);
    if (!response.ok) {
      throw new ApiError(response.status, await detailOf(response));
    }
    return (await response.json()) as T;
  }

  private post<T>(path: string, body?: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: body === undefined ? "{}" : JSON.stringify(body),
    });
  }

  async listCampaigns(): Promise<CampaignSummary[]> {
    const doc = await this.request<{ campaigns: CampaignSummary[] }>("/api/campaigns");
    return doc.campaigns;
  }

  async startCampaign(body: StartRequest): Promise<string> {
    const doc = await this.post<{ id: string }>("/api/campaigns", body);
    return doc.id;
  }

  stats(id: string): Promise<CampaignStats> {
    return this.request(`/api/campaigns/${encodeURIComponent(id)}`);
  }

  stop(id: string): Promise<unknown> {
    return this.post(`/api/campaigns/${encodeURIComponent(id)}/stop`);
  }

  coverage(id: string): Promise<CoveragePoint[]> {
    return this.request(`/api/campaigns/${encodeURIComponent(id)}/coverage`);
  }

  buckets(id: string): Promise<BucketSummary[]> {
    return this.request(`/api/campaigns/${encodeURIComponent(id)}/buckets`);
  }

  bucketDetail(id: string, hash: string): Promise<BucketDetail> {
    return this.request(
      `/api/buckets/${encodeURIComponent(id)}/${encodeURIComponent(hash)}`,
    );
  }

  triage(id: string, hash: string, state: string): Promise<BucketSummary> {
    return this.post(
      `/api/buckets/${encodeURIComponent(id)}/${encodeURIComponent(hash)}/triage`,
      { state },
    );
  }

  minimize(id: string, hash: string, granularity = "token"): Promise<MinimizeInfo> {
    return this.post(
      `/api/buckets/${encodeURIComponent(id)}/${encodeURIComponent(hash)}/minimize`,
      { granularity, budget: 2000 },
    );
  }
}
