import { describe, expect, it, vi } from "vitest";

import { ApiError, apiUrl, Client } from "../src/api.js";

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

describe("apiUrl", () => {
  it("joins base and path without double slashes", () => {
    expect(apiUrl("", "/api/campaigns")).toBe("/api/campaigns");
    expect(apiUrl("http://x:8080", "/api/campaigns")).toBe("http://x:8080/api/campaigns");
    expect(apiUrl("http://x:8080/", "/api/campaigns")).toBe("http://x:8080/api/campaigns");
  });
});

describe("Client", () => {
  it("unwraps the campaigns envelope", async () => {
    const fetchFn = vi.fn(async () => jsonResponse({ campaigns: [{ id: "c1" }] }));
    const client = new Client("", fetchFn);
    const campaigns = await client.listCampaigns();
    expect(campaigns).toEqual([{ id: "c1" }]);
    expect(fetchFn).toHaveBeenCalledWith("/api/campaigns", undefined);
  });

  it("POSTs triage transitions with a JSON body", async () => {
    const fetchFn = vi.fn(async () => jsonResponse({ bucket_hash: "h", triage_state: "confirmed" }));
    const client = new Client("", fetchFn);
    await client.triage("c1", "beef", "confirmed");
    const [url, init] = fetchFn.mock.calls[0] as [string, RequestInit];
    expect(url).toBe("/api/buckets/c1/beef/triage");
    expect(init.method).toBe("POST");
    expect(JSON.parse(init.body as string)).toEqual({ state: "confirmed" });
  });

  it("escapes path segments", async () => {
    const fetchFn = vi.fn(async () => jsonResponse([]));
    const client = new Client("", fetchFn);
    await client.buckets("a/b");
    expect((fetchFn.mock.calls[0] as [string])[0]).toBe("/api/campaigns/a%2Fb/buckets");
  });

  it("raises ApiError with the service detail on failures", async () => {
    const fetchFn = vi.fn(async () => jsonResponse({ detail: "unknown bucket" }, 404));
    const client = new Client("", fetchFn);
    await expect(client.bucketDetail("c1", "nope")).rejects.toThrowError(ApiError);
    await client.bucketDetail("c1", "nope").catch((error: ApiError) => {
      expect(error.status).toBe(404);
      expect(error.detail).toBe("unknown bucket");
    });
  });

  it("starts campaigns and returns the new id", async () => {
    const fetchFn = vi.fn(async () => jsonResponse({ id: "grammar-1" }));
    const client = new Client("", fetchFn);
    const id = await client.startCampaign({
      strategy: "grammar",
      target_cmd: "toy {input}",
      time_budget: 60,
      master_seed: 1,
      workers: 1,
      timeout: 10,
      grammar_path: "minipvl",
      max_depth: 12,
      seed_corpus: 0,
    });
    expect(id).toBe("grammar-1");
  });
});
