// Thin typed client over the service's JSON API. All state changes are
// POSTs; reads are idempotent snapshots safe to poll.
export class ApiError extends Error {
    constructor(status, detail) {
        super(`HTTP ${status}: ${detail}`);
        this.status = status;
        this.detail = detail;
    }
}
export function apiUrl(base, path) {
    const trimmed = base.endsWith("/") ? base.slice(0, -1) : base;
    return `${trimmed}${path}`;
}
async function detailOf(response) {
    try {
        const body = (await response.json());
        if (typeof body.detail === "string")
            return body.detail;
        return JSON.stringify(body.detail ?? body);
    }
    catch {
        return response.statusText || "request failed";
    }
}
export class Client {
    constructor(base = "", fetchFn = (url, init) => fetch(url, init)) {
        this.base = base;
        this.fetchFn = fetchFn;
    }
    async request(path, init) {
        const response = await this.fetchFn(apiUrl(this.base, path), init);
        if (!response.ok) {
            throw new ApiError(response.status, await detailOf(response));
        }
        return (await response.json());
    }
    post(path, body) {
        return this.request(path, {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: body === undefined ? "{}" : JSON.stringify(body),
        });
    }
    async listCampaigns() {
        const doc = await this.request("/api/campaigns");
        return doc.campaigns;
    }
    async startCampaign(body) {
        const doc = await this.post("/api/campaigns", body);
        return doc.id;
    }
    stats(id) {
        return this.request(`/api/campaigns/${encodeURIComponent(id)}`);
    }
    stop(id) {
        return this.post(`/api/campaigns/${encodeURIComponent(id)}/stop`);
    }
    coverage(id) {
        return this.request(`/api/campaigns/${encodeURIComponent(id)}/coverage`);
    }
    buckets(id) {
        return this.request(`/api/campaigns/${encodeURIComponent(id)}/buckets`);
    }
    bucketDetail(id, hash) {
        return this.request(`/api/buckets/${encodeURIComponent(id)}/${encodeURIComponent(hash)}`);
    }
    triage(id, hash, state) {
        return this.post(`/api/buckets/${encodeURIComponent(id)}/${encodeURIComponent(hash)}/triage`, { state });
    }
    minimize(id, hash, granularity = "token") {
        return this.post(`/api/buckets/${encodeURIComponent(id)}/${encodeURIComponent(hash)}/minimize`, { granularity, budget: 2000 });
    }
}
