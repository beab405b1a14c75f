// Single-page bootstrap: hash routing between the campaign list and a
// campaign detail view (live chart + bucket triage). Polls every 2 s.

import { Client } from "./api.js";
import { createPoller } from "./state.js";
import {
  describeError,
  drawChart,
  makeSeries,
  renderBucketDetail,
  renderBucketTable,
  renderCampaignList,
  validateForm,
  el,
  replaceBucket,
  toggleSort,
  errorBanner,
} from "./views.js";
import { statusBadgeClass, fmtCount } from "./format.js";
import type { BucketDetail, BucketSummary, CampaignStats, CoveragePoint } from "./types.js";
import type { BucketSort, FormState } from "./state.js";

const POLL_MS = 2000;
const client = new Client("");
const app = document.getElementById("app") as HTMLElement;

let activePoller: { stop(): void } | null = null;

function route(): void {
  if (activePoller !== null) {
    activePoller.stop();
    activePoller = null;
  }
  const hash = window.location.hash;
  const match = /^#\/c\/(.+)$/.exec(hash);
  if (match !== null) {
    showDetailView(decodeURIComponent(match[1]));
  } else {
    showListView();
  }
}

// --- list view ---

function showListView(): void {
  const state = {
    campaigns: null as null | Awaited<ReturnType<typeof client.listCampaigns>>,
    error: null as string | null,
    formProblems: [] as string[],
  };

  const render = () =>
    renderCampaignList(app, state, {
      onOpen: (id) => {
        window.location.hash = `#/c/${id}`;
      },
      onLaunch: (form) => void launch(form),
      onRetry: () => void refresh(),
    });

  async function refresh(): Promise<void> {
    try {
      state.campaigns = await client.listCampaigns();
      state.error = null;
    } catch (error) {
      state.error = describeError(error);
    }
    render();
  }

  async function launch(form: FormState): Promise<void> {
    state.formProblems = validateForm(form);
    if (state.formProblems.length > 0) {
      render();
      return;
    }
    try {
      const id = await client.startCampaign({
        strategy: form.strategy,
        target_cmd: form.targetCmd,
        time_budget: form.timeBudget,
        master_seed: form.masterSeed,
        workers: 1,
        timeout: 10.0,
        grammar_path: form.grammarPath.trim() === "" ? null : form.grammarPath.trim(),
        max_depth: 12,
        seed_corpus: 0,
      });
      window.location.hash = `#/c/${id}`;
    } catch (error) {
      state.formProblems = [describeError(error)];
      render();
    }
  }

  render();
  const poller = createPoller(refresh, POLL_MS);
  poller.start();
  activePoller = poller;
}

// --- detail view ---

function showDetailView(id: string): void {
  let stats: CampaignStats | null = null;
  let coverage: CoveragePoint[] = [];
  let buckets: BucketSummary[] = [];
  let overlays: Map<string, CoveragePoint[]> = new Map();
  let overlayIds: string[] = [];
  let allCampaignIds: string[] = [];
  let sort: BucketSort = { key: "first_seen", ascending: true };
  let selected: string | null = null;
  let detail: BucketDetail | null = null;
  let notice: string | null = null;
  let error: string | null = null;

  app.replaceChildren();
  const backLink = el("a", { href: "#/" }, ["← campaigns"]);
  const title = el("h1", { class: "mono" }, [id]);
  const statusLine = el("p", {});
  const bannerSlot = el("div", {});
  const canvas = el("canvas", { width: "860", height: "300", class: "chart" });
  const overlayBox = el("div", { class: "overlay-box" });
  const stopButton = el("button", { class: "btn" }, ["stop campaign"]);
  const tableSlot = el("div", {});
  const detailSlot = el("div", { class: "detail-pane" });
  app.append(
    backLink,
    title,
    statusLine,
    bannerSlot,
    stopButton,
    canvas,
    overlayBox,
    el("h2", {}, ["crash buckets"]),
    tableSlot,
    detailSlot,
  );

  stopButton.addEventListener("click", () => {
    void client
      .stop(id)
      .then(() => refresh())
      .catch((err) => {
        notice = describeError(err);
        renderAll();
      });
  });

  function renderAll(): void {
    bannerSlot.replaceChildren();
    if (error !== null) {
      bannerSlot.append(errorBanner(error, () => void refresh()));
    }
    if (stats !== null) {
      statusLine.replaceChildren(
        el("span", { class: statusBadgeClass(stats.status) }, [stats.status]),
        ` ${stats.strategy} · ${fmtCount(stats.executions)} executions · ` +
          `${fmtCount(stats.buckets_found)} buckets · ` +
          `${fmtCount(stats.covered)} covered counters`,
      );
    }
    const seriesEntries = [{ id, points: coverage }];
    for (const overlayId of overlayIds) {
      const points = overlays.get(overlayId);
      if (points !== undefined) seriesEntries.push({ id: overlayId, points });
    }
    drawChart(canvas, makeSeries(seriesEntries));
    renderOverlaySelector();
    const viewState = { buckets, sort, selected, detail, notice };
    renderBucketTable(tableSlot, viewState, {
      onSelect: (hash) => void select(hash),
      onSort: (key) => {
        sort = toggleSort(sort, key);
        renderAll();
      },
    });
    renderBucketDetail(detailSlot, viewState, {
      onTriage: (state) => void triage(state),
      onMinimize: () => void minimizeSelected(),
    });
  }

  function renderOverlaySelector(): void {
    overlayBox.replaceChildren(el("span", {}, ["overlay: "]));
    for (const otherId of allCampaignIds) {
      if (otherId === id) continue;
      const box = el("input", { type: "checkbox" }) as HTMLInputElement;
      box.checked = overlayIds.includes(otherId);
      box.addEventListener("change", () => {
        overlayIds = box.checked
          ? [...overlayIds, otherId]
          : overlayIds.filter((x) => x !== otherId);
        void refresh();
      });
      overlayBox.append(el("label", { class: "overlay-item" }, [box, otherId]));
    }
  }

  async function refresh(): Promise<void> {
    try {
      [stats, coverage, buckets] = await Promise.all([
        client.stats(id),
        client.coverage(id),
        client.buckets(id),
      ]);
      allCampaignIds = (await client.listCampaigns()).map((c) => c.id);
      const overlayPoints: Array<[string, CoveragePoint[]]> = await Promise.all(
        overlayIds.map(async (overlayId): Promise<[string, CoveragePoint[]]> => {
          try {
            return [overlayId, await client.coverage(overlayId)];
          } catch {
            return [overlayId, []];
          }
        }),
      );
      overlays = new Map(overlayPoints);
      error = null;
    } catch (err) {
      error = describeError(err);
    }
    renderAll();
  }

  async function select(hash: string): Promise<void> {
    selected = hash;
    notice = null;
    try {
      detail = await client.bucketDetail(id, hash);
    } catch (err) {
      notice = describeError(err);
    }
    renderAll();
  }

  async function triage(state: string): Promise<void> {
    if (selected === null) return;
    try {
      const updated = await client.triage(id, selected, state);
      buckets = replaceBucket(buckets, updated);
      if (detail !== null) detail = { ...detail, bucket: updated };
      notice = null;
    } catch (err) {
      notice = describeError(err);
    }
    renderAll();
  }

  async function minimizeSelected(): Promise<void> {
    if (selected === null) return;
    notice = "minimizing… (re-runs the target many times)";
    renderAll();
    try {
      const info = await client.minimize(id, selected);
      notice =
        `minimized ${info.size_before} → ${info.size_after} bytes in ` +
        `${info.evaluations} evaluations (minimal: ${info.minimal})`;
      detail = await client.bucketDetail(id, selected);
    } catch (err) {
      notice = describeError(err);
    }
    renderAll();
  }

  renderAll();
  void refresh();
  const poller = createPoller(refresh, POLL_MS);
  poller.start();
  activePoller = poller;
}

window.addEventListener("hashchange", route);
route();
