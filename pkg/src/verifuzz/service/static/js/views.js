// DOM rendering. Views are re-rendered from fresh API snapshots on every
// poll; all mutation goes through POSTs on explicit button clicks.
import { ApiError, Client } from "./api.js";
import { buildChart, colorFor } from "./chart.js";
import { decodeBase64, fmtBytes, fmtCount, fmtWhen, hashPrefix, statusBadgeClass, triageBadgeClass, } from "./format.js";
import { replaceBucket, sortBuckets, toggleSort, validateForm, } from "./state.js";
import { STRATEGIES, TRIAGE_STATES, } from "./types.js";
export function el(tag, attrs = {}, children = []) {
    const node = document.createElement(tag);
    for (const [key, value] of Object.entries(attrs)) {
        if (key === "class")
            node.className = value;
        else
            node.setAttribute(key, value);
    }
    for (const child of children) {
        node.append(child);
    }
    return node;
}
export function errorBanner(message, onRetry) {
    const retry = el("button", { class: "btn" }, ["retry"]);
    retry.addEventListener("click", onRetry);
    return el("div", { class: "banner banner-error" }, [
        `service unreachable: ${message} `,
        retry,
    ]);
}
export function renderCampaignList(container, state, actions) {
    container.replaceChildren();
    container.append(el("h1", {}, ["fuzzing campaigns"]));
    if (state.error !== null) {
        container.append(errorBanner(state.error, actions.onRetry));
    }
    const campaigns = state.campaigns ?? [];
    if (state.campaigns !== null && campaigns.length === 0) {
        container.append(el("p", { class: "empty-state" }, [
            "No campaigns yet. Launch one below to start fuzzing.",
        ]));
    }
    else if (campaigns.length > 0) {
        const head = el("tr", {}, [
            el("th", {}, ["campaign"]),
            el("th", {}, ["strategy"]),
            el("th", {}, ["status"]),
            el("th", { class: "num" }, ["executions"]),
            el("th", { class: "num" }, ["buckets"]),
            el("th", { class: "num" }, ["covered"]),
        ]);
        const rows = campaigns.map((c) => {
            const link = el("a", { href: `#/c/${c.id}` }, [c.id]);
            const row = el("tr", { class: "row-link" }, [
                el("td", {}, [link]),
                el("td", {}, [c.strategy]),
                el("td", {}, [el("span", { class: statusBadgeClass(c.status) }, [c.status])]),
                el("td", { class: "num" }, [fmtCount(c.executions)]),
                el("td", { class: "num" }, [fmtCount(c.buckets_found)]),
                el("td", { class: "num" }, [fmtCount(c.covered)]),
            ]);
            row.addEventListener("click", (event) => {
                if (!(event.target instanceof HTMLAnchorElement))
                    actions.onOpen(c.id);
            });
            return row;
        });
        container.append(el("table", { class: "table" }, [el("thead", {}, [head]), el("tbody", {}, rows)]));
    }
    container.append(renderLaunchForm(state.formProblems, actions.onLaunch));
}
function renderLaunchForm(problems, onLaunch) {
    const strategy = el("select", { id: "f-strategy" });
    for (const s of STRATEGIES) {
        strategy.append(el("option", { value: s }, [s]));
    }
    strategy.value = "grammar";
    const targetCmd = el("input", {
        id: "f-target",
        value: "toy-verifier {input} --bugs B1,B2,B3,B4,B5,B6,B7,B8",
        size: "72",
    });
    const grammarPath = el("input", { id: "f-grammar", value: "minipvl", size: "24" });
    const timeBudget = el("input", { id: "f-budget", value: "300", size: "8" });
    const masterSeed = el("input", { id: "f-seed", value: "1", size: "8" });
    const problemList = el("ul", { class: "form-problems" }, problems.map((p) => el("li", {}, [p])));
    const submit = el("button", { class: "btn btn-primary" }, ["start campaign"]);
    submit.addEventListener("click", () => {
        onLaunch({
            strategy: strategy.value,
            targetCmd: targetCmd.value,
            grammarPath: grammarPath.value,
            timeBudget: Number(timeBudget.value),
            masterSeed: Number(masterSeed.value),
        });
    });
    const field = (label, input) => el("label", { class: "field" }, [el("span", {}, [label]), input]);
    return el("div", { class: "launch-form" }, [
        el("h2", {}, ["launch a campaign"]),
        problemList,
        field("strategy", strategy),
        field("target command", targetCmd),
        field("grammar", grammarPath),
        field("time budget (s)", timeBudget),
        field("master seed", masterSeed),
        submit,
    ]);
}
export { validateForm };
// --- coverage chart ---
export function drawChart(canvas, seriesList) {
    const ctx = canvas.getContext("2d");
    if (ctx === null)
        return;
    const { width, height } = canvas;
    ctx.clearRect(0, 0, width, height);
    if (seriesList.every((s) => s.points.length === 0)) {
        ctx.fillStyle = "#6b7280";
        ctx.font = "14px system-ui";
        ctx.fillText("no coverage data yet", width / 2 - 70, height / 2);
        return;
    }
    const geometry = buildChart(seriesList, width, height);
    ctx.strokeStyle = "#d1d5db";
    ctx.fillStyle = "#6b7280";
    ctx.font = "11px system-ui";
    ctx.beginPath();
    for (const tick of geometry.xTicks) {
        ctx.moveTo(tick.pos, geometry.margin.top);
        ctx.lineTo(tick.pos, height - geometry.margin.bottom);
        ctx.fillText(tick.label, tick.pos - 8, height - geometry.margin.bottom + 16);
    }
    for (const tick of geometry.yTicks) {
        ctx.moveTo(geometry.margin.left, tick.pos);
        ctx.lineTo(width - geometry.margin.right, tick.pos);
        ctx.fillText(tick.label, 8, tick.pos + 4);
    }
    ctx.stroke();
    for (const path of geometry.paths) {
        if (path.points.length === 0)
            continue;
        ctx.strokeStyle = path.color;
        ctx.lineWidth = 2;
        ctx.beginPath();
        ctx.moveTo(path.points[0][0], path.points[0][1]);
        for (const [x, y] of path.points.slice(1)) {
            ctx.lineTo(x, y);
        }
        // Extend the last step to the right edge: coverage holds once gained.
        const last = path.points[path.points.length - 1];
        ctx.lineTo(width - geometry.margin.right, last[1]);
        ctx.stroke();
    }
    ctx.fillText("t (seconds)", width / 2 - 30, height - 4);
}
export function makeSeries(entries) {
    return entries.map((entry, i) => ({
        id: entry.id,
        color: colorFor(i),
        points: entry.points,
    }));
}
export function renderBucketTable(container, state, actions) {
    container.replaceChildren();
    if (state.buckets.length === 0) {
        container.append(el("p", { class: "empty-state" }, ["no crash buckets yet"]));
        return;
    }
    const header = (label, key) => {
        const arrow = state.sort.key === key ? (state.sort.ascending ? " ▲" : " ▼") : "";
        const th = el("th", { class: "sortable" }, [label + arrow]);
        th.addEventListener("click", () => actions.onSort(key));
        return th;
    };
    const head = el("tr", {}, [
        header("bucket", "bucket_hash"),
        header("exception", "exception"),
        header("hits", "hit_count"),
        header("first seen", "first_seen"),
        header("state", "triage_state"),
    ]);
    const now = Date.now() / 1000;
    const rows = sortBuckets(state.buckets, state.sort).map((b) => {
        const row = el("tr", { class: b.bucket_hash === state.selected ? "row-link selected" : "row-link" }, [
            el("td", { class: "mono" }, [hashPrefix(b.bucket_hash)]),
            el("td", {}, [b.exception]),
            el("td", { class: "num" }, [fmtCount(b.hit_count)]),
            el("td", {}, [fmtWhen(b.first_seen, now)]),
            el("td", {}, [el("span", { class: triageBadgeClass(b.triage_state) }, [b.triage_state])]),
        ]);
        row.addEventListener("click", () => actions.onSelect(b.bucket_hash));
        return row;
    });
    container.append(el("table", { class: "table" }, [el("thead", {}, [head]), el("tbody", {}, rows)]));
}
export function renderBucketDetail(container, state, actions) {
    container.replaceChildren();
    if (state.detail === null) {
        container.append(el("p", { class: "empty-state" }, ["select a bucket to inspect it"]));
        return;
    }
    const detail = state.detail;
    container.append(el("h3", { class: "mono" }, [detail.bucket.bucket_hash]), el("p", {}, [
        el("strong", {}, [detail.bucket.exception]),
        ` — first found by ${detail.bucket.strategy_first || "unknown strategy"}, ` +
            `${fmtCount(detail.bucket.hit_count)} hits`,
    ]));
    if (state.notice !== null) {
        container.append(el("div", { class: "banner" }, [state.notice]));
    }
    const triageButtons = TRIAGE_STATES.filter((s) => s !== "new").map((s) => {
        const button = el("button", { class: "btn" }, [s]);
        button.addEventListener("click", () => actions.onTriage(s));
        return button;
    });
    const minimizeButton = el("button", { class: "btn btn-primary" }, ["minimize"]);
    minimizeButton.addEventListener("click", actions.onMinimize);
    container.append(el("div", { class: "actions" }, [...triageButtons, minimizeButton]));
    container.append(el("h4", {}, ["stack trace"]));
    container.append(el("pre", { class: "trace" }, [detail.trace_text]));
    container.append(el("h4", {}, ["crashing input"]));
    container.append(el("pre", { class: "input-text" }, [decodeBase64(detail.input_b64)]));
    if (detail.minimized_b64 !== null) {
        const info = detail.minimize_info;
        const sizes = info && info.size_before !== undefined && info.size_after !== undefined
            ? ` (${fmtBytes(info.size_before)} → ${fmtBytes(info.size_after)})`
            : "";
        container.append(el("h4", {}, [`minimized input${sizes}`]));
        container.append(el("pre", { class: "input-text minimized" }, [decodeBase64(detail.minimized_b64)]));
    }
}
export function describeError(error) {
    if (error instanceof ApiError) {
        if (error.status === 409) {
            return "state changed elsewhere; refresh and retry";
        }
        return error.detail;
    }
    return error instanceof Error ? error.message : String(error);
}
export { Client, replaceBucket, toggleSort };
