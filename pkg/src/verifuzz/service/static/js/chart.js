// Step-line chart geometry, kept free of DOM so it is unit-testable.
// Coverage curves are right-continuous steps: a counter stays covered once
// hit, so between samples the y value holds.
export const DEFAULT_MARGIN = { top: 12, right: 16, bottom: 28, left: 56 };
export function niceCeil(value) {
    if (value <= 0)
        return 1;
    const magnitude = Math.pow(10, Math.floor(Math.log10(value)));
    const normalized = value / magnitude;
    let nice;
    if (normalized <= 1)
        nice = 1;
    else if (normalized <= 2)
        nice = 2;
    else if (normalized <= 5)
        nice = 5;
    else
        nice = 10;
    return nice * magnitude;
}
export function ticks(max, count) {
    if (max <= 0 || count < 1)
        return [0];
    const out = [];
    for (let i = 0; i <= count; i++) {
        out.push((max * i) / count);
    }
    return out;
}
export function stepPoints(points) {
    // Insert the horizontal run before each rise: (t2, c1) precedes (t2, c2).
    const out = [];
    for (let i = 0; i < points.length; i++) {
        const p = points[i];
        if (i > 0 && points[i - 1].covered !== p.covered) {
            out.push([p.t, points[i - 1].covered]);
        }
        out.push([p.t, p.covered]);
    }
    return out;
}
export function buildChart(seriesList, width, height, margin = DEFAULT_MARGIN) {
    const xMax = niceCeil(Math.max(1, ...seriesList.flatMap((s) => s.points.map((p) => p.t))));
    const yMax = niceCeil(Math.max(1, ...seriesList.flatMap((s) => s.points.map((p) => p.covered))));
    const innerW = width - margin.left - margin.right;
    const innerH = height - margin.top - margin.bottom;
    const sx = (t) => margin.left + (t / xMax) * innerW;
    const sy = (c) => margin.top + innerH - (c / yMax) * innerH;
    const paths = seriesList.map((s) => ({
        id: s.id,
        color: s.color,
        points: stepPoints(s.points).map(([t, c]) => [sx(t), sy(c)]),
    }));
    return {
        width,
        height,
        margin,
        xMax,
        yMax,
        xTicks: ticks(xMax, 6).map((v) => ({ pos: sx(v), label: formatTick(v) })),
        yTicks: ticks(yMax, 4).map((v) => ({ pos: sy(v), label: formatTick(v) })),
        paths,
    };
}
export function formatTick(value) {
    if (value >= 10000)
        return `${Math.round(value / 1000)}k`;
    if (Number.isInteger(value))
        return String(value);
    return value.toFixed(1);
}
const PALETTE = ["#2563eb", "#dc2626", "#059669", "#d97706", "#7c3aed", "#0891b2"];
export function colorFor(index) {
    return PALETTE[index % PALETTE.length];
}
