import { describe, expect, it } from "vitest";

import {
  buildChart,
  colorFor,
  formatTick,
  niceCeil,
  stepPoints,
  ticks,
} from "../src/chart.js";

describe("stepPoints", () => {
  it("turns samples into right-continuous steps", () => {
    const points = stepPoints([
      { t: 0, covered: 0 },
      { t: 40, covered: 3000 },
    ]);
    expect(points).toEqual([
      [0, 0],
      [40, 0],
      [40, 3000],
    ]);
  });

  it("keeps flat runs without duplicating corners", () => {
    const points = stepPoints([
      { t: 0, covered: 5 },
      { t: 10, covered: 5 },
      { t: 20, covered: 9 },
    ]);
    expect(points).toEqual([
      [0, 5],
      [10, 5],
      [20, 5],
      [20, 9],
    ]);
  });

  it("handles empty and single-point series", () => {
    expect(stepPoints([])).toEqual([]);
    expect(stepPoints([{ t: 3, covered: 7 }])).toEqual([[3, 7]]);
  });
});

describe("niceCeil", () => {
  it("rounds up to 1/2/5 steps", () => {
    expect(niceCeil(3)).toBe(5);
    expect(niceCeil(8)).toBe(10);
    expect(niceCeil(130)).toBe(200);
    expect(niceCeil(1000)).toBe(1000);
    expect(niceCeil(0)).toBe(1);
  });
});

describe("ticks", () => {
  it("spans zero to max inclusive", () => {
    expect(ticks(100, 4)).toEqual([0, 25, 50, 75, 100]);
  });
});

describe("buildChart", () => {
  const series = [
    { id: "a", color: "#f00", points: [{ t: 0, covered: 0 }, { t: 40, covered: 3000 }] },
  ];

  it("maps data into the inner plot area", () => {
    const geometry = buildChart(series, 800, 300);
    expect(geometry.xMax).toBeGreaterThanOrEqual(40);
    expect(geometry.yMax).toBeGreaterThanOrEqual(3000);
    for (const [x, y] of geometry.paths[0].points) {
      expect(x).toBeGreaterThanOrEqual(geometry.margin.left);
      expect(x).toBeLessThanOrEqual(800 - geometry.margin.right);
      expect(y).toBeGreaterThanOrEqual(geometry.margin.top);
      expect(y).toBeLessThanOrEqual(300 - geometry.margin.bottom);
    }
  });

  it("higher coverage sits higher on screen (smaller y)", () => {
    const geometry = buildChart(series, 800, 300);
    const points = geometry.paths[0].points;
    expect(points[points.length - 1][1]).toBeLessThan(points[0][1]);
  });

  it("step shape: exactly one more point than samples for a single rise", () => {
    const geometry = buildChart(series, 800, 300);
    expect(geometry.paths[0].points).toHaveLength(3);
  });
});

describe("formatTick", () => {
  it("abbreviates thousands", () => {
    expect(formatTick(50000)).toBe("50k");
    expect(formatTick(40)).toBe("40");
    expect(formatTick(2.5)).toBe("2.5");
  });
});

describe("colorFor", () => {
  it("cycles a fixed palette", () => {
    expect(colorFor(0)).toBe(colorFor(6));
    expect(colorFor(0)).not.toBe(colorFor(1));
  });
});
