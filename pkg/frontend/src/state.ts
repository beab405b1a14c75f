// Poll scheduling and pure view-state transforms.

import type { BucketSummary } from "./types.js";

export interface Poller {
  start(): void;
  stop(): void;
  readonly running: boolean;
}

type Timer = {
  set(fn: () => void, ms: number): number;
  clear(id: number): void;
};

const realTimer: Timer = {
  set: (fn, ms) => setTimeout(fn, ms) as unknown as number,
  clear: (id) => clearTimeout(id),
};

// Chained setTimeout rather than setInterval: a slow poll never stacks a
// second request behind itself.
export function createPoller(
  tick: () => Promise<void> | void,
  intervalMs: number,
  timer: Timer = realTimer,
): Poller {
  let id: number | null = null;
  let active = false;

  const loop = async () => {
    if (!active) return;
    try {
      await tick();
    } finally {
      if (active) id = timer.set(loop, intervalMs);
    }
  };

  return {
    start() {
      if (active) return;
      active = true;
      void loop();
    },
    stop() {
      active = false;
      if (id !== null) timer.clear(id);
      id = null;
    },
    get running() {
      return active;
    },
  };
}

export type SortKey = "bucket_hash" | "exception" | "hit_count" | "first_seen" | "triage_state";

export interface BucketSort {
  key: SortKey;
  ascending: boolean;
}

export function toggleSort(sort: BucketSort, key: SortKey): BucketSort {
  if (sort.key === key) return { key, ascending: !sort.ascending };
  return { key, ascending: true };
}

export function sortBuckets(buckets: BucketSummary[], sort: BucketSort): BucketSummary[] {
  const factor = sort.ascending ? 1 : -1;
  return [...buckets].sort((a, b) => {
    const left = a[sort.key];
    const right = b[sort.key];
    if (typeof left === "number" && typeof right === "number") {
      return (left - right) * factor;
    }
    return String(left).localeCompare(String(right)) * factor;
  });
}

export function replaceBucket(
  buckets: BucketSummary[],
  updated: BucketSummary,
): BucketSummary[] {
  return buckets.map((b) => (b.bucket_hash === updated.bucket_hash ? updated : b));
}

export interface FormState {
  strategy: string;
  targetCmd: string;
  grammarPath: string;
  timeBudget: number;
  masterSeed: number;
}

export function validateForm(form: FormState): string[] {
  const problems: string[] = [];
  if (!form.targetCmd.includes("{input}")) {
    problems.push("target command must contain the {input} placeholder");
  }
  if (
    (form.strategy === "grammar" || form.strategy === "grammar_coverage") &&
    form.grammarPath.trim() === ""
  ) {
    problems.push("grammar strategies need a grammar file (try: minipvl)");
  }
  if (!(form.timeBudget > 0)) {
    problems.push("time budget must be positive");
  }
  if (!Number.isInteger(form.masterSeed)) {
    problems.push("master seed must be an integer");
  }
  return problems;
}
