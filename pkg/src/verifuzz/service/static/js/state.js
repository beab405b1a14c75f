// Poll scheduling and pure view-state transforms.
const realTimer = {
    set: (fn, ms) => setTimeout(fn, ms),
    clear: (id) => clearTimeout(id),
};
// Chained setTimeout rather than setInterval: a slow poll never stacks a
// second request behind itself.
export function createPoller(tick, intervalMs, timer = realTimer) {
    let id = null;
    let active = false;
    const loop = async () => {
        if (!active)
            return;
        try {
            await tick();
        }
        finally {
            if (active)
                id = timer.set(loop, intervalMs);
        }
    };
    return {
        start() {
            if (active)
                return;
            active = true;
            void loop();
        },
        stop() {
            active = false;
            if (id !== null)
                timer.clear(id);
            id = null;
        },
        get running() {
            return active;
        },
    };
}
export function toggleSort(sort, key) {
    if (sort.key === key)
        return { key, ascending: !sort.ascending };
    return { key, ascending: true };
}
export function sortBuckets(buckets, sort) {
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
export function replaceBucket(buckets, updated) {
    return buckets.map((b) => (b.bucket_hash === updated.bucket_hash ? updated : b));
}
export function validateForm(form) {
    const problems = [];
    if (!form.targetCmd.includes("{input}")) {
        problems.push("target command must contain the {input} placeholder");
    }
    if ((form.strategy === "grammar" || form.strategy === "grammar_coverage") &&
        form.grammarPath.trim() === "") {
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
