// Small display helpers shared by the views.

export function hashPrefix(hash: string, length = 10): string {
  return hash.slice(0, length);
}

export function fmtDuration(seconds: number): string {
  if (seconds < 60) return `${Math.round(seconds)}s`;
  const minutes = Math.floor(seconds / 60);
  const rest = Math.round(seconds % 60);
  if (minutes < 60) return rest ? `${minutes}m${rest}s` : `${minutes}m`;
  const hours = Math.floor(minutes / 60);
  return `${hours}h${minutes % 60}m`;
}

export function fmtWhen(epochSeconds: number, nowSeconds: number): string {
  const delta = Math.max(0, nowSeconds - epochSeconds);
  if (delta < 10) return "just now";
  if (delta < 120) return `${Math.round(delta)}s ago`;
  if (delta < 7200) return `${Math.round(delta / 60)}m ago`;
  return `${Math.round(delta / 3600)}h ago`;
}

export function fmtBytes(n: number): string {
  if (n < 1024) return `${n} B`;
  if (n < 1024 * 1024) return `${(n / 1024).toFixed(1)} KiB`;
  return `${(n / (1024 * 1024)).toFixed(1)} MiB`;
}

export function fmtCount(n: number): string {
  return n.toLocaleString("en-US");
}

export function decodeBase64(b64: string): string {
  try {
    const raw = atob(b64);
    const bytes = Uint8Array.from(raw, (c) => c.charCodeAt(0));
    return new TextDecoder("utf-8", { fatal: false }).decode(bytes);
  } catch {
    return "(binary input)";
  }
}

export function statusBadgeClass(status: string): string {
  switch (status) {
    case "running":
      return "badge badge-running";
    case "finished":
      return "badge badge-finished";
    case "stopped":
      return "badge badge-stopped";
    default:
      return "badge";
  }
}

export function triageBadgeClass(state: string): string {
  return `chip chip-${state}`;
}
