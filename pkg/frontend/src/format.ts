// Small display helpers. No metric is ever computed here; durations arrive
// from the API in seconds and are only reformatted.

export function formatDuration(seconds: number | null): string {
  if (seconds === null) return "ongoing";
  if (seconds < 60) return `${seconds}s`;
  const minutes = Math.floor(seconds / 60);
  if (minutes < 60) return `${minutes}m`;
  const hours = Math.floor(minutes / 60);
  const rest = minutes % 60;
  if (hours < 48) return rest ? `${hours}h ${rest}m` : `${hours}h`;
  return `${Math.floor(hours / 24)}d ${hours % 24}h`;
}

export function formatTimestamp(iso: string | null): string {
  if (!iso) return "—";
  return iso.replace("T", " ").replace("Z", " UTC");
}

export function isoDaysAgo(days: number, now: Date = new Date()): string {
  const past = new Date(now.getTime() - days * 86400_000);
  return past.toISOString().replace(/\.\d{3}Z$/, "Z");
}

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  if (text !== undefined) node.textContent = text;
  return node;
}
