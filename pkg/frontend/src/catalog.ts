// Static service catalog mirroring the server registry; used for the
// selector UI only. All numbers shown anywhere come from API responses.

export interface ServiceEntry {
  id: string;
  provider: string;
  label: string;
}

export const PROVIDERS: Record<string, string> = {
  openai: "OpenAI",
  anthropic: "Anthropic",
  characterai: "Character.AI",
  stabilityai: "Stability.AI",
};

export const SERVICES: ServiceEntry[] = [
  { id: "openai/chatgpt", provider: "openai", label: "ChatGPT" },
  { id: "openai/api", provider: "openai", label: "API" },
  { id: "openai/dalle", provider: "openai", label: "DALL·E" },
  { id: "openai/playground", provider: "openai", label: "Playground" },
  { id: "anthropic/claude", provider: "anthropic", label: "Claude" },
  { id: "anthropic/api", provider: "anthropic", label: "API" },
  { id: "anthropic/console", provider: "anthropic", label: "Console" },
  { id: "characterai/characterai", provider: "characterai", label: "Character.AI" },
  { id: "stabilityai/rest-api", provider: "stabilityai", label: "REST API" },
  { id: "stabilityai/grpc-api", provider: "stabilityai", label: "gRPC API" },
  { id: "stabilityai/stable-assistant", provider: "stabilityai", label: "Stable Assistant" },
];

export const PLOT_KINDS: { kind: string; label: string }[] = [
  { kind: "weekly-overview", label: "Weekly overview" },
  { kind: "hourly-overview", label: "Hourly overview" },
  { kind: "mttr-distribution", label: "MTTR distribution" },
  { kind: "mttr-by-provider", label: "MTTR by provider" },
  { kind: "mttr-boxplot", label: "MTTR boxplot" },
  { kind: "mtbf-distribution", label: "MTBF distribution" },
  { kind: "mtbf-by-provider", label: "MTBF by provider" },
  { kind: "mtbf-boxplot", label: "MTBF boxplot" },
  { kind: "resolution-activities", label: "Resolution activities" },
  { kind: "status-combinations", label: "Status combinations" },
  { kind: "daily-availability", label: "Daily availability" },
  { kind: "service-cooccurrence", label: "Service co-occurrence" },
  { kind: "cooccurrence-probability", label: "Co-occurrence probability" },
  { kind: "service-incidents", label: "Service incidents" },
  { kind: "incident-outage-timeline", label: "Incident outage timeline" },
  { kind: "autocorrelations", label: "Autocorrelations" },
  { kind: "incident-impact-distribution", label: "Impact distribution" },
];
