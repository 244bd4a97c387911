// Typed client for the incident analytics HTTP API. Every request the
// dashboard makes goes through here, so parameters are validated once.

export interface Selection {
  from: string; // ISO-8601 Z
  to: string;
  services: string[];
}

export interface IncidentRow {
  incident_id: string;
  provider: string;
  services: string[];
  title: string;
  impact_level: string;
  impact_color: string;
  severity_score: number;
  start: string;
  end: string | null;
  duration_seconds: number | null;
  status: string;
  source_url: string | null;
}

export interface IncidentPage {
  items: IncidentRow[];
  total: number;
  page: number;
  page_size: number;
}

export interface IncidentQuery {
  provider?: string;
  service?: string;
  from?: string;
  to?: string;
  sort?: string;
  order?: "asc" | "desc";
  page?: number;
  page_size?: number;
}

export interface ScrapeJobStatus {
  job_id: string;
  state: "pending" | "running" | "succeeded" | "failed";
  error: string | null;
  merge_report: { added: number; replaced: number; unchanged: number } | null;
}

export interface SummaryRow {
  provider: string;
  first_date: string;
  last_date: string;
  reports: number;
  maintenance_reports: number;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export function validateSelection(sel: Selection): void {
  if (!sel.from || !sel.to || sel.from >= sel.to) {
    throw new ApiError(0, "BAD_SELECTION", "'from' must precede 'to'");
  }
  if (!sel.services.length) {
    throw new ApiError(0, "BAD_SELECTION", "select at least one service");
  }
}

function selectionParams(sel: Selection): URLSearchParams {
  validateSelection(sel);
  return new URLSearchParams({
    from: sel.from,
    to: sel.to,
    services: sel.services.join(","),
  });
}

async function parseError(response: Response): Promise<ApiError> {
  try {
    const body = await response.json();
    return new ApiError(response.status, body.code ?? "UNKNOWN", body.message ?? response.statusText);
  } catch {
    return new ApiError(response.status, "UNKNOWN", response.statusText);
  }
}

export class ApiClient {
  constructor(
    private baseUrl: string = "",
    private fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async getJson<T>(path: string, signal?: AbortSignal): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, { signal });
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as T;
  }

  private async postJson<T>(path: string, body?: unknown, signal?: AbortSignal): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, {
      method: "POST",
      headers: body === undefined ? undefined : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
      signal,
    });
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as T;
  }

  listIncidents(query: IncidentQuery): Promise<IncidentPage> {
    const params = new URLSearchParams();
    for (const [key, value] of Object.entries(query)) {
      if (value !== undefined && value !== "") params.set(key, String(value));
    }
    return this.getJson(`/api/incidents?${params}`);
  }

  startScrape(): Promise<{ job_id: string }> {
    return this.postJson("/api/scrape");
  }

  scrapeStatus(jobId: string): Promise<ScrapeJobStatus> {
    return this.getJson(`/api/scrape/${encodeURIComponent(jobId)}`);
  }

  plotUrl(kind: string, sel: Selection, format: "svg" | "png", size?: { width: number; height: number }): string {
    const params = selectionParams(sel);
    params.set("format", format);
    if (size) {
      params.set("width", String(size.width));
      params.set("height", String(size.height));
    }
    return `${this.baseUrl}/api/plots/${kind}?${params}`;
  }

  analyze(kind: string, sel: Selection, signal?: AbortSignal): Promise<{ analysis: string }> {
    return this.postJson(`/api/analyze/${kind}?${selectionParams(sel)}`, undefined, signal);
  }

  analyzeAll(sel: Selection, signal?: AbortSignal): Promise<{ analysis: string; kinds: string[] }> {
    return this.postJson(`/api/analyze-all?${selectionParams(sel)}`, undefined, signal);
  }

  chat(message: string, sessionId?: string): Promise<{ session_id: string; reply: string }> {
    const body: Record<string, string> = { message };
    if (sessionId) body.session_id = sessionId;
    return this.postJson("/api/chat", body);
  }

  summary(): Promise<SummaryRow[]> {
    return this.getJson("/api/summary");
  }
}
