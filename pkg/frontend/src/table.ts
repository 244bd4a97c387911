// Incident data table: server-side sorting and paging, impact color chips,
// scrape trigger with job polling, periodic auto-refresh.

import { ApiClient, ApiError, IncidentRow } from "./api.js";
import { el, formatDuration, formatTimestamp } from "./format.js";

const COLUMNS: { key: string; label: string; sort?: string }[] = [
  { key: "provider", label: "Provider", sort: "provider" },
  { key: "services", label: "Services" },
  { key: "title", label: "Title" },
  { key: "impact", label: "Impact", sort: "impact" },
  { key: "start", label: "Start", sort: "start" },
  { key: "end", label: "End", sort: "end" },
  { key: "duration", label: "Duration", sort: "duration" },
  { key: "status", label: "Status" },
];

export interface TableOptions {
  pageSize?: number;
  autoRefreshMs?: number; // 0 disables the timer
  pollDelay?: () => Promise<void>;
}

const defaultPollDelay = () => new Promise<void>((resolve) => setTimeout(resolve, 1000));

export class IncidentTableView {
  sort = "start";
  order: "asc" | "desc" = "desc";
  page = 1;
  total = 0;

  private pageSize: number;
  private pollDelay: () => Promise<void>;
  private autoRefreshMs: number;
  private timer: ReturnType<typeof setInterval> | null = null;
  private polling = false;

  readonly scrapeButton: HTMLButtonElement;
  private status: HTMLElement;
  private errorBox: HTMLElement;
  private body: HTMLTableSectionElement;
  private pageInfo: HTMLElement;

  constructor(
    root: HTMLElement,
    private api: ApiClient,
    options: TableOptions = {},
  ) {
    this.pageSize = options.pageSize ?? 25;
    this.autoRefreshMs = options.autoRefreshMs ?? 60_000;
    this.pollDelay = options.pollDelay ?? defaultPollDelay;

    const bar = el("div", { class: "table-bar" });
    this.scrapeButton = el("button", { class: "scrape-button" }, "Scrape now");
    this.scrapeButton.addEventListener("click", () => void this.runScrape());
    this.status = el("span", { class: "scrape-status" });
    bar.append(this.scrapeButton, this.status);

    this.errorBox = el("div", { class: "error", hidden: "" });

    const table = el("table", { class: "incidents" });
    const head = el("thead");
    const headRow = el("tr");
    for (const column of COLUMNS) {
      const th = el("th", { "data-key": column.key }, column.label);
      if (column.sort) {
        th.classList.add("sortable");
        th.addEventListener("click", () => void this.sortBy(column.sort!));
      }
      headRow.append(th);
    }
    head.append(headRow);
    this.body = el("tbody");
    table.append(head, this.body);

    const pager = el("div", { class: "pager" });
    const prev = el("button", { class: "page-prev" }, "Prev");
    const next = el("button", { class: "page-next" }, "Next");
    this.pageInfo = el("span", { class: "page-info" });
    prev.addEventListener("click", () => void this.turnPage(-1));
    next.addEventListener("click", () => void this.turnPage(1));
    pager.append(prev, this.pageInfo, next);

    root.append(bar, this.errorBox, table, pager);
  }

  start(): void {
    void this.refresh();
    if (this.autoRefreshMs > 0 && this.timer === null) {
      this.timer = setInterval(() => void this.refresh(), this.autoRefreshMs);
    }
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  async sortBy(key: string): Promise<void> {
    if (this.sort === key) {
      this.order = this.order === "asc" ? "desc" : "asc";
    } else {
      this.sort = key;
      this.order = "asc";
    }
    this.page = 1;
    await this.refresh();
  }

  async turnPage(step: number): Promise<void> {
    const lastPage = Math.max(1, Math.ceil(this.total / this.pageSize));
    const target = Math.min(lastPage, Math.max(1, this.page + step));
    if (target !== this.page) {
      this.page = target;
      await this.refresh();
    }
  }

  async refresh(): Promise<void> {
    try {
      const data = await this.api.listIncidents({
        sort: this.sort,
        order: this.order,
        page: this.page,
        page_size: this.pageSize,
      });
      this.total = data.total;
      this.renderRows(data.items);
      this.pageInfo.textContent = `page ${data.page} · ${data.total} incidents`;
      this.clearError();
    } catch (error) {
      this.showError(error);
    }
  }

  async runScrape(): Promise<void> {
    if (this.polling) return; // at most one poll loop, button is belt-and-braces
    this.polling = true;
    this.scrapeButton.disabled = true;
    this.status.textContent = "scraping…";
    try {
      const { job_id } = await this.api.startScrape();
      for (;;) {
        const job = await this.api.scrapeStatus(job_id);
        if (job.state === "succeeded") {
          const added = job.merge_report?.added ?? 0;
          this.status.textContent = `scrape finished (+${added})`;
          await this.refresh();
          break;
        }
        if (job.state === "failed") {
          this.status.textContent = "scrape failed";
          this.showError(new ApiError(500, "SCRAPE_FAILED", job.error ?? "unknown"));
          break;
        }
        await this.pollDelay();
      }
    } catch (error) {
      this.status.textContent = "";
      this.showError(error);
    } finally {
      this.scrapeButton.disabled = false;
      this.polling = false;
    }
  }

  private renderRows(rows: IncidentRow[]): void {
    this.body.replaceChildren();
    for (const row of rows) {
      const tr = el("tr");
      tr.append(el("td", {}, row.provider));
      tr.append(el("td", { class: "services" }, row.services.join(", ")));
      tr.append(el("td", { class: "title" }, row.title));

      const impact = el("td", { class: "impact" });
      const chip = el("span", { class: "impact-chip" }, row.impact_level);
      chip.style.backgroundColor = row.impact_color;
      impact.append(chip);
      tr.append(impact);

      tr.append(el("td", {}, formatTimestamp(row.start)));
      tr.append(el("td", {}, formatTimestamp(row.end)));
      tr.append(el("td", {}, formatDuration(row.duration_seconds)));
      tr.append(el("td", { class: "status" }, row.status));
      this.body.append(tr);
    }
  }

  private showError(error: unknown): void {
    const text =
      error instanceof ApiError
        ? `${error.code}: ${error.message}`
        : `UNEXPECTED: ${String(error)}`;
    this.errorBox.textContent = text;
    this.errorBox.hidden = false;
  }

  private clearError(): void {
    this.errorBox.hidden = true;
    this.errorBox.textContent = "";
  }
}
