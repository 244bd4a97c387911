import { beforeEach, describe, expect, it } from "vitest";

import { IncidentTableView } from "../src/table.js";
import { Call, Route, emptyIncidentsRoute, flush, makeClient } from "./helpers.js";

const ROW = {
  incident_id: "abc",
  provider: "openai",
  services: ["openai/chatgpt"],
  title: "Elevated error rates",
  impact_level: "major",
  impact_color: "#e67e22",
  severity_score: 4,
  start: "2024-03-04T08:10:00Z",
  end: "2024-03-04T10:05:00Z",
  duration_seconds: 6900,
  status: "resolved",
  source_url: null,
};

function incidentsRoute(): Route {
  return (call) =>
    call.url.startsWith("/api/incidents")
      ? { body: { items: [ROW], total: 1, page: 1, page_size: 25 } }
      : undefined;
}

function mount(routes: Route[], options = {}) {
  const root = document.createElement("div");
  document.body.replaceChildren(root);
  const { api, stub } = makeClient(routes);
  const view = new IncidentTableView(root, api, { autoRefreshMs: 0, ...options });
  return { root, view, stub };
}

beforeEach(() => {
  document.body.replaceChildren();
});

describe("column sorting", () => {
  it("clicking the duration header sends sort=duration", async () => {
    const { root, stub } = mount([incidentsRoute()]);
    const header = [...root.querySelectorAll("th")].find((th) => th.textContent === "Duration")!;
    header.click();
    await flush();
    const urls = stub.requested("/api/incidents").map((c) => new URL(c.url, "http://x"));
    expect(urls.at(-1)!.searchParams.get("sort")).toBe("duration");
    expect(urls.at(-1)!.searchParams.get("order")).toBe("asc");
  });

  it("clicking the same header twice toggles the order", async () => {
    const { root, stub } = mount([incidentsRoute()]);
    const header = [...root.querySelectorAll("th")].find((th) => th.textContent === "Duration")!;
    header.click();
    await flush();
    header.click();
    await flush();
    const last = new URL(stub.requested("/api/incidents").at(-1)!.url, "http://x");
    expect(last.searchParams.get("sort")).toBe("duration");
    expect(last.searchParams.get("order")).toBe("desc");
  });

  it("unsortable columns issue no request", async () => {
    const { root, stub } = mount([incidentsRoute()]);
    const header = [...root.querySelectorAll("th")].find((th) => th.textContent === "Services")!;
    header.click();
    await flush();
    expect(stub.requested("/api/incidents")).toHaveLength(0);
  });
});

describe("rows", () => {
  it("renders the impact chip with the reported color", async () => {
    const { root, view } = mount([incidentsRoute()]);
    await view.refresh();
    const chip = root.querySelector<HTMLElement>(".impact-chip")!;
    expect(chip.textContent).toBe("major");
    expect(chip.style.backgroundColor).toBe("rgb(230, 126, 34)"); // #e67e22
  });

  it("renders API errors inline with code and message", async () => {
    const { root, view } = mount([
      (call: Call) =>
        call.url.startsWith("/api/incidents")
          ? { status: 400, body: { code: "BAD_QUERY", message: "bad page" } }
          : undefined,
    ]);
    await view.refresh();
    const error = root.querySelector<HTMLElement>(".error")!;
    expect(error.hidden).toBe(false);
    expect(error.textContent).toBe("BAD_QUERY: bad page");
  });
});

describe("scrape button", () => {
  function scrapeRoutes(states: string[]): Route[] {
    let call_index = 0;
    return [
      (call) =>
        call.url === "/api/scrape" && call.method === "POST"
          ? { body: { job_id: "j1" } }
          : undefined,
      (call) => {
        if (!call.url.startsWith("/api/scrape/")) return undefined;
        const state = states[Math.min(call_index, states.length - 1)];
        call_index += 1;
        return {
          body: {
            job_id: "j1",
            state,
            error: state === "failed" ? "boom" : null,
            merge_report: state === "succeeded" ? { added: 2, replaced: 0, unchanged: 29 } : null,
          },
        };
      },
      emptyIncidentsRoute(),
    ];
  }

  it("disables the button while the job is running and re-enables after", async () => {
    const seen: boolean[] = [];
    const routes = scrapeRoutes(["running", "running", "succeeded"]);
    const root = document.createElement("div");
    document.body.replaceChildren(root);
    const { api, stub } = makeClient(routes);
    const view = new IncidentTableView(root, api, {
      autoRefreshMs: 0,
      pollDelay: async () => {
        seen.push(view.scrapeButton.disabled);
      },
    });

    await view.runScrape();
    expect(seen.length).toBeGreaterThan(0);
    expect(seen.every(Boolean)).toBe(true); // disabled during every poll round
    expect(view.scrapeButton.disabled).toBe(false);
    // finishing a scrape refreshes the table
    expect(stub.requested("/api/incidents").length).toBeGreaterThan(0);
  });

  it("never issues a second POST while a job is in flight", async () => {
    const routes = scrapeRoutes(["running", "succeeded"]);
    const root = document.createElement("div");
    document.body.replaceChildren(root);
    const { api, stub } = makeClient(routes);
    let clicked_during_poll = false;
    const view = new IncidentTableView(root, api, {
      autoRefreshMs: 0,
      pollDelay: async () => {
        if (!clicked_during_poll) {
          clicked_during_poll = true;
          view.scrapeButton.click(); // disabled button: no handler fires
          void view.runScrape(); // direct call is guarded too
        }
      },
    });
    await view.runScrape();
    await flush();
    const posts = stub.calls.filter((c) => c.url === "/api/scrape" && c.method === "POST");
    expect(posts).toHaveLength(1);
  });

  it("reports a failed job inline", async () => {
    const routes = scrapeRoutes(["failed"]);
    const root = document.createElement("div");
    document.body.replaceChildren(root);
    const { api } = makeClient(routes);
    const view = new IncidentTableView(root, api, { autoRefreshMs: 0, pollDelay: flush });
    await view.runScrape();
    expect(root.querySelector<HTMLElement>(".error")!.textContent).toContain("SCRAPE_FAILED");
    expect(view.scrapeButton.disabled).toBe(false);
  });
});
