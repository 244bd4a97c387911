// Bootstrap: sidebar navigation between the table, plots, chat and about
// pages, plus theme switching. API base comes from the API_BASE_URL global
// (set in index.html) or same-origin by default.

import { ApiClient } from "./api.js";
import { ChatView } from "./chat.js";
import { el } from "./format.js";
import { PlotDashboardView } from "./plots.js";
import { defaultState } from "./state.js";
import { IncidentTableView } from "./table.js";

declare global {
  interface Window {
    API_BASE_URL?: string;
  }
}

const PAGES = [
  { id: "table", label: "Incidents" },
  { id: "plots", label: "Dashboard" },
  { id: "chat", label: "Chatbot" },
  { id: "about", label: "About" },
];

export function mountApp(root: HTMLElement): void {
  const api = new ApiClient(window.API_BASE_URL ?? "");
  const state = defaultState();

  const stored = window.localStorage.getItem("fails.theme");
  if (stored === "dark" || stored === "light") state.theme = stored;
  document.documentElement.dataset.theme = state.theme;

  const sidebar = el("nav", { class: "sidebar" });
  const main = el("main", { class: "content" });
  root.append(sidebar, main);

  const pages = new Map<string, HTMLElement>();
  for (const { id, label } of PAGES) {
    const section = el("section", { class: `page page-${id}`, hidden: "" });
    pages.set(id, section);
    main.append(section);
    const link = el("button", { class: "nav-link", "data-page": id }, label);
    link.addEventListener("click", () => show(id));
    sidebar.append(link);
  }

  const themeButton = el("button", { class: "theme-toggle" }, "Theme");
  themeButton.addEventListener("click", () => {
    state.theme = state.theme === "light" ? "dark" : "light";
    document.documentElement.dataset.theme = state.theme;
    window.localStorage.setItem("fails.theme", state.theme);
  });
  sidebar.append(themeButton);

  const table = new IncidentTableView(pages.get("table")!, api);
  new PlotDashboardView(pages.get("plots")!, api, state.selection);
  new ChatView(pages.get("chat")!, api);

  const about = pages.get("about")!;
  about.append(
    el("h2", {}, "About"),
    el(
      "p",
      {},
      "Reliability analytics over self-disclosed incident reports from LLM-service " +
        "status pages: MTBF and MTTR distributions, co-occurrence of failures, " +
        "availability, temporal patterns, and an LLM-assisted interpretation layer.",
    ),
    el("p", {}, "See the repository README for the API, CLI and data format."),
  );

  function show(id: string): void {
    for (const [pageId, section] of pages) section.hidden = pageId !== id;
  }

  show("table");
  table.start();
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  mountApp(document.getElementById("app")!);
}
