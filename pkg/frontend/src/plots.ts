// Plot dashboard: selection panel driving a grid of server-rendered plots,
// per-plot and bulk PNG download, per-plot and bulk LLM analysis.

import { ApiClient, ApiError, Selection } from "./api.js";
import { PLOT_KINDS, PROVIDERS, SERVICES } from "./catalog.js";
import { el } from "./format.js";
import { trySelection } from "./state.js";

const GRID_SIZE = { width: 800, height: 450 };
const DOWNLOAD_SIZE = { width: 1600, height: 900 };

interface PlotCard {
  kind: string;
  figure: HTMLElement;
  image: HTMLImageElement;
  analysis: HTMLElement;
  note: HTMLElement;
  currentUrl: string;
}

export class PlotDashboardView {
  selection: Selection;
  activeKinds: Set<string>;

  private cards = new Map<string, PlotCard>();
  private grid: HTMLElement;
  private errorBox: HTMLElement;
  private bulkPanel: HTMLElement;
  private inFlight = new Map<string, AbortController>();
  private fromInput: HTMLInputElement;
  private toInput: HTMLInputElement;
  private serviceBoxes = new Map<string, HTMLInputElement>();
  private kindBoxes = new Map<string, HTMLInputElement>();

  constructor(
    root: HTMLElement,
    private api: ApiClient,
    initial: Selection,
    private download: (url: string, filename: string) => void = defaultDownload,
  ) {
    this.selection = { ...initial, services: [...initial.services] };
    this.activeKinds = new Set(PLOT_KINDS.map((p) => p.kind));

    const panel = el("form", { class: "selector-panel" });
    panel.addEventListener("submit", (event) => {
      event.preventDefault();
      this.applySelection();
    });

    const range = el("fieldset", { class: "range" });
    range.append(el("legend", {}, "Time range"));
    this.fromInput = el("input", { type: "datetime-local", class: "from" });
    this.toInput = el("input", { type: "datetime-local", class: "to" });
    this.fromInput.value = isoToLocal(this.selection.from);
    this.toInput.value = isoToLocal(this.selection.to);
    range.append(label("From", this.fromInput), label("To", this.toInput));
    panel.append(range);

    const services = el("fieldset", { class: "services" });
    services.append(el("legend", {}, "Services"));
    for (const [providerId, providerLabel] of Object.entries(PROVIDERS)) {
      const group = el("div", { class: "service-group", "data-provider": providerId });
      const toggle = el("input", { type: "checkbox", class: "provider-toggle" });
      toggle.checked = true;
      toggle.addEventListener("change", () => {
        for (const service of SERVICES.filter((s) => s.provider === providerId)) {
          this.serviceBoxes.get(service.id)!.checked = toggle.checked;
        }
        this.applySelection();
      });
      const head = el("label", { class: "provider-label" });
      head.append(toggle, document.createTextNode(providerLabel));
      group.append(head);
      for (const service of SERVICES.filter((s) => s.provider === providerId)) {
        const box = el("input", {
          type: "checkbox",
          class: "service-toggle",
          "data-service": service.id,
        });
        box.checked = this.selection.services.includes(service.id);
        box.addEventListener("change", () => this.applySelection());
        this.serviceBoxes.set(service.id, box);
        const wrap = el("label", { class: "service-label" });
        wrap.append(box, document.createTextNode(service.label));
        group.append(wrap);
      }
      services.append(group);
    }
    panel.append(services);

    const kinds = el("fieldset", { class: "kinds" });
    kinds.append(el("legend", {}, "Plots"));
    for (const { kind, label: kindLabel } of PLOT_KINDS) {
      const box = el("input", { type: "checkbox", class: "kind-toggle", "data-kind": kind });
      box.checked = true;
      box.addEventListener("change", () => {
        if (box.checked) this.activeKinds.add(kind);
        else this.activeKinds.delete(kind);
        this.renderGrid();
      });
      this.kindBoxes.set(kind, box);
      const wrap = el("label", { class: "kind-label" });
      wrap.append(box, document.createTextNode(kindLabel));
      kinds.append(wrap);
    }
    panel.append(kinds);

    const actions = el("div", { class: "actions" });
    const apply = el("button", { type: "submit", class: "apply" }, "Apply");
    const bulkDownload = el("button", { type: "button", class: "bulk-download" }, "Download all PNG");
    bulkDownload.addEventListener("click", () => this.downloadAll());
    const analyzeAll = el("button", { type: "button", class: "analyze-all" }, "Analyze all");
    analyzeAll.addEventListener("click", () => void this.analyzeAll());
    actions.append(apply, bulkDownload, analyzeAll);
    panel.append(actions);

    this.errorBox = el("div", { class: "error", hidden: "" });
    this.bulkPanel = el("div", { class: "bulk-analysis", hidden: "" });
    this.grid = el("div", { class: "plot-grid" });
    root.append(panel, this.errorBox, this.bulkPanel, this.grid);

    this.renderGrid();
  }

  applySelection(): void {
    const services = [...this.serviceBoxes.entries()]
      .filter(([, box]) => box.checked)
      .map(([id]) => id);
    const candidate: Selection = {
      from: localToIso(this.fromInput.value) || this.selection.from,
      to: localToIso(this.toInput.value) || this.selection.to,
      services,
    };
    const problem = trySelection(candidate);
    if (problem) {
      this.showError(problem);
      return;
    }
    this.clearError();
    this.selection = candidate;
    this.renderGrid();
  }

  renderGrid(): void {
    for (const { kind } of PLOT_KINDS) {
      const wanted = this.activeKinds.has(kind);
      let card = this.cards.get(kind);
      if (!wanted) {
        if (card) {
          card.figure.remove();
          this.cards.delete(kind);
        }
        continue;
      }
      if (!card) {
        card = this.buildCard(kind);
        this.cards.set(kind, card);
      }
      if (!card.figure.isConnected) this.grid.append(card.figure);
      // request diffing: only touch the image when its query actually changed
      const url = this.api.plotUrl(kind, this.selection, "svg", GRID_SIZE);
      if (card.currentUrl !== url) {
        card.currentUrl = url;
        card.note.hidden = true;
        card.image.hidden = false;
        card.image.src = url;
      }
    }
  }

  private buildCard(kind: string): PlotCard {
    const figure = el("figure", { class: "plot-card", "data-kind": kind });
    const title = PLOT_KINDS.find((p) => p.kind === kind)?.label ?? kind;
    figure.append(el("figcaption", {}, title));

    const image = el("img", { class: "plot-image", alt: title });
    const note = el("div", { class: "plot-note", hidden: "" });
    image.addEventListener("error", () => {
      // the common 4xx here is an empty selection for this kind
      note.textContent = `not enough data for ${kind} in this selection`;
      note.hidden = false;
      image.hidden = true;
    });

    const buttons = el("div", { class: "plot-buttons" });
    const downloadButton = el("button", { type: "button", class: "download" }, "Download PNG");
    downloadButton.addEventListener("click", () => this.downloadOne(kind));
    const analyzeButton = el("button", { type: "button", class: "analyze" }, "Analyze");
    const analysis = el("div", { class: "analysis", hidden: "" });
    analyzeButton.addEventListener("click", () => void this.analyzeOne(kind, analysis));
    buttons.append(downloadButton, analyzeButton);

    figure.append(image, note, buttons, analysis);
    return { kind, figure, image, analysis, note, currentUrl: "" };
  }

  downloadOne(kind: string): void {
    const url = this.api.plotUrl(kind, this.selection, "png", DOWNLOAD_SIZE);
    this.download(url, `${kind}.png`);
  }

  downloadAll(): void {
    for (const kind of this.cards.keys()) this.downloadOne(kind);
  }

  async analyzeOne(kind: string, panel: HTMLElement): Promise<void> {
    this.inFlight.get(kind)?.abort();
    const controller = new AbortController();
    this.inFlight.set(kind, controller);
    panel.hidden = false;
    panel.textContent = "analyzing…";
    try {
      const { analysis } = await this.api.analyze(kind, this.selection, controller.signal);
      panel.textContent = analysis;
    } catch (error) {
      if (controller.signal.aborted) return;
      panel.textContent = describeError(error, kind);
    } finally {
      this.inFlight.delete(kind);
    }
  }

  async analyzeAll(): Promise<void> {
    this.bulkPanel.hidden = false;
    this.bulkPanel.textContent = "analyzing all plots…";
    try {
      const { analysis } = await this.api.analyzeAll(this.selection);
      this.bulkPanel.textContent = analysis;
    } catch (error) {
      this.bulkPanel.textContent = describeError(error, "any plot");
    }
  }

  private showError(message: string): void {
    this.errorBox.textContent = message;
    this.errorBox.hidden = false;
  }

  private clearError(): void {
    this.errorBox.hidden = true;
    this.errorBox.textContent = "";
  }
}

function describeError(error: unknown, kind: string): string {
  if (error instanceof ApiError && error.code === "INSUFFICIENT_DATA") {
    return `not enough data for ${kind} in this selection`;
  }
  if (error instanceof ApiError) return `${error.code}: ${error.message}`;
  return `UNEXPECTED: ${String(error)}`;
}

function label(text: string, input: HTMLElement): HTMLElement {
  const wrap = el("label", {}, text + " ");
  wrap.append(input);
  return wrap;
}

function isoToLocal(iso: string): string {
  return iso.replace("Z", "").slice(0, 16);
}

function localToIso(value: string): string {
  if (!value) return "";
  return value.length === 16 ? `${value}:00Z` : `${value}Z`;
}

function defaultDownload(url: string, filename: string): void {
  const anchor = document.createElement("a");
  anchor.href = url;
  anchor.download = filename;
  document.body.append(anchor);
  anchor.click();
  anchor.remove();
}
