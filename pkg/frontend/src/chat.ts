// Dataset chatbot pane: summary header, scrollable history, session
// persistence across reloads via localStorage.

import { ApiClient, ApiError } from "./api.js";
import { el } from "./format.js";

const STORAGE_KEY = "fails.chat";

interface StoredChat {
  session_id: string;
  history: { role: "user" | "assistant"; text: string }[];
}

export interface StorageLike {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

export class ChatView {
  sessionId: string | null = null;
  private history: StoredChat["history"] = [];

  private header: HTMLElement;
  private log: HTMLElement;
  private input: HTMLInputElement;
  readonly sendButton: HTMLButtonElement;

  constructor(
    root: HTMLElement,
    private api: ApiClient,
    private storage: StorageLike = window.localStorage,
  ) {
    this.header = el("div", { class: "chat-summary" }, "…");
    this.log = el("div", { class: "chat-log" });

    const composer = el("form", { class: "composer" });
    this.input = el("input", { type: "text", class: "chat-input", placeholder: "Ask about the dataset…" });
    this.sendButton = el("button", { type: "submit", class: "chat-send" }, "Send");
    composer.append(this.input, this.sendButton);
    composer.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.send(this.input.value);
    });

    root.append(this.header, this.log, composer);
    this.restore();
    void this.loadSummary();
  }

  private restore(): void {
    const raw = this.storage.getItem(STORAGE_KEY);
    if (!raw) return;
    try {
      const stored = JSON.parse(raw) as StoredChat;
      this.sessionId = stored.session_id;
      this.history = stored.history ?? [];
      for (const turn of this.history) this.bubble(turn.role, turn.text);
    } catch {
      this.storage.removeItem(STORAGE_KEY);
    }
  }

  private persist(): void {
    if (this.sessionId === null) return;
    this.storage.setItem(
      STORAGE_KEY,
      JSON.stringify({ session_id: this.sessionId, history: this.history } satisfies StoredChat),
    );
  }

  async loadSummary(): Promise<void> {
    try {
      const rows = await this.api.summary();
      const total = rows.reduce((acc, row) => acc + row.reports, 0);
      this.header.textContent = rows.length
        ? `${total} incidents across ${rows.length} providers (${rows
            .map((r) => `${r.provider}: ${r.reports}`)
            .join(", ")})`
        : "dataset is empty — run a scrape first";
    } catch (error) {
      this.header.textContent = describe(error);
    }
  }

  async send(message: string): Promise<void> {
    const text = message.trim();
    if (!text) return;
    this.input.value = "";
    this.bubble("user", text);
    this.sendButton.disabled = true;
    try {
      const response = await this.api.chat(text, this.sessionId ?? undefined);
      this.sessionId = response.session_id;
      this.bubble("assistant", response.reply);
      // only confirmed exchanges persist; a failed turn never rewrites history
      this.history.push({ role: "user", text }, { role: "assistant", text: response.reply });
      this.persist();
    } catch (error) {
      this.bubble("system", describe(error));
    } finally {
      this.sendButton.disabled = false;
    }
  }

  private bubble(role: "user" | "assistant" | "system", text: string): void {
    const node = el("div", { class: `bubble ${role}` }, text);
    this.log.append(node);
    this.log.scrollTop = this.log.scrollHeight;
  }
}

function describe(error: unknown): string {
  if (error instanceof ApiError) return `${error.code}: ${error.message}`;
  return `UNEXPECTED: ${String(error)}`;
}
