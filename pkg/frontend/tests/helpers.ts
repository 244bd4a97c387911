// Shared test plumbing: a recording fetch stub routed by URL prefix and a
// storage fake, so every view is tested against exact request contracts.

import { ApiClient, FetchLike } from "../src/api.js";
import { StorageLike } from "../src/chat.js";

export interface Call {
  url: string;
  method: string;
  body: unknown;
}

export type Route = (call: Call) => { status?: number; body: unknown } | undefined;

export class FetchStub {
  calls: Call[] = [];

  constructor(private routes: Route[]) {}

  fetch: FetchLike = async (url, init) => {
    const call: Call = {
      url,
      method: init?.method ?? "GET",
      body: typeof init?.body === "string" ? JSON.parse(init.body) : undefined,
    };
    this.calls.push(call);
    for (const route of this.routes) {
      const hit = route(call);
      if (hit) {
        return new Response(JSON.stringify(hit.body), {
          status: hit.status ?? 200,
          headers: { "content-type": "application/json" },
        });
      }
    }
    return new Response(JSON.stringify({ code: "UNSTUBBED", message: url }), { status: 500 });
  };

  requested(fragment: string): Call[] {
    return this.calls.filter((c) => c.url.includes(fragment));
  }
}

export function makeClient(routes: Route[]): { api: ApiClient; stub: FetchStub } {
  const stub = new FetchStub(routes);
  return { api: new ApiClient("", stub.fetch), stub };
}

export function emptyIncidentsRoute(): Route {
  return (call) =>
    call.url.startsWith("/api/incidents")
      ? { body: { items: [], total: 0, page: 1, page_size: 25 } }
      : undefined;
}

export class MemoryStorage implements StorageLike {
  private data = new Map<string, string>();

  getItem(key: string): string | null {
    return this.data.get(key) ?? null;
  }

  setItem(key: string, value: string): void {
    this.data.set(key, value);
  }

  removeItem(key: string): void {
    this.data.delete(key);
  }
}

export async function flush(rounds = 4): Promise<void> {
  for (let i = 0; i < rounds; i += 1) {
    await new Promise((resolve) => setTimeout(resolve, 0));
  }
}

export const SELECTION = {
  from: "2024-03-01T00:00:00Z",
  to: "2024-04-30T00:00:00Z",
  services: ["openai/chatgpt", "openai/api"],
};
