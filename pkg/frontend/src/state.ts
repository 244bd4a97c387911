// Dashboard-wide state: the analysis selection, active plot kinds, theme.

import { Selection, validateSelection } from "./api.js";
import { PLOT_KINDS, SERVICES } from "./catalog.js";
import { isoDaysAgo } from "./format.js";

export type Theme = "light" | "dark";

export interface DashboardState {
  selection: Selection;
  activePlots: string[];
  theme: Theme;
}

export function defaultSelection(now: Date = new Date()): Selection {
  // trailing 12 months, every service
  return {
    from: isoDaysAgo(365, now),
    to: now.toISOString().replace(/\.\d{3}Z$/, "Z"),
    services: SERVICES.map((s) => s.id),
  };
}

export function defaultState(now: Date = new Date()): DashboardState {
  return {
    selection: defaultSelection(now),
    activePlots: PLOT_KINDS.map((p) => p.kind),
    theme: "light",
  };
}

export function trySelection(sel: Selection): string | null {
  try {
    validateSelection(sel);
    return null;
  } catch (error) {
    return error instanceof Error ? error.message : String(error);
  }
}
