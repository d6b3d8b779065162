/** Display helpers: money, confidence bands, materiality, HTML escaping. */

import type { ExceptionView } from "./types.js";
import { MATERIALITY_SENTINEL } from "./types.js";

export function formatCents(cents: number): string {
  const sign = cents < 0 ? "-" : "";
  const abs = Math.abs(cents);
  const dollars = Math.floor(abs / 100).toLocaleString("en-US");
  const rem = String(abs % 100).padStart(2, "0");
  return `${sign}$${dollars}.${rem}`;
}

export type ConfidenceBand = "low" | "medium" | "high";

/** low < 0.5 <= medium < 0.8 <= high */
export function confidenceBand(confidence: number): ConfidenceBand {
  if (confidence < 0.5) return "low";
  if (confidence < 0.8) return "medium";
  return "high";
}

export function formatConfidence(confidence: number): string {
  return `${confidence.toFixed(3)} (${confidenceBand(confidence)})`;
}

export function formatValue(exc: ExceptionView, value: number | string | null): string {
  if (value === null) return "—";
  if (typeof value === "number") return formatCents(value);
  return value; // dates arrive as YYYY-MM-DD strings
}

/** Materiality magnitude: cents for amounts, days for dates, sentinel for
 * missing/unparsable values (which outrank every real delta). */
export function formatMateriality(exc: ExceptionView): string {
  if (exc.materiality >= MATERIALITY_SENTINEL) return "missing value";
  if (exc.field_kind === "due_date") {
    return `${exc.materiality} day${exc.materiality === 1 ? "" : "s"}`;
  }
  return formatCents(exc.materiality);
}

export function fieldLabel(kind: string): string {
  switch (kind) {
    case "minimum_payment":
      return "Minimum Payment";
    case "due_date":
      return "Due Date";
    case "statement_balance":
      return "Statement Balance";
    default:
      return kind;
  }
}

export function statusLabel(status: string): string {
  return status.replace("_", " ");
}

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;")
    .replaceAll("'", "&#39;");
}
