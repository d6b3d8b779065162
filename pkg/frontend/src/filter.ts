/** Triage filter state and its one-to-one mapping onto the exception query.
 *
 * The same string that drives GET /api/exceptions also lives in the URL hash,
 * so any filtered view is shareable and reload-stable.
 */

import type { ExceptionStatus, FieldKind } from "./types.js";
import { FIELD_KINDS, STATUSES } from "./types.js";

export type SortKey = "materiality" | "confidence" | "created_at" | "doc_id";
export type SortOrder = "asc" | "desc";

export interface TriageFilterState {
  statuses: ExceptionStatus[];
  fields: FieldKind[];
  minMateriality: number | null;
  minConfidence: number | null;
  maxConfidence: number | null;
  sort: SortKey;
  order: SortOrder;
  page: number;
  pageSize: number;
}

export const DEFAULT_FILTER: TriageFilterState = {
  statuses: [],
  fields: [],
  minMateriality: null,
  minConfidence: null,
  maxConfidence: null,
  sort: "materiality",
  order: "desc",
  page: 1,
  pageSize: 50,
};

const SORT_KEYS: SortKey[] = ["materiality", "confidence", "created_at", "doc_id"];

function canonical(filter: TriageFilterState): TriageFilterState {
  return {
    ...filter,
    statuses: [...filter.statuses].sort(),
    fields: [...filter.fields].sort(),
  };
}

/** Serialize to the exact query-string consumed by GET /api/exceptions. */
export function toQuery(filter: TriageFilterState): string {
  const f = canonical(filter);
  const params = new URLSearchParams();
  if (f.statuses.length) params.set("status", f.statuses.join(","));
  if (f.fields.length) params.set("field", f.fields.join(","));
  if (f.minMateriality !== null) params.set("min_materiality", String(f.minMateriality));
  if (f.minConfidence !== null) params.set("min_confidence", String(f.minConfidence));
  if (f.maxConfidence !== null) params.set("max_confidence", String(f.maxConfidence));
  if (f.sort !== DEFAULT_FILTER.sort) params.set("sort", f.sort);
  if (f.order !== DEFAULT_FILTER.order) params.set("order", f.order);
  if (f.page !== 1) params.set("page", String(f.page));
  if (f.pageSize !== DEFAULT_FILTER.pageSize) params.set("page_size", String(f.pageSize));
  return params.toString();
}

/** Parse back from a query string; unknown values fall back to defaults. */
export function fromQuery(query: string): TriageFilterState {
  const params = new URLSearchParams(query);
  const intOrNull = (name: string): number | null => {
    const raw = params.get(name);
    if (raw === null || raw === "") return null;
    const value = Number(raw);
    return Number.isFinite(value) ? value : null;
  };
  const statuses = (params.get("status") ?? "")
    .split(",")
    .filter((s): s is ExceptionStatus => (STATUSES as string[]).includes(s));
  const fields = (params.get("field") ?? "")
    .split(",")
    .filter((s): s is FieldKind => (FIELD_KINDS as string[]).includes(s));
  const sortRaw = params.get("sort") ?? DEFAULT_FILTER.sort;
  const sort = (SORT_KEYS as string[]).includes(sortRaw) ? (sortRaw as SortKey) : DEFAULT_FILTER.sort;
  const order = params.get("order") === "asc" ? "asc" : DEFAULT_FILTER.order;
  return canonical({
    statuses,
    fields,
    minMateriality: intOrNull("min_materiality"),
    minConfidence: intOrNull("min_confidence"),
    maxConfidence: intOrNull("max_confidence"),
    sort,
    order,
    page: intOrNull("page") ?? 1,
    pageSize: intOrNull("page_size") ?? DEFAULT_FILTER.pageSize,
  });
}

export function withPage(filter: TriageFilterState, page: number): TriageFilterState {
  return { ...filter, page };
}
