/** Small pure helpers for optimistic disposition updates.
 *
 * The queue applies a status change locally before the POST resolves; on a
 * 409 (or any failure) the revert snapshot restores the previous row exactly.
 */

import type { ExceptionStatus, ExceptionView } from "./types.js";

export interface OptimisticUpdate {
  items: ExceptionView[];
  revert: ExceptionView | null;
}

export function applyStatus(
  items: ExceptionView[],
  exceptionId: string,
  newStatus: ExceptionStatus,
  note: string,
): OptimisticUpdate {
  const index = items.findIndex((e) => e.exception_id === exceptionId);
  if (index < 0) return { items, revert: null };
  const previous = items[index]!;
  const updated: ExceptionView = { ...previous, status: newStatus, disposition_note: note };
  const next = [...items];
  next[index] = updated;
  return { items: next, revert: previous };
}

export function revertStatus(items: ExceptionView[], revert: ExceptionView): ExceptionView[] {
  return items.map((e) => (e.exception_id === revert.exception_id ? revert : e));
}

/** Legal next dispositions for a row; mirrors the service state machine. */
export function allowedTransitions(status: ExceptionStatus): ExceptionStatus[] {
  switch (status) {
    case "open":
      return ["confirmed", "false_positive"];
    case "confirmed":
      return ["remediated"];
    default:
      return [];
  }
}

export function openCount(items: ExceptionView[]): number {
  return items.filter((e) => e.status === "open").length;
}
