/** Pure view renderers: (API responses, filter state) -> HTML strings.
 *
 * No DOM access here; main.ts injects the strings and wires events through
 * data-* attributes. Everything interpolated is escaped.
 */

import type { TriageFilterState } from "./filter.js";
import {
  confidenceBand,
  escapeHtml,
  fieldLabel,
  formatCents,
  formatConfidence,
  formatMateriality,
  formatValue,
  statusLabel,
} from "./format.js";
import { allowedTransitions } from "./state.js";
import type {
  ExceptionPage,
  ExceptionView,
  StatementView,
  SummaryView,
} from "./types.js";
import { FIELD_KINDS, STATUSES } from "./types.js";

export function renderErrorBanner(message: string): string {
  return `<div class="banner error" role="alert">${escapeHtml(message)}</div>`;
}

export function renderEmptyState(): string {
  return `<div class="empty-state">No exceptions match the current filter.</div>`;
}

export function renderFilterBar(filter: TriageFilterState): string {
  const statusOptions = STATUSES.map(
    (s) =>
      `<label><input type="checkbox" data-filter-status="${s}" ${
        filter.statuses.includes(s) ? "checked" : ""
      }> ${escapeHtml(statusLabel(s))}</label>`,
  ).join(" ");
  const fieldOptions = FIELD_KINDS.map(
    (f) =>
      `<label><input type="checkbox" data-filter-field="${f}" ${
        filter.fields.includes(f) ? "checked" : ""
      }> ${escapeHtml(fieldLabel(f))}</label>`,
  ).join(" ");
  return `
  <form class="filter-bar" data-role="filter-form">
    <fieldset><legend>Status</legend>${statusOptions}</fieldset>
    <fieldset><legend>Field</legend>${fieldOptions}</fieldset>
    <fieldset><legend>Thresholds</legend>
      <label>Min materiality <input type="number" min="0" data-filter-min-materiality
        value="${filter.minMateriality ?? ""}"></label>
      <label>Min confidence <input type="number" min="0" max="1" step="0.05" data-filter-min-confidence
        value="${filter.minConfidence ?? ""}"></label>
      <label>Max confidence <input type="number" min="0" max="1" step="0.05" data-filter-max-confidence
        value="${filter.maxConfidence ?? ""}"></label>
    </fieldset>
    <fieldset><legend>Sort</legend>
      <select data-filter-sort>
        ${["materiality", "confidence", "created_at", "doc_id"]
          .map((k) => `<option value="${k}" ${filter.sort === k ? "selected" : ""}>${k}</option>`)
          .join("")}
      </select>
      <select data-filter-order>
        <option value="desc" ${filter.order === "desc" ? "selected" : ""}>desc</option>
        <option value="asc" ${filter.order === "asc" ? "selected" : ""}>asc</option>
      </select>
    </fieldset>
    <button type="submit">Apply</button>
  </form>`;
}

function actionButtons(exc: ExceptionView): string {
  const next = allowedTransitions(exc.status);
  if (!next.length) return "";
  return next
    .map(
      (status) =>
        `<button class="action" data-action="set-status" data-exception-id="${escapeHtml(
          exc.exception_id,
        )}" data-new-status="${status}">${escapeHtml(statusLabel(status))}</button>`,
    )
    .join(" ");
}

export function renderQueueRows(items: ExceptionView[]): string {
  return items
    .map((exc) => {
      const band = confidenceBand(exc.confidence);
      return `
      <tr class="exception-row status-${exc.status} category-${exc.category}"
          data-exception-id="${escapeHtml(exc.exception_id)}">
        <td><a href="#/statements/${encodeURIComponent(exc.doc_id)}" class="drill-link">${escapeHtml(
          exc.doc_id,
        )}</a></td>
        <td>${escapeHtml(fieldLabel(exc.field_kind))}</td>
        <td class="value source">${escapeHtml(formatValue(exc, exc.source_value))}</td>
        <td class="value extracted">${escapeHtml(
          exc.extracted_raw ?? `(${exc.category})`,
        )}</td>
        <td class="materiality">${escapeHtml(formatMateriality(exc))}</td>
        <td class="confidence band-${band}">${escapeHtml(formatConfidence(exc.confidence))}</td>
        <td><span class="badge badge-${exc.status}">${escapeHtml(statusLabel(exc.status))}</span></td>
        <td class="actions">${actionButtons(exc)}</td>
      </tr>`;
    })
    .join("");
}

export function renderQueueView(page: ExceptionPage, filter: TriageFilterState): string {
  const pages = Math.max(1, Math.ceil(page.total / page.page_size));
  const body = page.items.length
    ? `<table class="queue">
        <thead><tr>
          <th>Statement</th><th>Field</th><th>Source</th><th>Extracted</th>
          <th>Materiality</th><th>Confidence</th><th>Status</th><th>Actions</th>
        </tr></thead>
        <tbody>${renderQueueRows(page.items)}</tbody>
      </table>`
    : renderEmptyState();
  return `
  <section class="queue-view">
    ${renderFilterBar(filter)}
    <div class="queue-meta">${page.total} exception${page.total === 1 ? "" : "s"}</div>
    ${body}
    <nav class="pager">
      <button data-action="prev-page" ${page.page <= 1 ? "disabled" : ""}>Prev</button>
      <span>page ${page.page} of ${pages}</span>
      <button data-action="next-page" ${page.page >= pages ? "disabled" : ""}>Next</button>
    </nav>
  </section>`;
}

export function renderStatementView(
  statement: StatementView,
  related: ExceptionView[],
): string {
  const byLine = new Map<number, { kind: string; mismatch: boolean }>();
  const missing: string[] = [];
  for (const [kind, overlay] of Object.entries(statement.fields)) {
    const exc = related.find((e) => e.field_kind === kind);
    if (overlay.present && overlay.line_index !== null) {
      byLine.set(overlay.line_index, { kind, mismatch: exc !== undefined });
    } else {
      missing.push(kind);
    }
  }
  const lines = statement.lines
    .map((line, i) => {
      const mark = byLine.get(i);
      if (!mark) return `<div class="stmt-line">${escapeHtml(line) || "&nbsp;"}</div>`;
      const cls = mark.mismatch ? "highlight mismatch" : "highlight";
      return `<div class="stmt-line ${cls}" data-field="${escapeHtml(mark.kind)}">${escapeHtml(
        line,
      )}</div>`;
    })
    .join("");
  const missingNote = missing.length
    ? `<div class="missing-fields">${missing
        .map((k) => `<span class="missing-marker">${escapeHtml(fieldLabel(k))}: not found in document</span>`)
        .join(" ")}</div>`
    : "";
  const source = related.find((e) => e.source_record)?.source_record ?? null;
  const panel = source
    ? `<aside class="source-panel">
        <h3>Source of truth</h3>
        <dl>
          <dt>Customer</dt><dd>${escapeHtml(source.customer_id)}</dd>
          <dt>Minimum payment</dt><dd>${escapeHtml(formatCents(source.minimum_payment))}</dd>
          <dt>Due date</dt><dd>${escapeHtml(source.due_date)}</dd>
          <dt>Statement balance</dt><dd>${escapeHtml(formatCents(source.statement_balance))}</dd>
          <dt>Period</dt><dd>${escapeHtml(source.period)}</dd>
        </dl>
      </aside>`
    : "";
  return `
  <section class="statement-view" data-doc-id="${escapeHtml(statement.doc_id)}">
    <a href="#/queue" class="back-link">&larr; back to queue</a>
    <h2>${escapeHtml(statement.doc_id)}</h2>
    ${missingNote}
    <div class="statement-layout">
      <pre class="statement-text">${lines}</pre>
      ${panel}
    </div>
  </section>`;
}

export function renderNotFound(docId: string): string {
  return `<section class="statement-view">
    <div class="banner error">Statement ${escapeHtml(docId)} was not found.</div>
    <a href="#/queue" class="back-link">&larr; back to queue</a>
  </section>`;
}

export function renderSummaryView(summary: SummaryView): string {
  const confRows = Object.entries(summary.field_confidence)
    .map(
      ([kind, fc]) =>
        `<tr><td>${escapeHtml(fieldLabel(kind))}</td><td>${
          fc.mean === null ? "—" : fc.mean.toFixed(3)
        }</td><td>${fc.count}</td><td>${fc.absent_count}</td></tr>`,
    )
    .join("");
  const statusCells = Object.entries(summary.exceptions_by_status)
    .map(([status, count]) => `<span class="badge badge-${status}">${escapeHtml(statusLabel(status))}: ${count}</span>`)
    .join(" ");
  const fieldCells = Object.entries(summary.exceptions_by_field)
    .map(([kind, count]) => `<li>${escapeHtml(fieldLabel(kind))}: ${count}</li>`)
    .join("");
  const trendRows = summary.trend
    .map(
      (t) =>
        `<tr><td>${escapeHtml(t.period)}</td><td>${escapeHtml(fieldLabel(t.field_kind))}</td><td>${t.count}</td></tr>`,
    )
    .join("");
  return `
  <section class="summary-view">
    <div class="stat-grid">
      <div class="stat"><div class="stat-number">${summary.documents_processed}</div>
        <div class="stat-label">documents processed</div></div>
      <div class="stat"><div class="stat-number">${
        summary.overall_mean_confidence === null ? "—" : summary.overall_mean_confidence.toFixed(3)
      }</div><div class="stat-label">mean confidence</div></div>
      <div class="stat"><div class="stat-number">${summary.runs}</div>
        <div class="stat-label">runs</div></div>
    </div>
    <h3>Dispositions</h3>
    <p class="status-histogram">${statusCells}</p>
    <h3>Exceptions by field</h3>
    <ul>${fieldCells}</ul>
    <h3>Confidence by field</h3>
    <table class="summary-table">
      <thead><tr><th>Field</th><th>Mean</th><th>Extracted</th><th>Absent</th></tr></thead>
      <tbody>${confRows}</tbody>
    </table>
    <h3>Exception trend</h3>
    <table class="summary-table">
      <thead><tr><th>Period</th><th>Field</th><th>Count</th></tr></thead>
      <tbody>${trendRows || '<tr><td colspan="3">no exceptions</td></tr>'}</tbody>
    </table>
  </section>`;
}

export function renderShell(actor: string, content: string): string {
  return `
  <header class="app-header">
    <h1>Exception Triage</h1>
    <nav>
      <a href="#/queue">Queue</a>
      <a href="#/summary">Summary</a>
    </nav>
    <label class="actor-box">Auditor
      <input type="text" data-role="actor" value="${escapeHtml(actor)}" placeholder="your name">
    </label>
  </header>
  <main id="content">${content}</main>`;
}
