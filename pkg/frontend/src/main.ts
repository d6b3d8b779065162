/** Hash-routed wiring: fetch, render, and event delegation.
 *
 * Routes: #/queue?<filter-query>, #/statements/<doc_id>, #/summary.
 * At most one disposition request is in flight at a time; a rejected update
 * reverts the optimistic row and surfaces the service's explanation inline.
 */

import { ApiClient, ApiError } from "./api.js";
import { DEFAULT_FILTER, fromQuery, toQuery, withPage } from "./filter.js";
import type { TriageFilterState } from "./filter.js";
import { applyStatus, revertStatus } from "./state.js";
import type { ExceptionPage, ExceptionStatus, ExceptionView } from "./types.js";
import {
  renderErrorBanner,
  renderNotFound,
  renderQueueView,
  renderShell,
  renderStatementView,
  renderSummaryView,
} from "./views.js";

const apiBase = (window as { API_BASE?: string }).API_BASE ?? "";
const api = new ApiClient(apiBase);

let currentFilter: TriageFilterState = { ...DEFAULT_FILTER };
let currentPage: ExceptionPage | null = null;
let mutationInFlight = false;

function actor(): string {
  return localStorage.getItem("popaudit.actor") ?? "";
}

function setActor(name: string): void {
  localStorage.setItem("popaudit.actor", name);
}

function el(): HTMLElement {
  return document.getElementById("app") as HTMLElement;
}

function content(): HTMLElement {
  return document.getElementById("content") as HTMLElement;
}

function show(html: string): void {
  el().innerHTML = renderShell(actor(), html);
}

async function routeQueue(query: string): Promise<void> {
  currentFilter = fromQuery(query);
  try {
    currentPage = await api.listExceptions(currentFilter);
    show(renderQueueView(currentPage, currentFilter));
  } catch (err) {
    show(renderErrorBanner(errMessage(err)));
  }
}

async function routeStatement(docId: string): Promise<void> {
  try {
    const statement = await api.getStatement(docId);
    const related = await api.listExceptions({ ...DEFAULT_FILTER, pageSize: 500 });
    const forDoc = related.items.filter((e) => e.doc_id === docId);
    show(renderStatementView(statement, forDoc));
  } catch (err) {
    if (err instanceof ApiError && err.status === 404) {
      show(renderNotFound(docId));
      return;
    }
    show(renderErrorBanner(errMessage(err)));
  }
}

async function routeSummary(): Promise<void> {
  try {
    const summary = await api.getSummary();
    show(renderSummaryView(summary));
  } catch (err) {
    show(renderErrorBanner(errMessage(err)));
  }
}

function errMessage(err: unknown): string {
  if (err instanceof ApiError) {
    return err.status === 0 ? err.message : `service error ${err.status}: ${err.message}`;
  }
  return String(err);
}

function route(): void {
  const hash = location.hash || "#/queue";
  const [path, query = ""] = hash.slice(1).split("?", 2) as [string, string?];
  if (path.startsWith("/statements/")) {
    void routeStatement(decodeURIComponent(path.slice("/statements/".length)));
  } else if (path === "/summary") {
    void routeSummary();
  } else {
    void routeQueue(query ?? "");
  }
}

function gotoFilter(filter: TriageFilterState): void {
  const query = toQuery(filter);
  location.hash = query ? `#/queue?${query}` : "#/queue";
}

function readFilterForm(form: HTMLFormElement): TriageFilterState {
  const statuses = [...form.querySelectorAll<HTMLInputElement>("[data-filter-status]:checked")].map(
    (i) => i.dataset.filterStatus ?? "",
  );
  const fields = [...form.querySelectorAll<HTMLInputElement>("[data-filter-field]:checked")].map(
    (i) => i.dataset.filterField ?? "",
  );
  const num = (selector: string): number | null => {
    const input = form.querySelector<HTMLInputElement>(selector);
    if (!input || input.value === "") return null;
    const value = Number(input.value);
    return Number.isFinite(value) ? value : null;
  };
  const sort = form.querySelector<HTMLSelectElement>("[data-filter-sort]")?.value ?? "materiality";
  const order = form.querySelector<HTMLSelectElement>("[data-filter-order]")?.value ?? "desc";
  return fromQuery(
    new URLSearchParams({
      ...(statuses.length ? { status: statuses.join(",") } : {}),
      ...(fields.length ? { field: fields.join(",") } : {}),
      ...(num("[data-filter-min-materiality]") !== null
        ? { min_materiality: String(num("[data-filter-min-materiality]")) }
        : {}),
      ...(num("[data-filter-min-confidence]") !== null
        ? { min_confidence: String(num("[data-filter-min-confidence]")) }
        : {}),
      ...(num("[data-filter-max-confidence]") !== null
        ? { max_confidence: String(num("[data-filter-max-confidence]")) }
        : {}),
      sort,
      order,
    }).toString(),
  );
}

async function dispositionAction(exceptionId: string, newStatus: ExceptionStatus): Promise<void> {
  if (mutationInFlight || currentPage === null) return;
  const who = actor().trim();
  if (!who) {
    flashBanner("Set your auditor name in the header before recording dispositions.");
    return;
  }
  const note = window.prompt("Disposition note (optional):") ?? "";
  const { items, revert } = applyStatus(currentPage.items, exceptionId, newStatus, note);
  if (!revert) return;
  currentPage = { ...currentPage, items };
  show(renderQueueView(currentPage, currentFilter));

  mutationInFlight = true;
  try {
    const confirmed = await api.postStatus(exceptionId, newStatus, who, note);
    currentPage = {
      ...currentPage,
      items: currentPage.items.map((e: ExceptionView) =>
        e.exception_id === confirmed.exception_id ? confirmed : e,
      ),
    };
    show(renderQueueView(currentPage, currentFilter));
  } catch (err) {
    currentPage = { ...currentPage, items: revertStatus(currentPage.items, revert) };
    show(renderQueueView(currentPage, currentFilter));
    flashBanner(errMessage(err));
  } finally {
    mutationInFlight = false;
  }
}

function flashBanner(message: string): void {
  const target = content();
  target.insertAdjacentHTML("afterbegin", renderErrorBanner(message));
}

function wireEvents(): void {
  el().addEventListener("submit", (event) => {
    const form = event.target as HTMLElement;
    if (form.matches("[data-role=filter-form]")) {
      event.preventDefault();
      gotoFilter(readFilterForm(form as HTMLFormElement));
    }
  });

  el().addEventListener("click", (event) => {
    const button = (event.target as HTMLElement).closest("button");
    if (!button) return;
    if (button.dataset.action === "set-status") {
      void dispositionAction(
        button.dataset.exceptionId ?? "",
        (button.dataset.newStatus ?? "confirmed") as ExceptionStatus,
      );
    } else if (button.dataset.action === "next-page") {
      gotoFilter(withPage(currentFilter, currentFilter.page + 1));
    } else if (button.dataset.action === "prev-page") {
      gotoFilter(withPage(currentFilter, Math.max(1, currentFilter.page - 1)));
    }
  });

  el().addEventListener("change", (event) => {
    const input = event.target as HTMLInputElement;
    if (input.matches("[data-role=actor]")) {
      setActor(input.value);
    }
  });

  window.addEventListener("hashchange", route);
}

wireEvents();
route();
