import { describe, expect, it } from "vitest";

import { DEFAULT_FILTER } from "../src/filter.js";
import {
  renderEmptyState,
  renderQueueView,
  renderStatementView,
  renderSummaryView,
} from "../src/views.js";
import { MATERIALITY_SENTINEL } from "../src/types.js";
import type { ExceptionPage, ExceptionView, StatementView, SummaryView } from "../src/types.js";

function exc(id: string, overrides: Partial<ExceptionView> = {}): ExceptionView {
  return {
    exception_id: id,
    doc_id: `stmt_CUST-0000${id}`,
    customer_id: `CUST-0000${id}`,
    field_kind: "minimum_payment",
    source_value: 2500,
    extracted_raw: "$35.00",
    extracted_canonical: 3500,
    error_reason: null,
    confidence: 0.92,
    materiality: 1000,
    category: "mismatch",
    status: "open",
    disposition_note: "",
    created_at: "t",
    updated_at: "t",
    run_id: "r",
    excerpt: { line_index: 11, text: "Minimum Payment Due: $35.00" },
    source_record: null,
    ...overrides,
  };
}

function page(items: ExceptionView[]): ExceptionPage {
  return { items, total: items.length, page: 1, page_size: 50 };
}

describe("queue view", () => {
  it("renders one row per exception with source vs extracted values", () => {
    const items = [1, 2, 3, 4, 5, 6].map((i) => exc(String(i)));
    const html = renderQueueView(page(items), DEFAULT_FILTER);
    expect(html.match(/class="exception-row/g)?.length).toBe(6);
    expect(html).toContain("$25.00"); // source
    expect(html).toContain("$35.00"); // extracted
    expect(html).toContain("6 exceptions");
  });

  it("marks sentinel materiality rows as missing values", () => {
    const items = [
      exc("1", { materiality: MATERIALITY_SENTINEL, category: "missing", extracted_raw: null }),
    ];
    const html = renderQueueView(page(items), DEFAULT_FILTER);
    expect(html).toContain("missing value");
    expect(html).toContain("(missing)");
  });

  it("offers only legal dispositions per row", () => {
    const html = renderQueueView(
      page([exc("1", { status: "confirmed" }), exc("2", { status: "remediated" })]),
      DEFAULT_FILTER,
    );
    expect(html).toContain('data-new-status="remediated"');
    expect(html).not.toContain('data-new-status="confirmed"');
  });

  it("renders an explicit empty state", () => {
    const html = renderQueueView(page([]), DEFAULT_FILTER);
    expect(html).toContain("No exceptions match");
    expect(renderEmptyState()).toContain("No exceptions match");
  });

  it("escapes statement-controlled text", () => {
    const html = renderQueueView(
      page([exc("1", { extracted_raw: '<script>alert("x")</script>' })]),
      DEFAULT_FILTER,
    );
    expect(html).not.toContain("<script>alert");
    expect(html).toContain("&lt;script&gt;");
  });
});

describe("statement drilldown", () => {
  const statement: StatementView = {
    doc_id: "stmt_CUST-00001",
    lines: [
      "FIRST MERIDIAN BANK",
      "Account Summary",
      "Statement Balance: $1,234.56",
      "Minimum Payment Due: $35.00",
      "Payment Due Date: 04/05/2024",
    ],
    fields: {
      statement_balance: { present: true, raw_text: "$1,234.56", confidence: 0.95, line_index: 2 },
      minimum_payment: { present: true, raw_text: "$35.00", confidence: 0.94, line_index: 3 },
      due_date: { present: true, raw_text: "04/05/2024", confidence: 0.91, line_index: 4 },
    },
    run_id: "r",
  };

  it("highlights extracted lines and pairs the mismatch with source values", () => {
    const related = [
      exc("1", {
        doc_id: "stmt_CUST-00001",
        source_record: {
          customer_id: "CUST-00001",
          account_number: "4000",
          minimum_payment: 2500,
          due_date: "2024-04-05",
          statement_balance: 123456,
          period: "2024-03",
        },
      }),
    ];
    const html = renderStatementView(statement, related);
    expect(html.match(/stmt-line highlight/g)?.length).toBe(3);
    expect(html.match(/highlight mismatch/g)?.length).toBe(1); // only the exception field
    expect(html).toContain("Source of truth");
    expect(html).toContain("$25.00"); // source minimum payment beside mismatch
  });

  it("flags fields missing from the document", () => {
    const gappy: StatementView = {
      ...statement,
      fields: {
        ...statement.fields,
        due_date: { present: false, raw_text: null, confidence: 0, line_index: null },
      },
    };
    const html = renderStatementView(gappy, []);
    expect(html).toContain("not found in document");
  });
});

describe("summary view", () => {
  it("shows counts, means, and trend", () => {
    const summary: SummaryView = {
      documents_processed: 500,
      field_confidence: {
        minimum_payment: { mean: 0.94, count: 500, absent_count: 0 },
        due_date: { mean: 0.938, count: 500, absent_count: 0 },
        statement_balance: { mean: 0.94, count: 500, absent_count: 0 },
      },
      overall_mean_confidence: 0.9394,
      exceptions_by_field: { minimum_payment: 2, due_date: 2, statement_balance: 2 },
      exceptions_by_status: { open: 5, confirmed: 1, false_positive: 0, remediated: 0 },
      trend: [{ period: "2024-03", field_kind: "due_date", count: 2 }],
      runs: 1,
    };
    const html = renderSummaryView(summary);
    expect(html).toContain("500");
    expect(html).toContain("0.939");
    expect(html).toContain("open: 5");
    expect(html).toContain("confirmed: 1");
    expect(html).toContain("2024-03");
  });
});
