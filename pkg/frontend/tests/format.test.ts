import { describe, expect, it } from "vitest";

import {
  confidenceBand,
  escapeHtml,
  formatCents,
  formatMateriality,
} from "../src/format.js";
import { MATERIALITY_SENTINEL } from "../src/types.js";
import type { ExceptionView } from "../src/types.js";

function exc(overrides: Partial<ExceptionView>): ExceptionView {
  return {
    exception_id: "x",
    doc_id: "stmt_CUST-00001",
    customer_id: "CUST-00001",
    field_kind: "minimum_payment",
    source_value: 2500,
    extracted_raw: "$35.00",
    extracted_canonical: 3500,
    error_reason: null,
    confidence: 0.9,
    materiality: 1000,
    category: "mismatch",
    status: "open",
    disposition_note: "",
    created_at: "t",
    updated_at: "t",
    run_id: "r",
    excerpt: null,
    source_record: null,
    ...overrides,
  };
}

describe("money formatting", () => {
  it("renders cents with grouping", () => {
    expect(formatCents(123456)).toBe("$1,234.56");
    expect(formatCents(7)).toBe("$0.07");
    expect(formatCents(-900000)).toBe("-$9,000.00");
  });
});

describe("confidence bands", () => {
  it("low < 0.5 <= medium < 0.8 <= high", () => {
    expect(confidenceBand(0)).toBe("low");
    expect(confidenceBand(0.49)).toBe("low");
    expect(confidenceBand(0.5)).toBe("medium");
    expect(confidenceBand(0.79)).toBe("medium");
    expect(confidenceBand(0.8)).toBe("high");
    expect(confidenceBand(1)).toBe("high");
  });
});

describe("materiality display", () => {
  it("amounts in dollars, dates in days", () => {
    expect(formatMateriality(exc({ materiality: 1000 }))).toBe("$10.00");
    expect(formatMateriality(exc({ field_kind: "due_date", materiality: 1 }))).toBe("1 day");
    expect(formatMateriality(exc({ field_kind: "due_date", materiality: 10 }))).toBe("10 days");
  });

  it("sentinel shows as a missing value regardless of field", () => {
    expect(formatMateriality(exc({ materiality: MATERIALITY_SENTINEL }))).toBe("missing value");
    expect(
      formatMateriality(exc({ field_kind: "due_date", materiality: MATERIALITY_SENTINEL })),
    ).toBe("missing value");
  });
});

describe("html escaping", () => {
  it("neutralizes markup in statement text", () => {
    expect(escapeHtml(`<img src=x onerror="p()">&'`)).toBe(
      "&lt;img src=x onerror=&quot;p()&quot;&gt;&amp;&#39;",
    );
  });
});
