import { describe, expect, it } from "vitest";

import { allowedTransitions, applyStatus, openCount, revertStatus } from "../src/state.js";
import type { ExceptionView } from "../src/types.js";

function exc(id: string, status: ExceptionView["status"] = "open"): ExceptionView {
  return {
    exception_id: id,
    doc_id: `stmt_${id}`,
    customer_id: id,
    field_kind: "due_date",
    source_value: "2024-04-05",
    extracted_raw: "04/09/2024",
    extracted_canonical: "2024-04-09",
    error_reason: null,
    confidence: 0.75,
    materiality: 4,
    category: "mismatch",
    status,
    disposition_note: "",
    created_at: "t",
    updated_at: "t",
    run_id: "r",
    excerpt: null,
    source_record: null,
  };
}

describe("optimistic disposition updates", () => {
  it("applies locally and keeps a revert snapshot", () => {
    const items = [exc("a"), exc("b")];
    const { items: next, revert } = applyStatus(items, "b", "confirmed", "checked");
    expect(next.find((e) => e.exception_id === "b")?.status).toBe("confirmed");
    expect(next.find((e) => e.exception_id === "b")?.disposition_note).toBe("checked");
    expect(revert?.status).toBe("open");
    expect(items[1]?.status).toBe("open"); // input untouched
  });

  it("reverts to the exact previous row on rejection", () => {
    const items = [exc("a"), exc("b")];
    const { items: next, revert } = applyStatus(items, "a", "confirmed", "");
    const restored = revertStatus(next, revert!);
    expect(restored).toEqual(items);
  });

  it("unknown id is a no-op", () => {
    const items = [exc("a")];
    const { items: next, revert } = applyStatus(items, "zz", "confirmed", "");
    expect(next).toBe(items);
    expect(revert).toBeNull();
  });

  it("open count tracks dispositions", () => {
    const items = [exc("a"), exc("b"), exc("c", "confirmed")];
    expect(openCount(items)).toBe(2);
    const { items: next } = applyStatus(items, "a", "false_positive", "");
    expect(openCount(next)).toBe(1);
  });
});

describe("transition menu mirrors the service state machine", () => {
  it("only legal targets are offered", () => {
    expect(allowedTransitions("open").sort()).toEqual(["confirmed", "false_positive"]);
    expect(allowedTransitions("confirmed")).toEqual(["remediated"]);
    expect(allowedTransitions("false_positive")).toEqual([]);
    expect(allowedTransitions("remediated")).toEqual([]);
  });
});
