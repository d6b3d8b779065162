/** Wire types for the triage service API.
 *
 * Money travels as integer cents, dates as YYYY-MM-DD strings, confidences
 * as decimals in [0, 1]. Errors are {code, message} objects.
 */

export type FieldKind = "minimum_payment" | "due_date" | "statement_balance";
export type ExceptionStatus = "open" | "confirmed" | "false_positive" | "remediated";
export type ExceptionCategory = "mismatch" | "missing" | "unparsable";

export const FIELD_KINDS: FieldKind[] = ["minimum_payment", "due_date", "statement_balance"];
export const STATUSES: ExceptionStatus[] = ["open", "confirmed", "false_positive", "remediated"];

/** Materiality placed on missing/unparsable values; sorts above any real delta. */
export const MATERIALITY_SENTINEL = 1_000_000_000;

export interface SourceRecordView {
  customer_id: string;
  account_number: string;
  minimum_payment: number;
  due_date: string;
  statement_balance: number;
  period: string;
}

export interface ExcerptView {
  line_index: number;
  text: string;
}

export interface ExceptionView {
  exception_id: string;
  doc_id: string;
  customer_id: string;
  field_kind: FieldKind;
  source_value: number | string | null;
  extracted_raw: string | null;
  extracted_canonical: number | string | null;
  error_reason: string | null;
  confidence: number;
  materiality: number;
  category: ExceptionCategory;
  status: ExceptionStatus;
  disposition_note: string;
  created_at: string;
  updated_at: string;
  run_id: string;
  excerpt: ExcerptView | null;
  source_record: SourceRecordView | null;
}

export interface ExceptionPage {
  items: ExceptionView[];
  total: number;
  page: number;
  page_size: number;
}

export interface FieldOverlay {
  present: boolean;
  raw_text: string | null;
  confidence: number;
  line_index: number | null;
}

export interface StatementView {
  doc_id: string;
  lines: string[];
  fields: Record<string, FieldOverlay>;
  run_id: string;
}

export interface FieldConfidenceView {
  mean: number | null;
  count: number;
  absent_count: number;
}

export interface TrendPoint {
  period: string;
  field_kind: string;
  count: number;
}

export interface SummaryView {
  documents_processed: number;
  field_confidence: Record<string, FieldConfidenceView>;
  overall_mean_confidence: number | null;
  exceptions_by_field: Record<string, number>;
  exceptions_by_status: Record<string, number>;
  trend: TrendPoint[];
  runs: number;
}

export interface RunView {
  run_id: string;
  documents: number;
  model_version: string;
  persisted_at: string;
  flattened: boolean;
  reconciled: boolean;
  exception_count: number;
}

export interface ApiErrorBody {
  code: number;
  message: string;
}
