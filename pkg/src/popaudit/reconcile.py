"""Field-by-field reconciliation of extractions against the source of truth.

A (document, field) pair is clean only when the extracted text normalizes
successfully and equals the source value exactly: equal cents for amounts,
equal days for dates. There is no tolerance band; audit semantics forbid
fuzzy matching. Everything else becomes an AuditException categorized as
mismatch, missing, or unparsable, with a materiality magnitude used by the
triage queue (missing and unparsable values take a maximal sentinel so they
sort above every real delta).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from datetime import date
from enum import Enum

from .clock import Clock, stamp
from .corpus import SourceRecord
from .extractor import DocumentExtraction, ExtractionBatch
from .fields import FIELD_ORDER, FIELD_VALUE_TYPES, FieldKind, ValueType
from .normalize import NormalizedValue, NormalizeReason, normalize_field

MATERIALITY_SENTINEL = 10**9  # cents or days; above any plausible real delta


class ExceptionCategory(str, Enum):
    MISMATCH = "mismatch"
    MISSING = "missing"
    UNPARSABLE = "unparsable"


class ExceptionStatus(str, Enum):
    OPEN = "open"
    CONFIRMED = "confirmed"
    FALSE_POSITIVE = "false_positive"
    REMEDIATED = "remediated"


# the full disposition lifecycle; anything not listed is an illegal move
LEGAL_TRANSITIONS: frozenset[tuple[ExceptionStatus, ExceptionStatus]] = frozenset(
    {
        (ExceptionStatus.OPEN, ExceptionStatus.CONFIRMED),
        (ExceptionStatus.OPEN, ExceptionStatus.FALSE_POSITIVE),
        (ExceptionStatus.CONFIRMED, ExceptionStatus.REMEDIATED),
    }
)


class DataIntegrityError(ValueError):
    pass


@dataclass(frozen=True)
class ComparisonPolicy:
    version: str = "exact-v1"


@dataclass(frozen=True)
class AuditException:
    exception_id: str
    doc_id: str
    customer_id: str
    field_kind: FieldKind
    source_value: int | date | None  # None only for join failures
    extracted_raw: str | None
    extracted_canonical: int | date | None
    error_reason: NormalizeReason | None
    confidence: float
    materiality: int
    category: ExceptionCategory
    status: ExceptionStatus
    disposition_note: str
    created_at: str
    updated_at: str
    run_id: str = ""

    def with_status(self, status: ExceptionStatus, note: str, at: str) -> "AuditException":
        return replace(self, status=status, disposition_note=note, updated_at=at)


@dataclass(frozen=True)
class ReconciliationReport:
    population: int
    fields_tested: tuple[FieldKind, ...]
    exceptions: list[AuditException]
    per_field_counts: dict[FieldKind, int]
    clean_matches: int
    model_version: str
    policy_version: str
    run_id: str
    started_at: str
    finished_at: str

    def validate(self) -> None:
        assert sum(self.per_field_counts.values()) == len(self.exceptions)
        pairs = self.population * len(self.fields_tested)
        assert self.clean_matches + len(self.exceptions) == pairs


def materiality(field_kind: FieldKind, extracted: int | date, source: int | date) -> int:
    """Discrepancy magnitude: cents for amounts, days for dates."""
    value_type = FIELD_VALUE_TYPES[field_kind]
    if value_type is ValueType.CURRENCY:
        if not (isinstance(extracted, int) and isinstance(source, int)):
            raise ValueError(f"expected cents for {field_kind.value}")
        return abs(extracted - source)
    if not (isinstance(extracted, date) and isinstance(source, date)):
        raise ValueError(f"expected calendar dates for {field_kind.value}")
    return abs((extracted - source).days)


def _exception_id(run_id: str, doc_id: str, kind: FieldKind) -> str:
    prefix = f"exc-{run_id}" if run_id else "exc"
    return f"{prefix}-{doc_id}-{kind.value}"


def compare_field(
    extraction: DocumentExtraction,
    kind: FieldKind,
    source_value: int | date,
    policy: ComparisonPolicy,
    created_at: str,
    run_id: str = "",
) -> AuditException | None:
    """Return None iff the extracted value normalizes and matches exactly."""
    slot = extraction.fields.get(kind)
    raw = slot.raw_text if slot is not None else None
    confidence = slot.confidence if slot is not None else 0.0
    result = normalize_field(FIELD_VALUE_TYPES[kind], raw)

    if isinstance(result, NormalizedValue):
        if result.canonical == source_value:
            return None
        category = ExceptionCategory.MISMATCH
        extracted_canonical: int | date | None = result.canonical
        error_reason = None
        magnitude = materiality(kind, result.canonical, source_value)
    else:
        category = (
            ExceptionCategory.MISSING
            if result.reason is NormalizeReason.EMPTY
            else ExceptionCategory.UNPARSABLE
        )
        extracted_canonical = None
        error_reason = result.reason
        magnitude = MATERIALITY_SENTINEL

    return AuditException(
        exception_id=_exception_id(run_id, extraction.doc_id, kind),
        doc_id=extraction.doc_id,
        customer_id=extraction.customer_id,
        field_kind=kind,
        source_value=source_value,
        extracted_raw=raw,
        extracted_canonical=extracted_canonical,
        error_reason=error_reason,
        confidence=confidence,
        materiality=magnitude,
        category=category,
        status=ExceptionStatus.OPEN,
        disposition_note="",
        created_at=created_at,
        updated_at=created_at,
        run_id=run_id,
    )


def reconcile_population(
    batch: ExtractionBatch,
    truth: list[SourceRecord],
    policy: ComparisonPolicy | None = None,
    clock: Clock | None = None,
    run_id: str = "",
) -> ReconciliationReport:
    """One compare_field evaluation per (document, field) in the batch.

    The truth table must be unique-keyed by customer_id. An extraction whose
    customer cannot be joined produces a missing-category exception for every
    tested field rather than a fault.
    """
    policy = policy if policy is not None else ComparisonPolicy()
    by_customer: dict[str, SourceRecord] = {}
    for record in truth:
        if record.customer_id in by_customer:
            raise DataIntegrityError(
                f"duplicate customer_id in source of truth: {record.customer_id}"
            )
        by_customer[record.customer_id] = record

    started_at = stamp(clock.now()) if clock is not None else ""
    exceptions: list[AuditException] = []
    clean = 0
    for extraction in batch.extractions:
        record = by_customer.get(extraction.customer_id)
        for kind in FIELD_ORDER:
            if record is None:
                exceptions.append(_join_failure(extraction, kind, started_at, run_id))
                continue
            exc = compare_field(extraction, kind, record.value(kind), policy, started_at, run_id)
            if exc is None:
                clean += 1
            else:
                exceptions.append(exc)

    exceptions.sort(key=lambda e: (e.doc_id, FIELD_ORDER.index(e.field_kind)))
    counts = {kind: 0 for kind in FIELD_ORDER}
    for exc in exceptions:
        counts[exc.field_kind] += 1

    report = ReconciliationReport(
        population=batch.document_count,
        fields_tested=FIELD_ORDER,
        exceptions=exceptions,
        per_field_counts=counts,
        clean_matches=clean,
        model_version=batch.model_version,
        policy_version=policy.version,
        run_id=run_id,
        started_at=started_at,
        finished_at=stamp(clock.now()) if clock is not None else "",
    )
    report.validate()
    return report


def _join_failure(
    extraction: DocumentExtraction, kind: FieldKind, created_at: str, run_id: str
) -> AuditException:
    slot = extraction.fields.get(kind)
    return AuditException(
        exception_id=_exception_id(run_id, extraction.doc_id, kind),
        doc_id=extraction.doc_id,
        customer_id=extraction.customer_id,
        field_kind=kind,
        source_value=None,
        extracted_raw=slot.raw_text if slot else None,
        extracted_canonical=None,
        error_reason=None,
        confidence=slot.confidence if slot else 0.0,
        materiality=MATERIALITY_SENTINEL,
        category=ExceptionCategory.MISSING,
        status=ExceptionStatus.OPEN,
        disposition_note="customer not found in source of truth",
        created_at=created_at,
        updated_at=created_at,
        run_id=run_id,
    )
