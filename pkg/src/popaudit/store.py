"""File-backed evidence store: stage, runs, exception ledger, audit log.

Layout under one data directory, all UTF-8:

    stage/                      statement text files (one per document)
    runs/<run_id>/meta.json     run registration record
    runs/<run_id>/raw.jsonl     semi-structured inference results
    runs/<run_id>/flat.csv      one relational row per (document, field)
    runs/<run_id>/report.json   reconciliation summary (reconciled marker)
    exceptions.jsonl            ledger; last write wins per exception_id
    audit.log                   append-only, gapless sequence numbers

Plain files keep the evidence diffable and auditable. Writers are serialized
through one lock (single-writer, multi-reader); whole files are replaced
atomically and appends are flushed before return, so a crash between
operations never exposes a partially visible run.
"""

from __future__ import annotations

import csv
import json
import os
import threading
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import Any, Iterable

from .clock import Clock, SystemClock, stamp
from .corpus import decode_value, encode_value
from .extractor import DocumentExtraction, ExtractionBatch, extraction_from_json, extraction_to_json
from .fields import FIELD_ORDER, FIELD_VALUE_TYPES, FieldKind
from .normalize import NormalizedValue, NormalizeReason, normalize_field
from .reconcile import (
    LEGAL_TRANSITIONS,
    AuditException,
    ExceptionCategory,
    ExceptionStatus,
    ReconciliationReport,
)


class StoreError(RuntimeError):
    pass


class DuplicateRunError(StoreError):
    pass


class UnknownRunError(StoreError):
    pass


class UnknownExceptionError(StoreError):
    pass


class IllegalTransitionError(StoreError):
    pass


class FilterError(ValueError):
    pass


@dataclass(frozen=True)
class FlatRow:
    doc_id: str
    customer_id: str
    field_kind: FieldKind
    raw_value: str  # empty when the field was absent
    canonical_value: str  # canonical rendering, or "error:<reason>"
    confidence: float
    model_version: str
    run_id: str


FLAT_CSV_HEADER = [
    "doc_id",
    "customer_id",
    "field_kind",
    "raw_value",
    "canonical_value",
    "confidence",
    "model_version",
    "run_id",
]


@dataclass(frozen=True)
class RunInfo:
    run_id: str
    documents: int
    model_version: str
    persisted_at: str
    flattened: bool
    reconciled: bool
    exception_count: int


@dataclass(frozen=True)
class AuditLogEntry:
    seq: int
    actor: str
    action: str
    subject_id: str
    before: dict | None
    after: dict | None
    at: str


@dataclass(frozen=True)
class ExceptionFilter:
    statuses: frozenset[ExceptionStatus] | None = None
    field_kinds: frozenset[FieldKind] | None = None
    min_materiality: int | None = None
    min_confidence: float | None = None
    max_confidence: float | None = None
    customer_id: str | None = None
    run_id: str | None = None

    def validate(self) -> None:
        for name, value in (("min_confidence", self.min_confidence),
                            ("max_confidence", self.max_confidence)):
            if value is not None and not 0.0 <= value <= 1.0:
                raise FilterError(f"{name} must be in [0, 1], got {value}")
        if (
            self.min_confidence is not None
            and self.max_confidence is not None
            and self.min_confidence > self.max_confidence
        ):
            raise FilterError("min_confidence exceeds max_confidence")
        if self.min_materiality is not None and self.min_materiality < 0:
            raise FilterError("min_materiality must be >= 0")

    def matches(self, exc: AuditException) -> bool:
        if self.statuses is not None and exc.status not in self.statuses:
            return False
        if self.field_kinds is not None and exc.field_kind not in self.field_kinds:
            return False
        if self.min_materiality is not None and exc.materiality < self.min_materiality:
            return False
        if self.min_confidence is not None and exc.confidence < self.min_confidence:
            return False
        if self.max_confidence is not None and exc.confidence > self.max_confidence:
            return False
        if self.customer_id is not None and exc.customer_id != self.customer_id:
            return False
        if self.run_id is not None and exc.run_id != self.run_id:
            return False
        return True


@dataclass(frozen=True)
class Page:
    items: list[AuditException]
    total: int
    page: int
    page_size: int


SORT_KEYS = ("materiality", "confidence", "created_at", "doc_id")
MAX_PAGE_SIZE = 500


class EvidenceStore:
    """Single-writer evidence store rooted at a data directory."""

    def __init__(self, data_dir: Path, clock: Clock | None = None):
        self.root = Path(data_dir)
        self.clock = clock if clock is not None else SystemClock()
        self._write_lock = threading.Lock()
        self.root.mkdir(parents=True, exist_ok=True)
        (self.root / "runs").mkdir(exist_ok=True)

    # -- paths ---------------------------------------------------------------

    @property
    def stage_dir(self) -> Path:
        return self.root / "stage"

    def run_dir(self, run_id: str) -> Path:
        if not run_id or "/" in run_id or run_id in (".", ".."):
            raise StoreError(f"invalid run_id {run_id!r}")
        return self.root / "runs" / run_id

    @property
    def ledger_path(self) -> Path:
        return self.root / "exceptions.jsonl"

    @property
    def audit_log_path(self) -> Path:
        return self.root / "audit.log"

    # -- raw results -----------------------------------------------------------

    def persist_raw(self, batch: ExtractionBatch, run_id: str, actor: str = "pipeline") -> int:
        """Durably store a batch under a fresh run_id; duplicate ids are
        rejected so re-runs cannot silently double evidence."""
        with self._write_lock:
            run_dir = self.run_dir(run_id)
            if run_dir.exists():
                raise DuplicateRunError(f"run {run_id!r} already persisted")
            run_dir.mkdir(parents=True)
            lines = [
                json.dumps(extraction_to_json(ex), sort_keys=True)
                for ex in sorted(batch.extractions, key=lambda e: e.doc_id)
            ]
            _atomic_write(run_dir / "raw.jsonl", "".join(line + "\n" for line in lines))
            meta = {
                "run_id": run_id,
                "documents": batch.document_count,
                "model_version": batch.model_version,
                "persisted_at": stamp(self.clock.now()),
            }
            _atomic_write(run_dir / "meta.json", json.dumps(meta, sort_keys=True, indent=2) + "\n")
            self._append_audit(actor, "run-persisted", run_id, None, meta)
            return batch.document_count

    def load_raw(self, run_id: str) -> list[DocumentExtraction]:
        path = self.run_dir(run_id) / "raw.jsonl"
        if not path.exists():
            raise UnknownRunError(f"run {run_id!r} not persisted")
        return [
            extraction_from_json(json.loads(line))
            for line in path.read_text(encoding="utf-8").splitlines()
            if line.strip()
        ]

    # -- flattening --------------------------------------------------------------

    def flatten(self, run_id: str, actor: str = "pipeline") -> list[FlatRow]:
        """Flatten a persisted run into one row per (document, field)."""
        extractions = self.load_raw(run_id)
        rows: list[FlatRow] = []
        for ex in extractions:
            for kind in FIELD_ORDER:
                slot = ex.fields.get(kind)
                raw = slot.raw_text if slot is not None else None
                confidence = slot.confidence if slot is not None else 0.0
                result = normalize_field(FIELD_VALUE_TYPES[kind], raw)
                canonical = (
                    result.canonical_str()
                    if isinstance(result, NormalizedValue)
                    else f"error:{result.reason.value}"
                )
                rows.append(
                    FlatRow(
                        doc_id=ex.doc_id,
                        customer_id=ex.customer_id,
                        field_kind=kind,
                        raw_value=raw or "",
                        canonical_value=canonical,
                        confidence=confidence,
                        model_version=ex.model_version,
                        run_id=run_id,
                    )
                )
        rows.sort(key=lambda r: (r.doc_id, FIELD_ORDER.index(r.field_kind)))

        with self._write_lock:
            out = []
            for r in rows:
                out.append(
                    [
                        r.doc_id,
                        r.customer_id,
                        r.field_kind.value,
                        r.raw_value,
                        r.canonical_value,
                        repr(r.confidence),
                        r.model_version,
                        r.run_id,
                    ]
                )
            path = self.run_dir(run_id) / "flat.csv"
            tmp = path.with_suffix(".csv.tmp")
            with open(tmp, "w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(FLAT_CSV_HEADER)
                writer.writerows(out)
            os.replace(tmp, path)
            self._append_audit(
                actor, "run-flattened", run_id, None, {"rows": len(rows)}
            )
        return rows

    def load_flat(self, run_id: str) -> list[FlatRow]:
        path = self.run_dir(run_id) / "flat.csv"
        if not path.exists():
            raise UnknownRunError(f"run {run_id!r} not flattened")
        rows = []
        with open(path, encoding="utf-8", newline="") as fh:
            for rec in csv.DictReader(fh):
                rows.append(
                    FlatRow(
                        doc_id=rec["doc_id"],
                        customer_id=rec["customer_id"],
                        field_kind=FieldKind(rec["field_kind"]),
                        raw_value=rec["raw_value"],
                        canonical_value=rec["canonical_value"],
                        confidence=float(rec["confidence"]),
                        model_version=rec["model_version"],
                        run_id=rec["run_id"],
                    )
                )
        return rows

    # -- exception ledger ----------------------------------------------------------

    def record_exceptions(
        self, report: ReconciliationReport, run_id: str | None = None, actor: str = "pipeline"
    ) -> int:
        """Open every reported exception in the ledger; idempotent per run."""
        run_id = run_id if run_id is not None else report.run_id
        run_dir = self.run_dir(run_id)
        if not (run_dir / "flat.csv").exists():
            raise UnknownRunError(f"run {run_id!r} not flattened")
        report_path = run_dir / "report.json"
        if report_path.exists():
            raise DuplicateRunError(f"run {run_id!r} already reconciled")

        with self._write_lock:
            lines = []
            for exc in report.exceptions:
                payload = exception_to_json(exc)
                payload["run_id"] = run_id
                lines.append(json.dumps(payload, sort_keys=True))
            if lines:
                _append_lines(self.ledger_path, lines)
            for exc, line in zip(report.exceptions, lines):
                self._append_audit(actor, "exception-created", exc.exception_id, None, json.loads(line))
            _atomic_write(
                report_path,
                json.dumps(report_to_json(report, run_id), sort_keys=True, indent=2) + "\n",
            )
        return len(report.exceptions)

    def load_ledger(self) -> dict[str, AuditException]:
        """Exception ledger with last-write-wins per id; a truncated final
        line (crash artifact) is ignored."""
        ledger: dict[str, AuditException] = {}
        if not self.ledger_path.exists():
            return ledger
        for line in self.ledger_path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            try:
                exc = exception_from_json(json.loads(line))
            except (json.JSONDecodeError, KeyError, ValueError):
                continue
            ledger[exc.exception_id] = exc
        return ledger

    def update_status(
        self, exception_id: str, new_status: ExceptionStatus, actor: str, note: str = ""
    ) -> AuditException:
        """Apply a disposition; only transitions in LEGAL_TRANSITIONS pass."""
        if not actor:
            raise ValueError("actor is required for ledger mutations")
        with self._write_lock:
            ledger = self.load_ledger()
            current = ledger.get(exception_id)
            if current is None:
                raise UnknownExceptionError(f"unknown exception {exception_id!r}")
            if (current.status, new_status) not in LEGAL_TRANSITIONS:
                raise IllegalTransitionError(
                    f"illegal transition {current.status.value} -> {new_status.value}"
                )
            at = stamp(self.clock.now())
            if at < current.updated_at:  # keep updated_at monotone
                at = current.updated_at
            updated = current.with_status(new_status, note, at)
            before = exception_to_json(current)
            after = exception_to_json(updated)
            _append_lines(self.ledger_path, [json.dumps(after, sort_keys=True)])
            self._append_audit(actor, "status-changed", exception_id, before, after)
            return updated

    def query_exceptions(
        self,
        filt: ExceptionFilter | None = None,
        sort: str = "materiality",
        order: str = "desc",
        page: int = 1,
        page_size: int = 50,
    ) -> Page:
        """Filtered, deterministically ordered, paginated ledger view."""
        filt = filt if filt is not None else ExceptionFilter()
        filt.validate()
        if sort not in SORT_KEYS:
            raise FilterError(f"sort must be one of {SORT_KEYS}, got {sort!r}")
        if order not in ("asc", "desc"):
            raise FilterError(f"order must be asc or desc, got {order!r}")
        if page < 1:
            raise FilterError("page must be >= 1")
        if not 1 <= page_size <= MAX_PAGE_SIZE:
            raise FilterError(f"page_size must be in [1, {MAX_PAGE_SIZE}]")

        matched = [e for e in self.load_ledger().values() if filt.matches(e)]
        reverse = order == "desc"
        matched.sort(key=lambda e: (getattr(e, _SORT_ATTRS[sort]), e.exception_id), reverse=reverse)
        start = (page - 1) * page_size
        return Page(
            items=matched[start : start + page_size],
            total=len(matched),
            page=page,
            page_size=page_size,
        )

    # -- audit log -----------------------------------------------------------------

    def _append_audit(
        self, actor: str, action: str, subject_id: str, before: dict | None, after: dict | None
    ) -> AuditLogEntry:
        entry = AuditLogEntry(
            seq=self._next_seq(),
            actor=actor,
            action=action,
            subject_id=subject_id,
            before=before,
            after=after,
            at=stamp(self.clock.now()),
        )
        _append_lines(
            self.audit_log_path,
            [
                json.dumps(
                    {
                        "seq": entry.seq,
                        "actor": entry.actor,
                        "action": entry.action,
                        "subject_id": entry.subject_id,
                        "before": entry.before,
                        "after": entry.after,
                        "at": entry.at,
                    },
                    sort_keys=True,
                )
            ],
        )
        return entry

    def _next_seq(self) -> int:
        entries = self.read_audit_log()
        return entries[-1].seq + 1 if entries else 1

    def read_audit_log(self) -> list[AuditLogEntry]:
        if not self.audit_log_path.exists():
            return []
        out = []
        for line in self.audit_log_path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            obj = json.loads(line)
            out.append(
                AuditLogEntry(
                    seq=obj["seq"],
                    actor=obj["actor"],
                    action=obj["action"],
                    subject_id=obj["subject_id"],
                    before=obj["before"],
                    after=obj["after"],
                    at=obj["at"],
                )
            )
        return out

    def replay_exceptions(self) -> dict[str, AuditException]:
        """Rebuild ledger state purely from the audit log; must equal
        load_ledger() if the log is complete."""
        state: dict[str, AuditException] = {}
        for entry in self.read_audit_log():
            if entry.action in ("exception-created", "status-changed") and entry.after:
                exc = exception_from_json(entry.after)
                state[exc.exception_id] = exc
        return state

    # -- runs and statements -----------------------------------------------------------

    def list_runs(self) -> list[RunInfo]:
        ledger = self.load_ledger()
        infos = []
        runs_dir = self.root / "runs"
        for run_dir in sorted(p for p in runs_dir.iterdir() if p.is_dir()):
            meta_path = run_dir / "meta.json"
            if not meta_path.exists():
                continue
            meta = json.loads(meta_path.read_text(encoding="utf-8"))
            run_id = meta["run_id"]
            infos.append(
                RunInfo(
                    run_id=run_id,
                    documents=meta["documents"],
                    model_version=meta["model_version"],
                    persisted_at=meta["persisted_at"],
                    flattened=(run_dir / "flat.csv").exists(),
                    reconciled=(run_dir / "report.json").exists(),
                    exception_count=sum(1 for e in ledger.values() if e.run_id == run_id),
                )
            )
        infos.sort(key=lambda i: (i.persisted_at, i.run_id))
        return infos

    def latest_run(self) -> RunInfo | None:
        runs = self.list_runs()
        return runs[-1] if runs else None

    def load_report(self, run_id: str) -> dict | None:
        path = self.run_dir(run_id) / "report.json"
        if not path.exists():
            return None
        return json.loads(path.read_text(encoding="utf-8"))

    def statement_lines(self, doc_id: str) -> list[str] | None:
        path = self.stage_dir / f"{doc_id}.txt"
        if not path.exists():
            return None
        return path.read_text(encoding="utf-8").splitlines()


_SORT_ATTRS = {
    "materiality": "materiality",
    "confidence": "confidence",
    "created_at": "created_at",
    "doc_id": "doc_id",
}


# --- serialization helpers ------------------------------------------------------


def exception_to_json(exc: AuditException) -> dict[str, Any]:
    kind = exc.field_kind
    return {
        "exception_id": exc.exception_id,
        "doc_id": exc.doc_id,
        "customer_id": exc.customer_id,
        "field_kind": kind.value,
        "source_value": None if exc.source_value is None else encode_value(kind, exc.source_value),
        "extracted_raw": exc.extracted_raw,
        "extracted_canonical": (
            None if exc.extracted_canonical is None else encode_value(kind, exc.extracted_canonical)
        ),
        "error_reason": exc.error_reason.value if exc.error_reason else None,
        "confidence": exc.confidence,
        "materiality": exc.materiality,
        "category": exc.category.value,
        "status": exc.status.value,
        "disposition_note": exc.disposition_note,
        "created_at": exc.created_at,
        "updated_at": exc.updated_at,
        "run_id": exc.run_id,
    }


def exception_from_json(obj: dict[str, Any]) -> AuditException:
    kind = FieldKind(obj["field_kind"])
    return AuditException(
        exception_id=obj["exception_id"],
        doc_id=obj["doc_id"],
        customer_id=obj["customer_id"],
        field_kind=kind,
        source_value=(
            None if obj["source_value"] is None else decode_value(kind, obj["source_value"])
        ),
        extracted_raw=obj["extracted_raw"],
        extracted_canonical=(
            None
            if obj["extracted_canonical"] is None
            else decode_value(kind, obj["extracted_canonical"])
        ),
        error_reason=NormalizeReason(obj["error_reason"]) if obj["error_reason"] else None,
        confidence=obj["confidence"],
        materiality=obj["materiality"],
        category=ExceptionCategory(obj["category"]),
        status=ExceptionStatus(obj["status"]),
        disposition_note=obj["disposition_note"],
        created_at=obj["created_at"],
        updated_at=obj["updated_at"],
        run_id=obj.get("run_id", ""),
    )


def report_to_json(report: ReconciliationReport, run_id: str) -> dict[str, Any]:
    return {
        "run_id": run_id,
        "population": report.population,
        "fields_tested": [k.value for k in report.fields_tested],
        "exception_ids": [e.exception_id for e in report.exceptions],
        "per_field_counts": {k.value: v for k, v in report.per_field_counts.items()},
        "clean_matches": report.clean_matches,
        "model_version": report.model_version,
        "policy_version": report.policy_version,
        "started_at": report.started_at,
        "finished_at": report.finished_at,
    }


def _atomic_write(path: Path, content: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(content)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def _append_lines(path: Path, lines: Iterable[str]) -> None:
    with open(path, "a", encoding="utf-8") as fh:
        fh.write("".join(line + "\n" for line in lines))
        fh.flush()
        os.fsync(fh.fileno())
