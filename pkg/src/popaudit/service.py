"""HTTP seam between the evidence store and the auditor triage dashboard.

All endpoints are pure projections of store state except the disposition
update, which is serialized through the store's single writer. Wire
conventions: money as integer cents, dates as YYYY-MM-DD strings,
confidences as decimals in [0, 1]; errors are {code, message} objects.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import Body, FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from starlette.exceptions import HTTPException as StarletteHTTPException

from .clock import Clock, SystemClock
from .corpus import read_truth_csv
from .extractor import DocumentExtraction
from .fields import FIELD_ORDER, FieldKind
from .metrics import confidence_summary
from .reconcile import AuditException, ExceptionStatus
from .store import (
    EvidenceStore,
    ExceptionFilter,
    FilterError,
    IllegalTransitionError,
    UnknownExceptionError,
    exception_to_json,
)


class ApiError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


def create_app(
    data_dir: Path, clock: Clock | None = None, ui_dir: Path | None = None
) -> FastAPI:
    store = EvidenceStore(Path(data_dir), clock=clock if clock is not None else SystemClock())
    app = FastAPI(title="popaudit triage service", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.exception_handler(ApiError)
    async def _api_error(_request: Request, exc: ApiError) -> JSONResponse:
        return JSONResponse(status_code=exc.code, content={"code": exc.code, "message": exc.message})

    @app.exception_handler(StarletteHTTPException)
    async def _http_error(_request: Request, exc: StarletteHTTPException) -> JSONResponse:
        return JSONResponse(
            status_code=exc.status_code,
            content={"code": exc.status_code, "message": str(exc.detail)},
        )

    @app.exception_handler(RequestValidationError)
    async def _validation_error(_request: Request, exc: RequestValidationError) -> JSONResponse:
        return JSONResponse(status_code=422, content={"code": 422, "message": str(exc.errors())})

    # -- helpers ---------------------------------------------------------------

    def truth_by_customer():
        path = Path(data_dir) / "truth.csv"
        if not path.exists():
            return {}
        return {r.customer_id: r for r in read_truth_csv(path)}

    def run_extractions(run_id: str) -> dict[str, DocumentExtraction]:
        try:
            return {ex.doc_id: ex for ex in store.load_raw(run_id)}
        except Exception:
            return {}

    def exception_view(exc: AuditException, extractions=None, truth=None) -> dict:
        if extractions is None:
            extractions = run_extractions(exc.run_id) if exc.run_id else {}
        if truth is None:
            truth = truth_by_customer()
        view = exception_to_json(exc)
        excerpt = None
        ex = extractions.get(exc.doc_id)
        if ex is not None:
            slot = ex.fields.get(exc.field_kind)
            if slot is not None and slot.line_index is not None:
                lines = store.statement_lines(exc.doc_id)
                if lines is not None and slot.line_index < len(lines):
                    excerpt = {"line_index": slot.line_index, "text": lines[slot.line_index]}
        view["excerpt"] = excerpt
        record = truth.get(exc.customer_id)
        view["source_record"] = (
            None
            if record is None
            else {
                "customer_id": record.customer_id,
                "account_number": record.account_number,
                "minimum_payment": record.minimum_payment_cents,
                "due_date": record.due_date.isoformat(),
                "statement_balance": record.statement_balance_cents,
                "period": record.period,
            }
        )
        return view

    def parse_filter(params) -> tuple[ExceptionFilter, str, str, int, int]:
        def parse_number(name: str, conv, default=None):
            raw = params.get(name)
            if raw is None or raw == "":
                return default
            try:
                return conv(raw)
            except ValueError:
                raise ApiError(400, f"query parameter {name} is malformed: {raw!r}")

        def parse_enum_set(name: str, enum_cls):
            raw = params.get(name)
            if not raw:
                return None
            try:
                return frozenset(enum_cls(part) for part in raw.split(",") if part)
            except ValueError:
                raise ApiError(400, f"query parameter {name} has an unknown value: {raw!r}")

        filt = ExceptionFilter(
            statuses=parse_enum_set("status", ExceptionStatus),
            field_kinds=parse_enum_set("field", FieldKind),
            min_materiality=parse_number("min_materiality", int),
            min_confidence=parse_number("min_confidence", float),
            max_confidence=parse_number("max_confidence", float),
            customer_id=params.get("customer") or None,
            run_id=params.get("run_id") or None,
        )
        try:
            filt.validate()
        except FilterError as err:
            raise ApiError(400, str(err))
        sort = params.get("sort", "materiality")
        order = params.get("order", "desc")
        page = parse_number("page", int, 1)
        page_size = parse_number("page_size", int, 50)
        return filt, sort, order, page, page_size

    # -- endpoints ---------------------------------------------------------------

    @app.get("/api/exceptions")
    async def list_exceptions(request: Request):
        filt, sort, order, page, page_size = parse_filter(request.query_params)
        try:
            result = store.query_exceptions(filt, sort=sort, order=order, page=page, page_size=page_size)
        except FilterError as err:
            raise ApiError(400, str(err))
        truth = truth_by_customer()
        extractions_cache: dict[str, dict] = {}
        items = []
        for exc in result.items:
            if exc.run_id not in extractions_cache:
                extractions_cache[exc.run_id] = run_extractions(exc.run_id) if exc.run_id else {}
            items.append(exception_view(exc, extractions_cache[exc.run_id], truth))
        return {
            "items": items,
            "total": result.total,
            "page": result.page,
            "page_size": result.page_size,
        }

    @app.get("/api/exceptions/{exception_id}")
    async def get_exception(exception_id: str):
        exc = store.load_ledger().get(exception_id)
        if exc is None:
            raise ApiError(404, f"unknown exception {exception_id!r}")
        return exception_view(exc)

    @app.post("/api/exceptions/{exception_id}/status")
    async def set_status(exception_id: str, payload: dict = Body(...)):
        actor = payload.get("actor")
        if not actor or not str(actor).strip():
            raise ApiError(422, "actor is required")
        raw_status = payload.get("new_status")
        try:
            new_status = ExceptionStatus(raw_status)
        except ValueError:
            raise ApiError(400, f"unknown status {raw_status!r}")
        note = str(payload.get("note", ""))
        try:
            updated = store.update_status(exception_id, new_status, actor=str(actor), note=note)
        except UnknownExceptionError as err:
            raise ApiError(404, str(err))
        except IllegalTransitionError as err:
            raise ApiError(409, str(err))
        return exception_view(updated)

    @app.get("/api/statements/{doc_id}")
    async def get_statement(doc_id: str):
        lines = store.statement_lines(doc_id)
        if lines is None:
            raise ApiError(404, f"unknown statement {doc_id!r}")
        overlay = {}
        run = store.latest_run()
        run_id = run.run_id if run else ""
        if run_id:
            ex = run_extractions(run_id).get(doc_id)
            if ex is not None:
                for kind in FIELD_ORDER:
                    slot = ex.fields.get(kind)
                    overlay[kind.value] = {
                        "present": bool(slot and slot.present),
                        "raw_text": slot.raw_text if slot else None,
                        "confidence": slot.confidence if slot else 0.0,
                        "line_index": slot.line_index if slot else None,
                    }
        return {"doc_id": doc_id, "lines": lines, "fields": overlay, "run_id": run_id}

    @app.get("/api/summary")
    async def get_summary():
        ledger = store.load_ledger()
        runs = store.list_runs()
        latest = runs[-1] if runs else None
        documents = latest.documents if latest else 0
        if latest:
            extractions = list(run_extractions(latest.run_id).values())
            conf = confidence_summary(extractions)
        else:
            conf = confidence_summary([])
        by_field = {kind.value: 0 for kind in FIELD_ORDER}
        by_status = {status.value: 0 for status in ExceptionStatus}
        for exc in ledger.values():
            by_field[exc.field_kind.value] += 1
            by_status[exc.status.value] += 1
        truth = truth_by_customer()
        trend: dict[tuple[str, str], int] = {}
        for exc in ledger.values():
            record = truth.get(exc.customer_id)
            period = record.period if record else (exc.created_at[:7] or "unknown")
            trend[(period, exc.field_kind.value)] = trend.get((period, exc.field_kind.value), 0) + 1
        return {
            "documents_processed": documents,
            "field_confidence": {
                kind.value: {
                    "mean": conf.per_field[kind].mean,
                    "count": conf.per_field[kind].count,
                    "absent_count": conf.per_field[kind].absent_count,
                }
                for kind in FIELD_ORDER
            },
            "overall_mean_confidence": conf.overall_mean,
            "exceptions_by_field": by_field,
            "exceptions_by_status": by_status,
            "trend": [
                {"period": period, "field_kind": kind, "count": count}
                for (period, kind), count in sorted(trend.items())
            ],
            "runs": len(runs),
        }

    @app.get("/api/runs")
    async def get_runs():
        return {
            "runs": [
                {
                    "run_id": r.run_id,
                    "documents": r.documents,
                    "model_version": r.model_version,
                    "persisted_at": r.persisted_at,
                    "flattened": r.flattened,
                    "reconciled": r.reconciled,
                    "exception_count": r.exception_count,
                }
                for r in store.list_runs()
            ]
        }

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app


def serve(data_dir: Path, port: int, ui_dir: Path | None = None) -> None:
    import uvicorn

    uvicorn.run(create_app(data_dir, ui_dir=ui_dir), host="127.0.0.1", port=port, log_level="warning")
