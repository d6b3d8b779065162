"""End-to-end orchestration: generate, train, extract, persist, flatten,
reconcile, record, report. Each stage's outputs are durable before the next
stage starts; a stage failure stops the run and names the stage."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import date
from decimal import Decimal
from pathlib import Path

from .clock import Clock, SystemClock, stamp
from .corpus import (
    ConfigError,
    CorpusConfig,
    DiscrepancyPlan,
    build_corpus,
    read_expected_exceptions,
    read_labeled_corpus,
    read_truth_csv,
    write_corpus,
)
from .extractor import ExtractionBatch, batch_extract, load_model, save_model, train
from .fields import FIELD_ORDER, FieldKind, default_field_specs
from .metrics import (
    CostParams,
    RunSummary,
    baseline_comparison,
    confidence_summary,
    cost_model,
    field_metrics,
    format_cents,
)
from .reconcile import ComparisonPolicy, reconcile_population
from .store import EvidenceStore


class StageFailure(RuntimeError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass
class PipelineConfig:
    data_dir: Path
    corpus: CorpusConfig = field(default_factory=CorpusConfig)
    plan: DiscrepancyPlan = field(default_factory=DiscrepancyPlan)
    train_count: int = 20
    generate: bool = True
    run_id: str | None = None
    policy: ComparisonPolicy = field(default_factory=ComparisonPolicy)
    cost: CostParams = field(default_factory=CostParams)
    port: int = 8600

    def resolved_run_id(self) -> str:
        return self.run_id if self.run_id else f"run-{self.corpus.seed:08d}"


def load_config(path: Path, data_dir: Path | None = None) -> PipelineConfig:
    """Read a JSON config file; missing keys fall back to defaults."""
    obj = json.loads(Path(path).read_text(encoding="utf-8"))
    base = Path(obj.get("data_dir", data_dir if data_dir is not None else "data"))
    corpus_obj = obj.get("corpus", {})
    plan_obj = obj.get("plan", {})
    cost_obj = obj.get("cost", {})
    try:
        corpus = CorpusConfig(
            size=corpus_obj.get("size", 500),
            seed=corpus_obj.get("seed", 42),
            period=corpus_obj.get("period", "2024-03"),
            template_id=corpus_obj.get("template_id", "cc-standard-v1"),
        )
        plan = DiscrepancyPlan(
            minimum_payment=plan_obj.get("minimum_payment", 0),
            due_date=plan_obj.get("due_date", 0),
            statement_balance=plan_obj.get("statement_balance", 0),
            seed=plan_obj.get("seed", 7),
        )
        cost = CostParams(
            auditors=cost_obj.get("auditors", 3),
            hourly_rate=Decimal(str(cost_obj.get("hourly_rate", "85"))),
            sample_size=cost_obj.get("sample_size", 500),
            minutes_per_statement=cost_obj.get("minutes_per_statement", 15),
            population=cost_obj.get("population", 100_000),
            one_time_cost=Decimal(str(cost_obj.get("one_time_cost", "9000"))),
            per_doc_cost=Decimal(str(cost_obj.get("per_doc_cost", "0.045"))),
            dashboard_overhead=Decimal(str(cost_obj.get("dashboard_overhead", "500"))),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid config file {path}: {exc}") from exc
    return PipelineConfig(
        data_dir=Path(data_dir) if data_dir is not None else base,
        corpus=corpus,
        plan=plan,
        train_count=obj.get("train_count", 20),
        generate=obj.get("generate", True),
        run_id=obj.get("run_id"),
        cost=cost,
        port=obj.get("port", 8600),
    )


@dataclass
class PipelineResult:
    exit_code: int
    summary: dict
    failed_stage: str | None = None


def run_pipeline(config: PipelineConfig, clock: Clock | None = None) -> PipelineResult:
    """Run every stage in order; the summary echoes population counts, mean
    confidences, and per-field exception counts for the finished run."""
    clock = clock if clock is not None else SystemClock()
    data_dir = Path(config.data_dir)
    data_dir.mkdir(parents=True, exist_ok=True)
    run_id = config.resolved_run_id()
    started = clock.now()
    summary: dict = {"run_id": run_id, "data_dir": str(data_dir)}

    def fail(stage: str, cause: Exception) -> PipelineResult:
        summary["failed_stage"] = stage
        summary["error"] = str(cause)
        return PipelineResult(exit_code=1, summary=summary, failed_stage=stage)

    # gen
    if config.generate:
        try:
            bundle = build_corpus(config.corpus, config.plan, config.train_count)
            write_corpus(bundle, data_dir)
        except Exception as exc:  # noqa: BLE001 - stage isolation by contract
            return fail("gen", exc)

    store = EvidenceStore(data_dir, clock=clock)
    stage_dir = data_dir / "stage"
    labeled_path = data_dir / "labeled.jsonl"
    model_path = data_dir / "model.json"

    # train
    model = None
    try:
        if labeled_path.exists():
            labeled = read_labeled_corpus(labeled_path)
            model = train(labeled, default_field_specs())
            save_model(model, model_path)
        elif model_path.exists():
            model = load_model(model_path)
    except Exception as exc:
        return fail("train", exc)

    # extract
    try:
        if model is not None and stage_dir.is_dir():
            batch = batch_extract(model, stage_dir, clock)
        elif not stage_dir.is_dir() or not any(stage_dir.glob("*.txt")):
            # nothing staged and nothing to train on: an empty run is valid
            batch = ExtractionBatch(extractions=[], model_version="none")
        else:
            raise ConfigError("staged documents present but no labeled corpus or model found")
    except Exception as exc:
        return fail("extract", exc)
    summary["documents"] = batch.document_count

    # persist
    try:
        store.persist_raw(batch, run_id)
    except Exception as exc:
        return fail("persist", exc)

    # flatten
    try:
        flat_rows = store.flatten(run_id)
    except Exception as exc:
        return fail("flatten", exc)
    summary["flat_rows"] = len(flat_rows)

    # reconcile
    truth_path = data_dir / "truth.csv"
    try:
        truth = read_truth_csv(truth_path) if truth_path.exists() else []
        report = reconcile_population(batch, truth, config.policy, clock, run_id)
    except Exception as exc:
        return fail("reconcile", exc)

    # record
    try:
        store.record_exceptions(report, run_id)
    except Exception as exc:
        return fail("record", exc)

    # report
    try:
        conf = confidence_summary(batch.extractions)
        metrics = None
        statement_truth = _statement_truth(data_dir, batch)
        if statement_truth is not None:
            metrics = field_metrics(batch.extractions, statement_truth)
        runtime = (clock.now() - started).total_seconds()
        run_summary = RunSummary(
            documents_processed=batch.document_count,
            population=batch.document_count,
            metrics=metrics or [],
            mean_confidence=conf.overall_mean,
            runtime_seconds=runtime,
        )
        comparison = cost_model(config.cost)
        _write_reports(data_dir, run_id, metrics, conf, comparison, run_summary)
    except Exception as exc:
        return fail("report", exc)

    summary["exceptions_total"] = len(report.exceptions)
    summary["exceptions_by_field"] = {
        k.value: v for k, v in report.per_field_counts.items()
    }
    summary["clean_matches"] = report.clean_matches
    summary["mean_confidence"] = conf.overall_rounded()
    summary["field_confidence"] = {
        k.value: (round(fc.mean, 3) if fc.mean is not None else None)
        for k, fc in conf.per_field.items()
    }
    summary["model_version"] = batch.model_version
    summary["finished_at"] = stamp(clock.now())
    return PipelineResult(exit_code=0, summary=summary)


def _statement_truth(
    data_dir: Path, batch: ExtractionBatch
) -> dict[str, dict[FieldKind, int | date]] | None:
    """Ground truth as printed on each statement: source values overlaid with
    the injected mutations. Only available for generated corpora."""
    truth_path = data_dir / "truth.csv"
    if not truth_path.exists():
        return None
    from .corpus import doc_id_for  # local import to avoid cycle at module load

    truth = {}
    for record in read_truth_csv(truth_path):
        truth[doc_id_for(record.customer_id)] = {
            kind: record.value(kind) for kind in FIELD_ORDER
        }
    expected_path = data_dir / "expected_exceptions.jsonl"
    if expected_path.exists():
        for exp in read_expected_exceptions(expected_path):
            if exp.doc_id in truth:
                truth[exp.doc_id][exp.field_kind] = exp.statement_value
    if any(ex.doc_id not in truth for ex in batch.extractions):
        return None
    return truth


def _write_reports(data_dir, run_id, metrics, conf, comparison, run_summary) -> None:
    reports = Path(data_dir) / "reports"
    reports.mkdir(exist_ok=True)

    lines = ["field_kind,tp,fp,fn,precision,recall,f1"]
    for m in metrics or []:
        lines.append(
            f"{m.field_kind.value},{m.tp},{m.fp},{m.fn},{m.precision!r},{m.recall!r},{m.f1!r}"
        )
    (reports / "metrics.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")

    cost_lines = [
        "item,amount",
        f"quarterly_manual,{format_cents(comparison.quarterly_manual_cents)}",
        f"annual_manual,{format_cents(comparison.annual_manual_cents)}",
        f"annual_automated,{format_cents(comparison.annual_automated_cents)}",
        f"annual_savings,{format_cents(comparison.annual_savings_cents)}",
    ]
    for year, cents in enumerate(comparison.cumulative_by_year_cents):
        cost_lines.append(f"cumulative_year_{year},{format_cents(cents)}")
    if comparison.recurring_reduction is not None:
        cost_lines.append(f"recurring_reduction,{comparison.recurring_reduction:.4f}")
    if comparison.payback_months is not None:
        cost_lines.append(f"payback_months,{comparison.payback_months:.2f}")
    (reports / "costs.csv").write_text("\n".join(cost_lines) + "\n", encoding="utf-8")

    rows = baseline_comparison(run_summary)
    width = max(len(r.dimension) for r in rows)
    mwidth = max(len(r.manual) for r in rows)
    table = [f"{'Dimension':<{width}}  {'Manual Approach':<{mwidth}}  Automated Approach"]
    table.append("-" * (width + mwidth + 22))
    for r in rows:
        table.append(f"{r.dimension:<{width}}  {r.manual:<{mwidth}}  {r.automated}")
    (reports / "baseline.txt").write_text("\n".join(table) + "\n", encoding="utf-8")

    overview = {
        "run_id": run_id,
        "documents": run_summary.documents_processed,
        "overall_mean_confidence": conf.overall_rounded(),
        "field_confidence": {
            k.value: (round(fc.mean, 6) if fc.mean is not None else None)
            for k, fc in conf.per_field.items()
        },
    }
    (reports / "summary.json").write_text(
        json.dumps(overview, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


def format_summary(summary: dict) -> str:
    """Human-readable run summary printed by the CLI."""
    lines = [f"run {summary.get('run_id', '?')} in {summary.get('data_dir', '?')}"]
    if "failed_stage" in summary:
        lines.append(f"FAILED at stage {summary['failed_stage']}: {summary.get('error')}")
        return "\n".join(lines)
    lines.append(f"documents processed: {summary.get('documents', 0)}")
    mean = summary.get("mean_confidence")
    lines.append(f"mean confidence: {mean if mean is not None else 'n/a'}")
    for kind, value in (summary.get("field_confidence") or {}).items():
        lines.append(f"  {kind}: {value if value is not None else 'n/a'}")
    lines.append(f"exceptions: {summary.get('exceptions_total', 0)}")
    for kind, count in (summary.get("exceptions_by_field") or {}).items():
        lines.append(f"  {kind}: {count}")
    lines.append(f"clean matches: {summary.get('clean_matches', 0)}")
    return "\n".join(lines)
