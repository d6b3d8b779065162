#!/usr/bin/env python3
"""Run the reference experiment end to end and print the headline numbers.

Builds the seeded 500-statement population with two injected discrepancies
per field, trains on 20 labeled statements, extracts and reconciles the full
population, and prints the exception breakdown, extraction metrics, and the
cost comparison tables.

Usage: python scripts/reproduce_results.py [--data DIR] [--seed N]
"""

import argparse
import json
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from popaudit.corpus import CorpusConfig, DiscrepancyPlan, read_expected_exceptions
from popaudit.extractor import ExtractionBatch
from popaudit.fields import FIELD_ORDER
from popaudit.metrics import (
    CostParams,
    RunSummary,
    baseline_comparison,
    confidence_summary,
    cost_model,
    field_metrics,
    format_cents,
)
from popaudit.pipeline import PipelineConfig, _statement_truth, run_pipeline
from popaudit.store import EvidenceStore


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--data", default="data")
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--size", type=int, default=500)
    args = parser.parse_args()

    config = PipelineConfig(
        data_dir=Path(args.data),
        corpus=CorpusConfig(size=args.size, seed=args.seed),
        plan=DiscrepancyPlan(minimum_payment=2, due_date=2, statement_balance=2),
        train_count=20,
    )
    started = time.monotonic()
    result = run_pipeline(config)
    elapsed = time.monotonic() - started
    if result.exit_code != 0:
        print(f"pipeline failed: {result.summary}")
        return result.exit_code

    s = result.summary
    print(f"processed {s['documents']} statements in {elapsed:.2f}s")
    print(f"overall mean confidence: {s['mean_confidence']}")
    for kind, value in s["field_confidence"].items():
        print(f"  {kind}: {value}")
    print(f"exceptions: {s['exceptions_total']}")
    for kind, count in s["exceptions_by_field"].items():
        print(f"  {kind}: {count}")

    store = EvidenceStore(config.data_dir)
    ledger = store.load_ledger()
    expected = read_expected_exceptions(config.data_dir / "expected_exceptions.jsonl")
    planted = {(e.doc_id, e.field_kind) for e in expected}
    found = {(e.doc_id, e.field_kind) for e in ledger.values()}
    print(f"planted discrepancies recovered: {len(found & planted)}/{len(planted)}, "
          f"false positives: {len(found - planted)}")

    extractions = store.load_raw(s["run_id"])
    manifest = json.loads((config.data_dir / "model.json").read_text())["manifest"]
    held_out = [e for e in extractions if e.doc_id not in set(manifest["doc_ids"])]
    truth = _statement_truth(
        config.data_dir, ExtractionBatch(extractions=extractions, model_version=s["model_version"])
    )
    print(f"\nheld-out extraction metrics ({len(held_out)} statements):")
    metrics = field_metrics(held_out, truth)
    for m in metrics:
        print(f"  {m.field_kind.value}: precision={m.precision:.2f} recall={m.recall:.2f} f1={m.f1:.2f}")

    print("\ncost comparison:")
    c = cost_model(CostParams())
    print(f"  quarterly manual:  {format_cents(c.quarterly_manual_cents)}")
    print(f"  annual manual:     {format_cents(c.annual_manual_cents)}")
    print(f"  annual automated:  {format_cents(c.annual_automated_cents)}")
    for year, cents in enumerate(c.cumulative_by_year_cents):
        print(f"  cumulative year {year}: {format_cents(cents)}")
    print(f"  recurring reduction: {c.recurring_reduction:.1%}, payback {c.payback_months:.2f} months")

    print("\nbaseline comparison:")
    conf = confidence_summary(extractions)
    run = RunSummary(
        documents_processed=len(extractions),
        population=len(extractions),
        metrics=metrics,
        mean_confidence=conf.overall_mean,
        runtime_seconds=elapsed,
    )
    for row in baseline_comparison(run):
        print(f"  {row.dimension:22} | {row.manual:28} | {row.automated}")

    print(f"\nartifacts in {config.data_dir}; serve the triage API with:")
    print(f"  popaudit serve --data {config.data_dir} --port 8600")
    return 0


if __name__ == "__main__":
    sys.exit(main())
