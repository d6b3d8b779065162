"""Single command-line entry point for the whole testing lifecycle.

Exit codes: 0 success, 1 stage failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .clock import FixedClock, SystemClock, parse_instant
from .corpus import (
    ConfigError,
    CorpusConfig,
    DiscrepancyPlan,
    build_corpus,
    read_labeled_corpus,
    read_truth_csv,
    write_corpus,
)
from .extractor import batch_extract, extraction_to_json, load_model, save_model, train
from .metrics import RunSummary, baseline_comparison, confidence_summary, cost_model, field_metrics, format_cents
from .pipeline import PipelineConfig, format_summary, load_config, run_pipeline
from .reconcile import reconcile_population
from .store import EvidenceStore


def _parse_inject(text: str) -> DiscrepancyPlan:
    """Parse the mp=2,dd=2,bal=2 injection shorthand."""
    counts = {"mp": 0, "dd": 0, "bal": 0}
    if text:
        for part in text.split(","):
            key, _, value = part.partition("=")
            key = key.strip()
            if key not in counts or not value.strip().isdigit():
                raise ConfigError(f"bad --inject entry {part!r}; expected mp=N,dd=N,bal=N")
            counts[key] = int(value)
    return DiscrepancyPlan(
        minimum_payment=counts["mp"], due_date=counts["dd"], statement_balance=counts["bal"]
    )


def _clock_from(args) -> SystemClock | FixedClock:
    if getattr(args, "now", None):
        return FixedClock(parse_instant(args.now))
    return SystemClock()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="popaudit")
    sub = parser.add_subparsers(dest="command", required=True)

    corpus_p = sub.add_parser("corpus", help="synthetic corpus generation")
    corpus_sub = corpus_p.add_subparsers(dest="subcommand", required=True)
    gen = corpus_sub.add_parser("gen", help="generate statements, truth, labels")
    gen.add_argument("--size", type=int, default=500)
    gen.add_argument("--seed", type=int, default=42)
    gen.add_argument("--inject", default="", help="e.g. mp=2,dd=2,bal=2")
    gen.add_argument("--out", required=True)
    gen.add_argument("--period", default="2024-03")
    gen.add_argument("--train-count", type=int, default=20)

    extract_p = sub.add_parser("extract", help="model training and batch inference")
    extract_sub = extract_p.add_subparsers(dest="subcommand", required=True)
    tr = extract_sub.add_parser("train", help="train a model from a labeled corpus")
    tr.add_argument("--corpus", required=True, help="labeled.jsonl file or directory holding one")
    tr.add_argument("--out", required=True)
    ru = extract_sub.add_parser("run", help="batch extraction over a stage")
    ru.add_argument("--model", required=True)
    ru.add_argument("--stage", required=True)
    ru.add_argument("--out", required=True)
    ru.add_argument("--now", default=None, help="pin timestamps to this ISO-8601 instant")

    rec = sub.add_parser("reconcile", help="reconcile a persisted run against truth.csv")
    rec.add_argument("--data", required=True)
    rec.add_argument("--run-id", required=True)
    rec.add_argument("--now", default=None)

    rep = sub.add_parser("report", help="metrics, cost, and baseline reports")
    rep_sub = rep.add_subparsers(dest="subcommand", required=True)
    rm = rep_sub.add_parser("metrics")
    rm.add_argument("--data", required=True)
    rm.add_argument("--run-id", default=None)
    rc = rep_sub.add_parser("costs")
    rc.add_argument("--years", type=int, default=3)
    rc.add_argument("--config", default=None)
    rb = rep_sub.add_parser("baseline")
    rb.add_argument("--data", required=True)
    rb.add_argument("--run-id", default=None)

    pipe = sub.add_parser("pipeline", help="run the full lifecycle")
    pipe_sub = pipe.add_subparsers(dest="subcommand", required=True)
    pr = pipe_sub.add_parser("run")
    pr.add_argument("--data", required=True)
    pr.add_argument("--seed", type=int, default=None)
    pr.add_argument("--size", type=int, default=None)
    pr.add_argument("--inject", default=None)
    pr.add_argument("--config", default=None)
    pr.add_argument("--run-id", default=None)
    pr.add_argument("--no-gen", action="store_true")
    pr.add_argument("--now", default=None)

    srv = sub.add_parser("serve", help="start the triage HTTP service")
    srv.add_argument("--data", required=True)
    srv.add_argument("--port", type=int, default=8600)
    srv.add_argument("--ui", default=None, help="static dashboard directory to mount at /")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _dispatch(args) -> int:
    if args.command == "corpus" and args.subcommand == "gen":
        config = CorpusConfig(size=args.size, seed=args.seed, period=args.period)
        plan = _parse_inject(args.inject)
        bundle = build_corpus(config, plan, train_count=args.train_count)
        write_corpus(bundle, Path(args.out))
        print(
            f"generated {len(bundle.documents)} statements, "
            f"{len(bundle.labeled)} labeled, "
            f"{len(bundle.expected_exceptions)} expected exceptions -> {args.out}"
        )
        return 0

    if args.command == "extract" and args.subcommand == "train":
        corpus_path = Path(args.corpus)
        if corpus_path.is_dir():
            corpus_path = corpus_path / "labeled.jsonl"
        labeled = read_labeled_corpus(corpus_path)
        model = train(labeled)
        save_model(model, Path(args.out))
        print(f"trained {model.model_version} on {len(labeled)} documents -> {args.out}")
        return 0

    if args.command == "extract" and args.subcommand == "run":
        model = load_model(Path(args.model))
        batch = batch_extract(model, Path(args.stage), _clock_from(args))
        with open(args.out, "w", encoding="utf-8") as fh:
            for ex in batch.extractions:
                fh.write(json.dumps(extraction_to_json(ex), sort_keys=True) + "\n")
        print(f"extracted {batch.document_count} documents -> {args.out}")
        return 0

    if args.command == "reconcile":
        data = Path(args.data)
        clock = _clock_from(args)
        store = EvidenceStore(data, clock=clock)
        extractions = store.load_raw(args.run_id)
        from .extractor import ExtractionBatch

        model_version = extractions[0].model_version if extractions else "none"
        batch = ExtractionBatch(extractions=extractions, model_version=model_version)
        if not (store.run_dir(args.run_id) / "flat.csv").exists():
            store.flatten(args.run_id)
        truth_path = data / "truth.csv"
        truth = read_truth_csv(truth_path) if truth_path.exists() else []
        report = reconcile_population(batch, truth, clock=clock, run_id=args.run_id)
        store.record_exceptions(report, args.run_id)
        counts = ", ".join(f"{k.value}={v}" for k, v in report.per_field_counts.items())
        print(f"reconciled {report.population} documents: {len(report.exceptions)} exceptions ({counts})")
        return 0

    if args.command == "report":
        return _report(args)

    if args.command == "pipeline" and args.subcommand == "run":
        if args.config:
            config = load_config(Path(args.config), data_dir=Path(args.data))
        else:
            config = PipelineConfig(data_dir=Path(args.data))
        if args.seed is not None:
            config.corpus = CorpusConfig(
                size=config.corpus.size if args.size is None else args.size,
                seed=args.seed,
                period=config.corpus.period,
            )
        elif args.size is not None:
            config.corpus = CorpusConfig(
                size=args.size, seed=config.corpus.seed, period=config.corpus.period
            )
        if args.inject is not None:
            config.plan = _parse_inject(args.inject)
        elif not args.config and args.inject is None:
            # reference-experiment default: two injected discrepancies per field
            config.plan = DiscrepancyPlan(minimum_payment=2, due_date=2, statement_balance=2)
        if args.run_id:
            config.run_id = args.run_id
        if args.no_gen:
            config.generate = False
        result = run_pipeline(config, _clock_from(args))
        print(format_summary(result.summary))
        return result.exit_code

    if args.command == "serve":
        from .service import serve

        serve(Path(args.data), args.port, ui_dir=Path(args.ui) if args.ui else None)
        return 0

    raise ConfigError(f"unknown command {args.command!r}")


def _report(args) -> int:
    if args.subcommand == "costs":
        if args.config:
            config = load_config(Path(args.config))
            params = config.cost
        else:
            from .metrics import CostParams

            params = CostParams()
        comparison = cost_model(params, years=args.years)
        print(f"quarterly manual cost:  {format_cents(comparison.quarterly_manual_cents)}")
        print(f"annual manual cost:     {format_cents(comparison.annual_manual_cents)}")
        print(f"annual automated cost:  {format_cents(comparison.annual_automated_cents)}")
        print(f"annual savings:         {format_cents(comparison.annual_savings_cents)}")
        for year, cents in enumerate(comparison.cumulative_by_year_cents):
            print(f"cumulative year {year}:      {format_cents(cents)}")
        if comparison.recurring_reduction is not None:
            print(f"recurring reduction:    {comparison.recurring_reduction:.1%}")
        if comparison.payback_months is not None:
            print(f"payback months:         {comparison.payback_months:.2f}")
        return 0

    data = Path(args.data)
    store = EvidenceStore(data)
    run = store.latest_run() if args.run_id is None else None
    run_id = args.run_id or (run.run_id if run else None)
    if run_id is None:
        raise ConfigError("no runs in store; run the pipeline first")
    extractions = store.load_raw(run_id)

    if args.subcommand == "metrics":
        from .pipeline import _statement_truth
        from .extractor import ExtractionBatch

        batch = ExtractionBatch(
            extractions=extractions,
            model_version=extractions[0].model_version if extractions else "none",
        )
        truth = _statement_truth(data, batch)
        if truth is None:
            raise ConfigError("no ground truth available for metrics")
        print("field_kind,tp,fp,fn,precision,recall,f1")
        for m in field_metrics(extractions, truth):
            print(
                f"{m.field_kind.value},{m.tp},{m.fp},{m.fn},"
                f"{m.precision:.4f},{m.recall:.4f},{m.f1:.4f}"
            )
        return 0

    if args.subcommand == "baseline":
        conf = confidence_summary(extractions)
        summary = RunSummary(
            documents_processed=len(extractions),
            population=len(extractions) or 0,
            metrics=[],
            mean_confidence=conf.overall_mean,
        )
        for row in baseline_comparison(summary):
            print(f"{row.dimension:22} | {row.manual:28} | {row.automated}")
        return 0

    raise ConfigError(f"unknown report {args.subcommand!r}")


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
