"""Metric identities, confidence aggregation, and the cost model."""

import random
from datetime import date
from decimal import Decimal

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from popaudit.extractor import ABSENT, DocumentExtraction, FieldExtraction
from popaudit.fields import FIELD_ORDER, FieldKind
from popaudit.metrics import (
    CostParams,
    MetricsError,
    RunSummary,
    baseline_comparison,
    confidence_summary,
    confidence_summary_from_aggregates,
    cost_model,
    field_metrics,
    format_cents,
)

MP, DD, BAL = FieldKind.MINIMUM_PAYMENT, FieldKind.DUE_DATE, FieldKind.STATEMENT_BALANCE


def doc(doc_id, mp_raw, dd_raw, bal_raw, conf=0.9):
    def slot(raw):
        if raw is None:
            return ABSENT
        return FieldExtraction(raw_text=raw, confidence=conf, line_index=1)

    return DocumentExtraction(
        doc_id=doc_id,
        customer_id=doc_id,
        fields={MP: slot(mp_raw), DD: slot(dd_raw), BAL: slot(bal_raw)},
        model_version="m",
    )


def truth_for(doc_id, mp=2500, dd=date(2024, 4, 5), bal=100000):
    return {MP: mp, DD: dd, BAL: bal}


# --- field metrics ----------------------------------------------------------


def test_perfect_run_all_ones():
    docs = [doc(f"d{i}", "$25.00", "04/05/2024", "$1,000.00") for i in range(10)]
    truth = {f"d{i}": truth_for(f"d{i}") for i in range(10)}
    for m in field_metrics(docs, truth):
        assert (m.precision, m.recall, m.f1) == (1.0, 1.0, 1.0)
        assert (m.tp, m.fp, m.fn) == (10, 0, 0)
        assert not m.precision_undefined


def test_one_mismatch_in_ten():
    # hand-counted oracle: 9 tp, 1 fp, 0 fn -> p 0.9, r 1.0, f1 18/19
    docs = [doc(f"d{i}", "$25.00", "04/05/2024", "$1,000.00") for i in range(9)]
    docs.append(doc("d9", "$26.00", "04/05/2024", "$1,000.00"))
    truth = {f"d{i}": truth_for(f"d{i}") for i in range(10)}
    m = next(m for m in field_metrics(docs, truth) if m.field_kind is MP)
    assert (m.tp, m.fp, m.fn) == (9, 1, 0)
    assert m.precision == pytest.approx(0.9)
    assert m.recall == 1.0
    assert m.f1 == pytest.approx(2 * 0.9 / 1.9)
    assert m.f1 == pytest.approx(0.9474, abs=5e-5)


def test_all_missing_degenerate():
    docs = [doc(f"d{i}", None, None, None) for i in range(5)]
    truth = {f"d{i}": truth_for(f"d{i}") for i in range(5)}
    for m in field_metrics(docs, truth):
        assert (m.tp, m.fp, m.fn) == (0, 0, 5)
        assert m.precision_undefined
        assert m.precision == 1.0
        assert m.recall == 0.0
        assert m.f1 == 0.0


def test_unparsable_counts_as_fn():
    docs = [doc("d0", "1.2.3", "04/05/2024", "$1,000.00")]
    truth = {"d0": truth_for("d0")}
    m = next(m for m in field_metrics(docs, truth) if m.field_kind is MP)
    assert (m.tp, m.fp, m.fn) == (0, 0, 1)


def test_ground_truth_gap_raises():
    with pytest.raises(MetricsError, match="d1"):
        field_metrics([doc("d1", "$25.00", "04/05/2024", "$1.00")], {})


def test_population_conservation_random_against_counting_oracle():
    """Randomized fixture: production counts equal a direct tally."""
    rng = random.Random(99)
    docs, truth, tally = [], {}, {k: {"tp": 0, "fp": 0, "fn": 0} for k in FIELD_ORDER}
    for i in range(200):
        doc_id = f"d{i}"
        truth[doc_id] = truth_for(doc_id)
        raws = {}
        for kind, good, bad in (
            (MP, "$25.00", "$30.00"),
            (DD, "04/05/2024", "04/09/2024"),
            (BAL, "$1,000.00", "$990.00"),
        ):
            roll = rng.random()
            if roll < 0.7:
                raws[kind] = good
                tally[kind]["tp"] += 1
            elif roll < 0.85:
                raws[kind] = bad
                tally[kind]["fp"] += 1
            elif roll < 0.95:
                raws[kind] = None
                tally[kind]["fn"] += 1
            else:
                raws[kind] = "not-a-value"
                tally[kind]["fn"] += 1
        docs.append(doc(doc_id, raws[MP], raws[DD], raws[BAL]))
    for m in field_metrics(docs, truth):
        t = tally[m.field_kind]
        assert (m.tp, m.fp, m.fn) == (t["tp"], t["fp"], t["fn"])
        assert m.tp + m.fp + m.fn == 200


# --- confidence summary ------------------------------------------------------


def test_overall_mean_from_reported_aggregates():
    summary = confidence_summary_from_aggregates(
        [(MP, 0.89, 500), (DD, 0.675, 500), (BAL, 0.779, 500)]
    )
    assert summary.overall_rounded(3) == pytest.approx(0.781, abs=5e-4)
    assert summary.overall_mean == pytest.approx((0.89 + 0.675 + 0.779) / 3)


def test_single_extraction_mean():
    d = doc("d0", "$25.00", None, None, conf=0.5)
    summary = confidence_summary([d])
    assert summary.per_field[MP].mean == 0.5
    assert summary.overall_mean == 0.5
    assert summary.per_field[DD].mean is None
    assert summary.per_field[DD].absent_count == 1


def test_empty_batch_summary_undefined():
    summary = confidence_summary([])
    assert summary.undefined
    assert summary.overall_mean is None
    assert all(fc.count == 0 for fc in summary.per_field.values())


def test_absent_fields_excluded_from_means():
    docs = [doc("a", "$1.00", None, None, conf=0.8), doc("b", None, None, None)]
    summary = confidence_summary(docs)
    assert summary.per_field[MP].mean == pytest.approx(0.8)
    assert summary.per_field[MP].count == 1
    assert summary.per_field[MP].absent_count == 1


@given(st.lists(st.floats(min_value=0, max_value=1), min_size=2, max_size=30))
@settings(max_examples=50)
def test_regrouping_invariance(confs):
    """Overall mean is invariant under re-partitioning of equal-count groups."""
    rows = [doc(f"d{i}", "$1.00", None, None, conf=c) for i, c in enumerate(confs)]
    whole = confidence_summary(rows).overall_mean
    mid = len(rows) // 2
    a = confidence_summary(rows[:mid])
    b = confidence_summary(rows[mid:])
    merged = confidence_summary_from_aggregates(
        [
            (MP, a.per_field[MP].mean or 0.0, a.per_field[MP].count),
            (DD, b.per_field[MP].mean or 0.0, b.per_field[MP].count),  # kinds are just bucket labels here
        ]
    )
    assert merged.overall_mean == pytest.approx(whole)


# --- cost model ------------------------------------------------------------------


def test_cost_model_reference_figures():
    c = cost_model(CostParams(), years=3)
    assert c.quarterly_manual_cents == 31_875_00
    assert c.annual_manual_cents == 127_500_00
    assert c.annual_automated_cents == 5_000_00
    assert c.annual_savings_cents == 122_500_00
    assert c.cumulative_by_year_cents == [-9_000_00, 113_500_00, 236_000_00, 358_500_00]
    assert c.recurring_reduction == pytest.approx(122_500 / 127_500)
    assert c.recurring_reduction > 0.94
    assert c.payback_months == pytest.approx(9000 / (122_500 / 12))
    assert c.payback_months < 1.0


def test_cost_model_zero_one_time():
    c = cost_model(CostParams(one_time_cost=Decimal(0)))
    assert c.payback_months == 0.0
    assert c.cumulative_by_year_cents[0] == 0


def test_cost_model_linearity():
    base = cost_model(CostParams())
    doubled = cost_model(CostParams(per_doc_cost=Decimal("0.045"), one_time_cost=Decimal("18000")))
    assert doubled.payback_months == pytest.approx(base.payback_months * 2)
    # cumulative series is affine in the year index
    diffs = {
        b - a
        for a, b in zip(base.cumulative_by_year_cents, base.cumulative_by_year_cents[1:])
    }
    assert diffs == {base.annual_savings_cents}


def test_cost_model_zero_manual_flags_reduction():
    c = cost_model(CostParams(sample_size=0))
    assert c.annual_manual_cents == 0
    assert c.recurring_reduction is None


def test_cost_model_rejects_negative():
    with pytest.raises(MetricsError):
        cost_model(CostParams(auditors=-1))


def test_format_cents():
    assert format_cents(123456) == "$1,234.56"
    assert format_cents(-900000) == "-$9,000.00"


# --- baseline table ------------------------------------------------------------------


def test_baseline_full_population():
    run = RunSummary(documents_processed=500, population=500, mean_confidence=0.781)
    rows = {r.dimension: r for r in baseline_comparison(run)}
    assert rows["Documents reviewed"].automated == "Full population (100%)"
    assert rows["Documents reviewed"].manual == "Sample-based (e.g., 0.5%)"
    assert "0.781" in rows["Confidence reporting"].automated
    assert rows["Sampling risk"].automated == "Eliminated"
    assert len(rows) == 8


def test_baseline_empty_run_no_fault():
    rows = baseline_comparison(RunSummary(documents_processed=0, population=0))
    assert any("0%" in r.automated for r in rows)
    assert all(r.manual for r in rows)
