"""Extractor training, scoring, inference, and batch behavior."""

import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from popaudit.corpus import (
    CorpusConfig,
    DiscrepancyPlan,
    StatementDocument,
    build_corpus,
    write_corpus,
)
from popaudit.extractor import (
    CONFIDENCE_FLOOR,
    TrainingError,
    StageError,
    batch_extract,
    extract_document,
    extraction_from_json,
    extraction_to_json,
    load_model,
    save_model,
    score_confidence,
    train,
)
from popaudit.fields import FIELD_ORDER, FIELD_VALUE_TYPES, FieldKind, default_field_specs
from popaudit.normalize import NormalizedValue, normalize_field


@pytest.fixture(scope="module")
def trained(clean_bundle_module):
    return train(clean_bundle_module.labeled, default_field_specs())


@pytest.fixture(scope="module")
def clean_bundle_module():
    return build_corpus(CorpusConfig(size=20, seed=3), DiscrepancyPlan(), train_count=6)


# --- score_confidence ---------------------------------------------------------


def test_score_confidence_bounds():
    assert score_confidence(1.0, 1.0, 1.0) == 1.0
    assert score_confidence(0.0, 0.0, 0.0) == 0.0
    assert score_confidence(1.0, 1.0, 0.5) == pytest.approx(0.90)


@pytest.mark.parametrize("bad", [-0.1, 1.1, 2.0])
def test_score_confidence_contract(bad):
    with pytest.raises(ValueError):
        score_confidence(bad, 0.5, 0.5)
    with pytest.raises(ValueError):
        score_confidence(0.5, bad, 0.5)
    with pytest.raises(ValueError):
        score_confidence(0.5, 0.5, bad)


@given(
    st.floats(min_value=0, max_value=1),
    st.floats(min_value=0, max_value=1),
    st.floats(min_value=0, max_value=1),
    st.floats(min_value=0, max_value=1),
)
def test_score_confidence_monotone(a, b, p, s):
    lo, hi = sorted((a, b))
    assert score_confidence(lo, p, s) <= score_confidence(hi, p, s)
    assert score_confidence(p, lo, s) <= score_confidence(p, hi, s)
    assert score_confidence(p, s, lo) <= score_confidence(p, s, hi)
    assert 0.0 <= score_confidence(a, p, s) <= 1.0 + 1e-12


# --- training ------------------------------------------------------------------


def test_train_locates_all_labels(trained, clean_bundle_module):
    for ld in clean_bundle_module.labeled:
        extraction = extract_document(trained, ld.document)
        for kind, label in ld.labels.items():
            assert extraction.fields[kind].raw_text == label.raw_text


def test_train_on_20_finds_60_values():
    bundle = build_corpus(CorpusConfig(size=500, seed=42), DiscrepancyPlan(2, 2, 2), train_count=20)
    model = train(bundle.labeled)
    found = 0
    for ld in bundle.labeled:
        extraction = extract_document(model, ld.document)
        for kind, label in ld.labels.items():
            if extraction.fields[kind].raw_text == label.raw_text:
                found += 1
    assert found == 60


def test_train_single_document(clean_bundle_module):
    model = train(clean_bundle_module.labeled[:1])
    for fm in model.fields.values():
        assert len(fm.anchors) >= 1
        assert fm.pattern_candidate
        assert 0.0 <= fm.prior.mean <= 1.0
        assert fm.prior.spread >= 0.0


def test_train_empty_corpus():
    with pytest.raises(TrainingError):
        train([])


def test_train_missing_label(clean_bundle_module):
    from dataclasses import replace

    ld = clean_bundle_module.labeled[0]
    broken = replace(ld, labels={k: v for k, v in ld.labels.items() if k is not FieldKind.DUE_DATE})
    with pytest.raises(TrainingError, match="due_date"):
        train([broken])


def test_train_order_invariant(tmp_path, clean_bundle_module):
    labeled = clean_bundle_module.labeled
    m1 = train(labeled)
    m2 = train(list(reversed(labeled)))
    save_model(m1, tmp_path / "a.json")
    save_model(m2, tmp_path / "b.json")
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_model_round_trip(tmp_path, trained):
    save_model(trained, tmp_path / "model.json")
    loaded = load_model(tmp_path / "model.json")
    assert loaded == trained


# --- extraction -----------------------------------------------------------------


def test_extract_clean_statement_high_confidence(trained, clean_bundle_module):
    # a document drawn from the training distribution scores well above 0.9,
    # and the reported confidence equals the blend formula computed by hand
    import math

    doc = clean_bundle_module.labeled[0].document
    extraction = extract_document(trained, doc)
    slot = extraction.fields[FieldKind.MINIMUM_PAYMENT]
    assert slot.raw_text is not None
    assert slot.confidence > 0.9

    prior = trained.fields[FieldKind.MINIMUM_PAYMENT].prior
    pos = slot.line_index / (len(doc.lines) - 1)
    expected_position = math.exp(-abs(pos - prior.mean) / max(prior.spread, 0.05))
    # label line carries every anchor keyword and a full-format value
    expected = 0.5 * 1.0 + 0.3 * 1.0 + 0.2 * expected_position
    assert slot.confidence == pytest.approx(expected)


def test_extract_missing_line_yields_absent(trained, clean_bundle_module):
    doc = clean_bundle_module.documents[0]
    kept = tuple(l for l in doc.lines if "Statement Balance" not in l)
    stripped = StatementDocument(
        doc_id=doc.doc_id,
        customer_id=doc.customer_id,
        lines=kept,
        template_id=doc.template_id,
        uri=doc.uri,
    )
    extraction = extract_document(trained, stripped)
    slot = extraction.fields[FieldKind.STATEMENT_BALANCE]
    assert slot.raw_text is None
    assert slot.confidence == 0.0
    assert slot.line_index is None
    # the other fields are unaffected
    assert extraction.fields[FieldKind.MINIMUM_PAYMENT].raw_text is not None


def test_extract_is_pure(trained, clean_bundle_module):
    doc = clean_bundle_module.documents[0]
    assert extract_document(trained, doc) == extract_document(trained, doc)


def test_confidence_monotone_under_anchor_degradation(trained, clean_bundle_module):
    """Deleting anchor words from the label line never raises confidence."""
    doc = clean_bundle_module.documents[0]
    base = extract_document(trained, doc).fields[FieldKind.MINIMUM_PAYMENT]
    lines = list(doc.lines)
    idx = base.line_index
    degraded_line = lines[idx].replace("Minimum ", "").replace("Payment ", "")
    lines[idx] = degraded_line
    degraded_doc = StatementDocument(
        doc_id=doc.doc_id,
        customer_id=doc.customer_id,
        lines=tuple(lines),
        template_id=doc.template_id,
        uri=doc.uri,
    )
    degraded = extract_document(trained, degraded_doc).fields[FieldKind.MINIMUM_PAYMENT]
    assert degraded.confidence <= base.confidence


def test_held_out_population_normalizes_to_truth(clean_bundle_module):
    """Raw values on clean held-out docs normalize to the source values."""
    bundle = clean_bundle_module
    model = train(bundle.labeled)
    training_ids = {ld.document.doc_id for ld in bundle.labeled}
    by_customer = {r.customer_id: r for r in bundle.records}
    held_out = [d for d in bundle.documents if d.doc_id not in training_ids]
    assert held_out
    for doc in held_out:
        record = by_customer[doc.customer_id]
        extraction = extract_document(model, doc)
        for kind in FIELD_ORDER:
            slot = extraction.fields[kind]
            normalized = normalize_field(FIELD_VALUE_TYPES[kind], slot.raw_text)
            assert isinstance(normalized, NormalizedValue), (doc.doc_id, kind)
            assert normalized.canonical == record.value(kind)


# --- batch ------------------------------------------------------------------------


def test_batch_extract_counts(tmp_path, trained, clean_bundle_module):
    write_corpus(clean_bundle_module, tmp_path)
    batch = batch_extract(trained, tmp_path / "stage")
    assert batch.document_count == len(clean_bundle_module.documents)
    assert [e.doc_id for e in batch.extractions] == sorted(
        e.doc_id for e in batch.extractions
    )


def test_batch_extract_empty_stage(tmp_path, trained):
    stage = tmp_path / "stage"
    stage.mkdir()
    batch = batch_extract(trained, stage)
    assert batch.document_count == 0
    assert batch.extractions == []


def test_batch_extract_missing_stage(tmp_path, trained):
    with pytest.raises(StageError):
        batch_extract(trained, tmp_path / "nope")


def test_batch_extract_malformed_file_is_isolated(tmp_path, trained, clean_bundle_module):
    write_corpus(clean_bundle_module, tmp_path)
    bad = tmp_path / "stage" / "stmt_CUST-99999.txt"
    bad.write_bytes(b"\xff\xfe\x00 invalid utf-8 \x80")
    batch = batch_extract(trained, tmp_path / "stage")
    assert batch.document_count == len(clean_bundle_module.documents) + 1
    flagged = [e for e in batch.extractions if e.read_error]
    assert len(flagged) == 1
    assert flagged[0].doc_id == "stmt_CUST-99999"
    assert all(not fe.present for fe in flagged[0].fields.values())


def test_batch_extract_repeatable(tmp_path, trained, clean_bundle_module):
    write_corpus(clean_bundle_module, tmp_path)
    one = batch_extract(trained, tmp_path / "stage")
    two = batch_extract(trained, tmp_path / "stage")
    as_json = lambda b: [json.dumps(extraction_to_json(e), sort_keys=True) for e in b.extractions]
    assert as_json(one) == as_json(two)


def test_extraction_json_round_trip(trained, clean_bundle_module):
    extraction = extract_document(trained, clean_bundle_module.documents[0])
    assert extraction_from_json(extraction_to_json(extraction)) == extraction


def test_confidence_floor_respected(trained, clean_bundle_module):
    for doc in clean_bundle_module.documents:
        for slot in extract_document(trained, doc).fields.values():
            assert slot.confidence == 0.0 or slot.confidence >= CONFIDENCE_FLOOR
