"""Trainable anchor/pattern field extractor with explicit confidence scoring.

The model learns, per target field, the keyword phrases of the lines that
carry labeled values, a value-shape pattern for the field's type, and a prior
over where in the document the field tends to sit. Inference scores every
candidate (line, value span) and keeps the best one per field:

    confidence = 0.5 * anchor + 0.3 * pattern + 0.2 * position

A line is a candidate only if it shares at least one keyword with a learned
anchor phrase; without that gate a document missing its balance line would
happily "extract" the minimum payment instead of reporting the field absent.
The whole engine is deliberately swappable: anything that produces
DocumentExtraction records can replace it.
"""

from __future__ import annotations

import hashlib
import json
import math
import re
import statistics
from dataclasses import dataclass
from pathlib import Path

from .clock import Clock, stamp
from .corpus import MONTH_NAMES, LabeledDocument, StatementDocument
from .fields import (
    FieldKind,
    FieldSpec,
    ValueType,
    default_field_specs,
    spec_fingerprint,
    validate_spec_set,
)

ANCHOR_WEIGHT = 0.5
PATTERN_WEIGHT = 0.3
POSITION_WEIGHT = 0.2
MIN_PRIOR_SPREAD = 0.05
CONFIDENCE_FLOOR = 0.2  # below this an extraction is reported absent


class TrainingError(ValueError):
    pass


class StageError(OSError):
    pass


_MONTH_ALT = "|".join(MONTH_NAMES)

# candidate shapes must carry a currency marker ($, decimal point, or comma
# grouping) or a date separator; bare integers are never value candidates
_CURRENCY_CANDIDATE = (
    r"\$\s?\d{1,3}(?:,\d{3})+(?:\.\d+)?"
    r"|\$\s?\d+(?:\.\d+)?"
    r"|\d{1,3}(?:,\d{3})+(?:\.\d+)?"
    r"|\d+\.\d+"
)
_CURRENCY_FULL = r"\$?(?:\d{1,3}(?:,\d{3})+|\d+)\.\d{2}"

_DATE_CANDIDATE = (
    r"\d{1,2}/\d{1,2}/\d{2,4}"
    r"|\d{4}-\d{1,2}-\d{1,2}"
    rf"|(?:{_MONTH_ALT})\s+\d{{1,2}},\s*\d{{4}}"
)
_DATE_FULL = (
    r"\d{1,2}/\d{1,2}/\d{4}"
    r"|\d{4}-\d{2}-\d{2}"
    rf"|(?:{_MONTH_ALT}) \d{{1,2}}, \d{{4}}"
)

VALUE_PATTERNS: dict[ValueType, dict[str, str]] = {
    ValueType.CURRENCY: {"candidate": _CURRENCY_CANDIDATE, "full": _CURRENCY_FULL},
    ValueType.DATE: {"candidate": _DATE_CANDIDATE, "full": _DATE_FULL},
}

_TOKEN_RE = re.compile(r"[a-z0-9]+")


def tokenize(text: str) -> tuple[str, ...]:
    return tuple(_TOKEN_RE.findall(text.lower()))


@dataclass(frozen=True)
class PositionalPrior:
    mean: float  # normalized line position in [0, 1]
    spread: float


@dataclass(frozen=True)
class FieldModel:
    anchors: tuple[tuple[str, ...], ...]  # ranked keyword phrases
    anchor_counts: tuple[int, ...]
    pattern_candidate: str
    pattern_full: str
    prior: PositionalPrior
    value_type: ValueType


@dataclass(frozen=True)
class TrainedModel:
    fields: dict[FieldKind, FieldModel]
    model_version: str
    manifest: dict  # doc_ids, prompts, spec_hash


@dataclass(frozen=True)
class FieldExtraction:
    raw_text: str | None
    confidence: float
    line_index: int | None

    @property
    def present(self) -> bool:
        return self.raw_text is not None


ABSENT = FieldExtraction(raw_text=None, confidence=0.0, line_index=None)


@dataclass(frozen=True)
class DocumentExtraction:
    doc_id: str
    customer_id: str
    fields: dict[FieldKind, FieldExtraction]
    model_version: str
    extracted_at: str = ""
    read_error: bool = False


@dataclass(frozen=True)
class ExtractionBatch:
    extractions: list[DocumentExtraction]
    model_version: str

    @property
    def document_count(self) -> int:
        return len(self.extractions)


def score_confidence(anchor_score: float, pattern_score: float, position_score: float) -> float:
    """Weighted blend of the three evidence signals; monotone in each."""
    for name, value in (
        ("anchor_score", anchor_score),
        ("pattern_score", pattern_score),
        ("position_score", position_score),
    ):
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"{name} must be in [0, 1], got {value}")
    return ANCHOR_WEIGHT * anchor_score + PATTERN_WEIGHT * pattern_score + POSITION_WEIGHT * position_score


def train(labeled: list[LabeledDocument], specs: list[FieldSpec] | None = None) -> TrainedModel:
    """Learn anchors, value patterns, and positional priors from labels.

    The returned model is canonical: training-document order does not affect
    the serialized output, and applying the model back to its own training
    set reproduces every label.
    """
    specs = specs if specs is not None else default_field_specs()
    validate_spec_set(specs)
    if not labeled:
        raise TrainingError("training corpus is empty")

    field_models: dict[FieldKind, FieldModel] = {}
    for spec in specs:
        phrase_counts: dict[tuple[str, ...], int] = {}
        positions: list[float] = []
        for ld in labeled:
            label = ld.labels.get(spec.kind)
            if label is None:
                raise TrainingError(
                    f"document {ld.document.doc_id} has no label for field {spec.kind.value}"
                )
            line_idx = _label_line(ld.document, label.raw_text, spec.kind)
            line = ld.document.lines[line_idx]
            phrase = tokenize(line.replace(label.raw_text, " "))
            if not phrase:
                raise TrainingError(
                    f"label line for {spec.kind.value} in {ld.document.doc_id} has no anchor words"
                )
            phrase_counts[phrase] = phrase_counts.get(phrase, 0) + 1
            positions.append(_normalized_position(line_idx, len(ld.document.lines)))

        ranked = sorted(phrase_counts.items(), key=lambda item: (-item[1], item[0]))
        mean = statistics.fmean(positions)
        spread = statistics.pstdev(positions) if len(positions) > 1 else 0.0
        patterns = VALUE_PATTERNS[spec.value_type]
        field_models[spec.kind] = FieldModel(
            anchors=tuple(phrase for phrase, _ in ranked),
            anchor_counts=tuple(count for _, count in ranked),
            pattern_candidate=patterns["candidate"],
            pattern_full=patterns["full"],
            prior=PositionalPrior(mean=mean, spread=spread),
            value_type=spec.value_type,
        )

    manifest = {
        "doc_ids": sorted(ld.document.doc_id for ld in labeled),
        "prompts": {s.kind.value: s.prompt for s in sorted(specs, key=lambda s: s.kind.value)},
        "spec_hash": spec_fingerprint(specs),
    }
    body = _model_json(field_models, manifest)
    version = "anchor-v1-" + hashlib.sha256(
        json.dumps(body, sort_keys=True).encode("utf-8")
    ).hexdigest()[:12]
    model = TrainedModel(fields=field_models, model_version=version, manifest=manifest)

    _check_training_fidelity(model, labeled)
    return model


def _label_line(doc: StatementDocument, raw_text: str, kind: FieldKind) -> int:
    hits = [i for i, line in enumerate(doc.lines) if raw_text in line]
    if len(hits) != 1:
        raise TrainingError(
            f"label {raw_text!r} for {kind.value} occurs {len(hits)} times in {doc.doc_id}"
        )
    return hits[0]


def _normalized_position(line_idx: int, total_lines: int) -> float:
    if total_lines <= 1:
        return 0.0
    return line_idx / (total_lines - 1)


def _check_training_fidelity(model: TrainedModel, labeled: list[LabeledDocument]) -> None:
    for ld in labeled:
        extraction = extract_document(model, ld.document)
        for kind, label in ld.labels.items():
            got = extraction.fields[kind].raw_text
            if got != label.raw_text:
                raise TrainingError(
                    f"trained model fails its own training set: {ld.document.doc_id} "
                    f"{kind.value} expected {label.raw_text!r}, got {got!r}"
                )


def extract_document(
    model: TrainedModel, doc: StatementDocument, clock: Clock | None = None
) -> DocumentExtraction:
    """Best-candidate extraction for every field; failures become absences."""
    results: dict[FieldKind, FieldExtraction] = {}
    for kind, fm in model.fields.items():
        results[kind] = _extract_field(fm, doc)
    return DocumentExtraction(
        doc_id=doc.doc_id,
        customer_id=doc.customer_id,
        fields=results,
        model_version=model.model_version,
        extracted_at=stamp(clock.now()) if clock is not None else "",
    )


def _extract_field(fm: FieldModel, doc: StatementDocument) -> FieldExtraction:
    candidate_re = re.compile(fm.pattern_candidate, re.IGNORECASE)
    full_re = re.compile(fm.pattern_full)
    best: tuple[float, int, int] | None = None  # (-confidence, line, span start)
    best_extraction: FieldExtraction | None = None

    for line_idx, line in enumerate(doc.lines):
        line_tokens = set(tokenize(line))
        anchor = _anchor_score(fm.anchors, line_tokens)
        if anchor <= 0.0:
            continue
        position = _position_score(fm.prior, line_idx, len(doc.lines))
        for match in candidate_re.finditer(line):
            text = match.group(0)
            pattern = 1.0 if full_re.fullmatch(text) else 0.5
            confidence = score_confidence(anchor, pattern, position)
            key = (-confidence, line_idx, match.start())
            if best is None or key < best:
                best = key
                best_extraction = FieldExtraction(
                    raw_text=text, confidence=confidence, line_index=line_idx
                )

    if best_extraction is None or best_extraction.confidence < CONFIDENCE_FLOOR:
        return ABSENT
    return best_extraction


def _anchor_score(anchors: tuple[tuple[str, ...], ...], line_tokens: set[str]) -> float:
    best = 0.0
    for phrase in anchors:
        vocab = set(phrase)
        if not vocab:
            continue
        best = max(best, len(vocab & line_tokens) / len(vocab))
    return best


def _position_score(prior: PositionalPrior, line_idx: int, total_lines: int) -> float:
    pos = _normalized_position(line_idx, total_lines)
    return math.exp(-abs(pos - prior.mean) / max(prior.spread, MIN_PRIOR_SPREAD))


# --- stage enumeration -------------------------------------------------------


def load_statement(path: Path) -> StatementDocument:
    """Read one staged statement; customer identity comes from the filename
    convention stmt_<customer_id>.txt, not from the document body."""
    text = path.read_text(encoding="utf-8")
    stem = path.stem
    customer = stem[5:] if stem.startswith("stmt_") else stem
    return StatementDocument(
        doc_id=stem,
        customer_id=customer,
        lines=tuple(text.splitlines()),
        template_id="",
        uri=f"stage/{path.name}",
    )


def batch_extract(
    model: TrainedModel, stage_dir: Path, clock: Clock | None = None
) -> ExtractionBatch:
    """Extract every staged document; one result per file, always.

    A document that cannot be read yields an all-absent extraction with
    read_error set instead of aborting the batch. Output is ordered by
    doc_id so repeated runs serialize identically.
    """
    stage_dir = Path(stage_dir)
    if not stage_dir.is_dir():
        raise StageError(f"stage directory not readable: {stage_dir}")

    extractions: list[DocumentExtraction] = []
    for path in sorted(stage_dir.glob("*.txt")):
        try:
            doc = load_statement(path)
        except (OSError, UnicodeDecodeError):
            stem = path.stem
            extractions.append(
                DocumentExtraction(
                    doc_id=stem,
                    customer_id=stem[5:] if stem.startswith("stmt_") else stem,
                    fields={kind: ABSENT for kind in model.fields},
                    model_version=model.model_version,
                    extracted_at=stamp(clock.now()) if clock is not None else "",
                    read_error=True,
                )
            )
            continue
        extractions.append(extract_document(model, doc, clock))
    return ExtractionBatch(extractions=extractions, model_version=model.model_version)


# --- serialization -----------------------------------------------------------


def _model_json(fields: dict[FieldKind, FieldModel], manifest: dict) -> dict:
    return {
        "fields": {
            kind.value: {
                "anchors": [list(p) for p in fm.anchors],
                "anchor_counts": list(fm.anchor_counts),
                "pattern": {"candidate": fm.pattern_candidate, "full": fm.pattern_full},
                "prior": {"mean": fm.prior.mean, "spread": fm.prior.spread},
                "value_type": fm.value_type.value,
            }
            for kind, fm in sorted(fields.items(), key=lambda item: item[0].value)
        },
        "manifest": manifest,
    }


def model_to_json(model: TrainedModel) -> dict:
    body = _model_json(model.fields, model.manifest)
    body["model_version"] = model.model_version
    return body


def save_model(model: TrainedModel, path: Path) -> None:
    Path(path).write_text(
        json.dumps(model_to_json(model), sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


def load_model(path: Path) -> TrainedModel:
    obj = json.loads(Path(path).read_text(encoding="utf-8"))
    fields = {
        FieldKind(k): FieldModel(
            anchors=tuple(tuple(p) for p in v["anchors"]),
            anchor_counts=tuple(v["anchor_counts"]),
            pattern_candidate=v["pattern"]["candidate"],
            pattern_full=v["pattern"]["full"],
            prior=PositionalPrior(mean=v["prior"]["mean"], spread=v["prior"]["spread"]),
            value_type=ValueType(v["value_type"]),
        )
        for k, v in obj["fields"].items()
    }
    return TrainedModel(fields=fields, model_version=obj["model_version"], manifest=obj["manifest"])


def extraction_to_json(ex: DocumentExtraction) -> dict:
    return {
        "doc_id": ex.doc_id,
        "customer_id": ex.customer_id,
        "model_version": ex.model_version,
        "extracted_at": ex.extracted_at,
        "read_error": ex.read_error,
        "fields": {
            kind.value: {
                "raw_text": fe.raw_text,
                "confidence": fe.confidence,
                "line_index": fe.line_index,
            }
            for kind, fe in sorted(ex.fields.items(), key=lambda item: item[0].value)
        },
    }


def extraction_from_json(obj: dict) -> DocumentExtraction:
    return DocumentExtraction(
        doc_id=obj["doc_id"],
        customer_id=obj["customer_id"],
        model_version=obj["model_version"],
        extracted_at=obj.get("extracted_at", ""),
        read_error=obj.get("read_error", False),
        fields={
            FieldKind(k): FieldExtraction(
                raw_text=v["raw_text"],
                confidence=v["confidence"],
                line_index=v["line_index"],
            )
            for k, v in obj["fields"].items()
        },
    )
