"""Target field declarations shared by the corpus, extractor, and reconciler."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from enum import Enum


class FieldKind(str, Enum):
    MINIMUM_PAYMENT = "minimum_payment"
    DUE_DATE = "due_date"
    STATEMENT_BALANCE = "statement_balance"


class ValueType(str, Enum):
    CURRENCY = "currency"
    DATE = "date"


# value_type is determined by the field, never free to vary
FIELD_VALUE_TYPES: dict[FieldKind, ValueType] = {
    FieldKind.MINIMUM_PAYMENT: ValueType.CURRENCY,
    FieldKind.DUE_DATE: ValueType.DATE,
    FieldKind.STATEMENT_BALANCE: ValueType.CURRENCY,
}

# canonical ordering used everywhere a per-field sequence is emitted
FIELD_ORDER: tuple[FieldKind, ...] = (
    FieldKind.MINIMUM_PAYMENT,
    FieldKind.DUE_DATE,
    FieldKind.STATEMENT_BALANCE,
)

DEFAULT_PROMPTS: dict[FieldKind, str] = {
    FieldKind.MINIMUM_PAYMENT: "What is the minimum payment due?",
    FieldKind.DUE_DATE: "What is the payment due date?",
    FieldKind.STATEMENT_BALANCE: "What is the statement balance?",
}


class FieldSpecError(ValueError):
    pass


@dataclass(frozen=True)
class FieldSpec:
    kind: FieldKind
    prompt: str
    value_type: ValueType

    def __post_init__(self) -> None:
        expected = FIELD_VALUE_TYPES[self.kind]
        if self.value_type is not expected:
            raise FieldSpecError(
                f"field {self.kind.value} requires value_type {expected.value}, "
                f"got {self.value_type.value}"
            )


def default_field_specs() -> list[FieldSpec]:
    return [
        FieldSpec(kind=k, prompt=DEFAULT_PROMPTS[k], value_type=FIELD_VALUE_TYPES[k])
        for k in FIELD_ORDER
    ]


def validate_spec_set(specs: list[FieldSpec]) -> None:
    """Exactly one spec per field kind."""
    if not specs:
        raise FieldSpecError("field spec set is empty")
    kinds = [s.kind for s in specs]
    if len(set(kinds)) != len(kinds):
        raise FieldSpecError("duplicate field kinds in spec set")


def spec_fingerprint(specs: list[FieldSpec]) -> str:
    """Stable hash of a spec set, recorded in training manifests."""
    payload = [
        {"kind": s.kind.value, "prompt": s.prompt, "value_type": s.value_type.value}
        for s in sorted(specs, key=lambda s: s.kind.value)
    ]
    blob = json.dumps(payload, sort_keys=True).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()[:16]
