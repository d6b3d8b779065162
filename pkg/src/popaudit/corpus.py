"""Deterministic synthetic statement corpus with seeded discrepancy injection.

The generator stands in for an issuer's systems of record plus its statement
rendering pipeline: a source-of-truth table is drawn first, then each record
is rendered into a text statement through a registered template whose spacing,
line wrapping, and value display formats vary per document. Discrepancies are
injected on the statement side only, so the source records stay authoritative
and the exact expected exception list is known up front.

All randomness flows from explicit seeds through ``random.Random`` (Mersenne
Twister with a fixed call sequence), so a (config, seed) pair reproduces the
same corpus byte for byte.
"""

from __future__ import annotations

import csv
import json
import random
import textwrap
from dataclasses import dataclass
from datetime import date, timedelta
from pathlib import Path

from .fields import FIELD_ORDER, FIELD_VALUE_TYPES, FieldKind, FieldSpec, ValueType, default_field_specs
from .normalize import render_canonical


class ConfigError(ValueError):
    pass


class RenderError(RuntimeError):
    pass


@dataclass(frozen=True)
class SourceRecord:
    """Authoritative system-of-record row for one customer and period."""

    customer_id: str
    account_number: str
    minimum_payment_cents: int
    due_date: date
    statement_balance_cents: int
    period: str  # YYYY-MM

    def value(self, kind: FieldKind) -> int | date:
        if kind is FieldKind.MINIMUM_PAYMENT:
            return self.minimum_payment_cents
        if kind is FieldKind.DUE_DATE:
            return self.due_date
        return self.statement_balance_cents


@dataclass(frozen=True)
class StatementDocument:
    doc_id: str
    customer_id: str
    lines: tuple[str, ...]
    template_id: str
    uri: str

    @property
    def text(self) -> str:
        return "\n".join(self.lines)


@dataclass(frozen=True)
class FieldLabel:
    raw_text: str
    canonical: int | date


@dataclass(frozen=True)
class LabeledDocument:
    document: StatementDocument
    labels: dict[FieldKind, FieldLabel]
    prompts: dict[FieldKind, str]


@dataclass(frozen=True)
class ExpectedException:
    doc_id: str
    customer_id: str
    field_kind: FieldKind
    source_value: int | date
    statement_value: int | date


@dataclass(frozen=True)
class DiscrepancyPlan:
    """Per-field injection counts plus mutation magnitude defaults."""

    minimum_payment: int = 0
    due_date: int = 0
    statement_balance: int = 0
    seed: int = 7
    amount_delta_cents: tuple[int, int] = (100, 5000)  # +/- $1 to $50
    date_shift_days: tuple[int, int] = (1, 10)

    def count(self, kind: FieldKind) -> int:
        return {
            FieldKind.MINIMUM_PAYMENT: self.minimum_payment,
            FieldKind.DUE_DATE: self.due_date,
            FieldKind.STATEMENT_BALANCE: self.statement_balance,
        }[kind]

    def total(self) -> int:
        return self.minimum_payment + self.due_date + self.statement_balance


@dataclass(frozen=True)
class CorpusConfig:
    size: int = 500
    seed: int = 42
    period: str = "2024-03"
    balance_range_cents: tuple[int, int] = (20_000, 1_000_000)
    min_payment_floor_cents: int = 2_500
    min_payment_rate_bps: int = 250  # 2.5% of balance, integer basis points
    template_id: str = "cc-standard-v1"

    def validate(self) -> None:
        if self.size < 1:
            raise ConfigError("population size must be >= 1")
        lo, hi = self.balance_range_cents
        if lo > hi:
            raise ConfigError(f"balance range is degenerate: min {lo} > max {hi}")
        if lo <= 0:
            raise ConfigError("balance range must be positive")
        # keeps every minimum payment strictly below its balance, which in turn
        # keeps the two amount surfaces distinct on any rendered statement
        if self.min_payment_floor_cents >= lo:
            raise ConfigError("minimum payment floor must be below the smallest balance")
        _parse_period(self.period)


def _parse_period(period: str) -> tuple[int, int]:
    try:
        year_s, month_s = period.split("-")
        year, month = int(year_s), int(month_s)
        date(year, month, 1)
    except (ValueError, AttributeError) as exc:
        raise ConfigError(f"period must be YYYY-MM, got {period!r}") from exc
    return year, month


def doc_id_for(customer_id: str) -> str:
    return f"stmt_{customer_id}"


def generate_truth(config: CorpusConfig) -> list[SourceRecord]:
    """Draw the source-of-truth population for a (config, seed) pair."""
    config.validate()
    rng = random.Random(config.seed)
    year, month = _parse_period(config.period)
    next_year, next_month = (year + 1, 1) if month == 12 else (year, month + 1)
    lo, hi = config.balance_range_cents

    records = []
    for i in range(1, config.size + 1):
        balance = rng.randrange(lo, hi + 1)
        minimum = max(
            config.min_payment_floor_cents,
            balance * config.min_payment_rate_bps // 10_000,
        )
        due = date(next_year, next_month, rng.randint(1, 28))
        records.append(
            SourceRecord(
                customer_id=f"CUST-{i:05d}",
                account_number=f"{rng.randrange(10**12):012d}",
                minimum_payment_cents=minimum,
                due_date=due,
                statement_balance_cents=balance,
                period=config.period,
            )
        )
    return records


# --- statement template ----------------------------------------------------

MONTH_NAMES = (
    "January", "February", "March", "April", "May", "June",
    "July", "August", "September", "October", "November", "December",
)

AMOUNT_FORMAT_COUNT = 3
DATE_FORMAT_COUNT = 3


def format_amount(cents: int, variant: int) -> str:
    """Template amount surface forms: $ and thousands commas vary."""
    sign = "-" if cents < 0 else ""
    dollars, rem = divmod(abs(cents), 100)
    if variant == 0:
        return f"{sign}${dollars:,}.{rem:02d}"
    if variant == 1:
        return f"{sign}${dollars}.{rem:02d}"
    if variant == 2:
        return f"{sign}{dollars:,}.{rem:02d}"
    raise ConfigError(f"unknown amount format variant {variant}")


def format_date(value: date, variant: int) -> str:
    """Template date surface forms: slash, month-name, and ISO displays."""
    if variant == 0:
        return f"{value.month:02d}/{value.day:02d}/{value.year:04d}"
    if variant == 1:
        return f"{MONTH_NAMES[value.month - 1]} {value.day}, {value.year}"
    if variant == 2:
        return value.isoformat()
    raise ConfigError(f"unknown date format variant {variant}")


def surface_forms(kind: FieldKind, canonical: int | date) -> list[str]:
    """Every template surface form of a canonical value, deduplicated."""
    if FIELD_VALUE_TYPES[kind] is ValueType.CURRENCY:
        forms = [format_amount(int(canonical), v) for v in range(AMOUNT_FORMAT_COUNT)]
    else:
        assert isinstance(canonical, date)
        forms = [format_date(canonical, v) for v in range(DATE_FORMAT_COUNT)]
    seen: list[str] = []
    for f_ in forms:
        if f_ not in seen:
            seen.append(f_)
    return seen


_INTRO_SENTENCES = (
    "Thank you for being a valued cardmember.",
    "This notice summarizes recent activity on your account.",
    "Please review the figures below and keep this record for your files.",
    "Manage your account online at any time through our secure portal.",
)

_DISCLOSURE_SENTENCES = (
    "Interest accrues daily on any revolving amount carried past the cycle close.",
    "To avoid additional charges, ensure your remittance arrives on or before the deadline shown above.",
    "If you believe any item shown here is incorrect, contact our service team promptly.",
    "Mailed checks should allow several business days for delivery and posting.",
)

_TEMPLATE_IDS = ("cc-standard-v1",)


def statement_values(
    record: SourceRecord,
    overrides: dict[FieldKind, int | date] | None = None,
) -> dict[FieldKind, int | date]:
    """Values actually printed on the statement (mutations applied)."""
    values: dict[FieldKind, int | date] = {k: record.value(k) for k in FIELD_ORDER}
    if overrides:
        values.update(overrides)
    return values


def render_statement(
    record: SourceRecord,
    template_id: str = "cc-standard-v1",
    variation_seed: int = 0,
    overrides: dict[FieldKind, int | date] | None = None,
) -> StatementDocument:
    """Render one statement; deterministic per (record, template, seed).

    The variation seed drives spacing, line wrapping of the filler paragraphs,
    and which amount/date display formats the statement uses. Canonical field
    values are never affected. After rendering, each printed field value must
    occur exactly once in the text; if a format choice creates a substring
    collision (possible only for the two dollar-free amount styles), the
    render falls back to the fully marked "$1,234.56" style.
    """
    if template_id not in _TEMPLATE_IDS:
        raise ConfigError(f"unknown template_id {template_id!r}")
    values = statement_values(record, overrides)
    rng = random.Random(variation_seed)
    amount_variant = rng.randrange(AMOUNT_FORMAT_COUNT)
    date_variant = rng.randrange(DATE_FORMAT_COUNT)
    wrap_width = rng.choice((48, 60, 72))
    indent = rng.choice(("", "  ", "    "))
    gap = rng.choice((" ", "  ", "   "))
    intro = list(rng.sample(_INTRO_SENTENCES, rng.randint(1, 2)))
    disclosure = list(rng.sample(_DISCLOSURE_SENTENCES, 2))
    trailing_blank = rng.random() < 0.5

    for attempt_variant in (amount_variant, 0):
        lines, surfaces = _render_lines(
            record, values, attempt_variant, date_variant,
            wrap_width, indent, gap, intro, disclosure, trailing_blank,
        )
        text = "\n".join(lines)
        if all(text.count(s) == 1 for s in surfaces.values()):
            did = doc_id_for(record.customer_id)
            return StatementDocument(
                doc_id=did,
                customer_id=record.customer_id,
                lines=tuple(lines),
                template_id=template_id,
                uri=f"stage/{did}.txt",
            )
    raise RenderError(
        f"could not render {record.customer_id} without a field surface collision"
    )


def _render_lines(
    record: SourceRecord,
    values: dict[FieldKind, int | date],
    amount_variant: int,
    date_variant: int,
    wrap_width: int,
    indent: str,
    gap: str,
    intro: list[str],
    disclosure: list[str],
    trailing_blank: bool,
) -> tuple[list[str], dict[FieldKind, str]]:
    year, month = _parse_period(record.period)
    surfaces = {
        FieldKind.STATEMENT_BALANCE: format_amount(int(values[FieldKind.STATEMENT_BALANCE]), amount_variant),
        FieldKind.MINIMUM_PAYMENT: format_amount(int(values[FieldKind.MINIMUM_PAYMENT]), amount_variant),
        FieldKind.DUE_DATE: format_date(values[FieldKind.DUE_DATE], date_variant),  # type: ignore[arg-type]
    }
    lines = [
        "FIRST MERIDIAN BANK",
        "Credit Card Statement",
        "",
        f"Customer ID: {record.customer_id}",
        f"Account Number: {record.account_number}",
        f"Statement Period: {MONTH_NAMES[month - 1]} {year}",
        "",
    ]
    lines.extend(textwrap.wrap(" ".join(intro), width=wrap_width))
    lines.append("")
    lines.append("Account Summary")
    lines.append(f"{indent}Statement Balance:{gap}{surfaces[FieldKind.STATEMENT_BALANCE]}")
    lines.append(f"{indent}Minimum Payment Due:{gap}{surfaces[FieldKind.MINIMUM_PAYMENT]}")
    lines.append(f"{indent}Payment Due Date:{gap}{surfaces[FieldKind.DUE_DATE]}")
    lines.append(f"{indent}Annual Percentage Rate: 21.99%")
    lines.append("")
    lines.extend(textwrap.wrap(" ".join(disclosure), width=wrap_width))
    if trailing_blank:
        lines.append("")
    lines.append("Questions? Call the number shown on the back of your card.")
    return lines, surfaces


# --- discrepancy injection ---------------------------------------------------


def inject_discrepancies(
    records: list[SourceRecord],
    plan: DiscrepancyPlan,
) -> tuple[dict[str, dict[FieldKind, int | date]], list[ExpectedException]]:
    """Mutate statement-side values for a seeded subset of the population.

    Returns the per-customer value overrides to pass to the renderer, plus the
    exact exception list a correct reconciliation must reproduce. Mutations
    always change the canonical value and never collide with the document's
    other amount field, so every rendered statement keeps one unambiguous
    surface per target field.
    """
    for kind in FIELD_ORDER:
        if plan.count(kind) < 0:
            raise ConfigError("injection counts must be >= 0")
        if plan.count(kind) > len(records):
            raise ConfigError(
                f"injection count for {kind.value} exceeds population size {len(records)}"
            )
    rng = random.Random(plan.seed)
    overrides: dict[str, dict[FieldKind, int | date]] = {}
    expected: list[ExpectedException] = []

    for kind in FIELD_ORDER:
        count = plan.count(kind)
        if count == 0:
            continue
        picks = sorted(rng.sample(range(len(records)), count))
        for idx in picks:
            record = records[idx]
            source_value = record.value(kind)
            if FIELD_VALUE_TYPES[kind] is ValueType.DATE:
                mutated: int | date = _shift_date(rng, source_value, plan)  # type: ignore[arg-type]
            else:
                other_kind = (
                    FieldKind.STATEMENT_BALANCE
                    if kind is FieldKind.MINIMUM_PAYMENT
                    else FieldKind.MINIMUM_PAYMENT
                )
                taken = overrides.get(record.customer_id, {})
                other_value = int(taken.get(other_kind, record.value(other_kind)))
                mutated = _mutate_amount(rng, int(source_value), other_value, plan)
            overrides.setdefault(record.customer_id, {})[kind] = mutated
            expected.append(
                ExpectedException(
                    doc_id=doc_id_for(record.customer_id),
                    customer_id=record.customer_id,
                    field_kind=kind,
                    source_value=source_value,
                    statement_value=mutated,
                )
            )

    expected.sort(key=lambda e: (e.doc_id, FIELD_ORDER.index(e.field_kind)))
    return overrides, expected


def _shift_date(rng: random.Random, value: date, plan: DiscrepancyPlan) -> date:
    lo, hi = plan.date_shift_days
    return value + timedelta(days=rng.randint(lo, hi) * rng.choice((-1, 1)))


def _mutate_amount(rng: random.Random, cents: int, forbidden: int, plan: DiscrepancyPlan) -> int:
    """Amount-delta or digit-transposition mutation; result is non-negative,
    differs from the source, and differs from the doc's other amount field."""
    for _ in range(16):
        if rng.random() < 0.5:
            candidate = _transpose_digits(rng, cents)
        else:
            lo, hi = plan.amount_delta_cents
            delta = rng.randrange(lo, hi + 1) * rng.choice((-1, 1))
            candidate = cents + delta if cents + delta >= 0 else cents - delta
        if candidate is not None and candidate != cents and candidate != forbidden:
            return candidate
    # deterministic fallback: walk outward until clear of both constraints
    step = plan.amount_delta_cents[0]
    candidate = cents + step
    while candidate == forbidden:
        candidate += step
    return candidate


def _transpose_digits(rng: random.Random, cents: int) -> int | None:
    digits = list(str(cents))
    swaps = [i for i in range(len(digits) - 1) if digits[i] != digits[i + 1]]
    if not swaps:
        return None
    i = rng.choice(swaps)
    digits[i], digits[i + 1] = digits[i + 1], digits[i]
    return int("".join(digits))


# --- labeled corpus ----------------------------------------------------------


def locate_field(
    doc: StatementDocument, kind: FieldKind, canonical: int | date
) -> tuple[int, str] | None:
    """Find the unique (line index, surface text) of a value in a document.

    Shorter surface forms are substrings of the "$"-marked ones ("1,234.56"
    sits inside "$1,234.56"), so matches are resolved longest-form-first and
    a hit inside an already-accepted span does not count again. Returns None
    when the value is absent or genuinely ambiguous.
    """
    text = doc.text
    hits: list[tuple[int, int, str]] = []  # (start, end, form)
    for form in sorted(surface_forms(kind, canonical), key=len, reverse=True):
        start = 0
        while True:
            idx = text.find(form, start)
            if idx < 0:
                break
            start = idx + 1
            span = (idx, idx + len(form))
            if any(span[0] >= s and span[1] <= e for s, e, _ in hits):
                continue
            hits.append((span[0], span[1], form))
    if len(hits) != 1:
        return None
    pos, _, form = hits[0]
    return text.count("\n", 0, pos), form


def emit_labeled_corpus(
    records: list[SourceRecord],
    documents: list[StatementDocument],
    n: int,
    specs: list[FieldSpec] | None = None,
) -> list[LabeledDocument]:
    """Select n clean documents and attach ground-truth labels and prompts.

    Only documents whose rendered values all match their source record are
    eligible (mutated statements would poison training labels). Selection
    round-robins across the display-format combinations present so small
    corpora still span multiple surface forms per field.
    """
    specs = specs if specs is not None else default_field_specs()
    by_customer = {r.customer_id: r for r in records}

    eligible: list[tuple[tuple[int, int], StatementDocument, dict[FieldKind, FieldLabel]]] = []
    for doc in sorted(documents, key=lambda d: d.doc_id):
        record = by_customer.get(doc.customer_id)
        if record is None:
            continue
        labels: dict[FieldKind, FieldLabel] = {}
        for spec in specs:
            hit = locate_field(doc, spec.kind, record.value(spec.kind))
            if hit is None:
                break
            labels[spec.kind] = FieldLabel(raw_text=hit[1], canonical=record.value(spec.kind))
        if len(labels) != len(specs):
            continue  # mutated or otherwise unlabeled document
        combo = (
            _amount_variant_of(labels.get(FieldKind.MINIMUM_PAYMENT)),
            _date_variant_of(labels.get(FieldKind.DUE_DATE)),
        )
        eligible.append((combo, doc, labels))

    if n > len(eligible):
        raise ConfigError(
            f"requested {n} labeled documents but only {len(eligible)} clean documents exist"
        )

    buckets: dict[tuple[int, int], list[tuple[StatementDocument, dict[FieldKind, FieldLabel]]]] = {}
    for combo, doc, labels in eligible:
        buckets.setdefault(combo, []).append((doc, labels))

    prompts = {s.kind: s.prompt for s in specs}
    chosen: list[LabeledDocument] = []
    keys = sorted(buckets)
    while len(chosen) < n:
        for key in keys:
            if buckets[key] and len(chosen) < n:
                doc, labels = buckets[key].pop(0)
                chosen.append(LabeledDocument(document=doc, labels=labels, prompts=dict(prompts)))
    chosen.sort(key=lambda ld: ld.document.doc_id)
    return chosen


def _amount_variant_of(label: FieldLabel | None) -> int:
    if label is None:
        return -1
    for v in range(AMOUNT_FORMAT_COUNT):
        if format_amount(int(label.canonical), v) == label.raw_text:
            return v
    return -1


def _date_variant_of(label: FieldLabel | None) -> int:
    if label is None:
        return -1
    assert isinstance(label.canonical, date)
    for v in range(DATE_FORMAT_COUNT):
        if format_date(label.canonical, v) == label.raw_text:
            return v
    return -1


# --- corpus bundle and persistence -------------------------------------------


@dataclass(frozen=True)
class CorpusBundle:
    """Everything one seeded generation run produces."""

    config: CorpusConfig
    plan: DiscrepancyPlan
    records: list[SourceRecord]
    documents: list[StatementDocument]
    labeled: list[LabeledDocument]
    expected_exceptions: list[ExpectedException]
    statement_truth: dict[str, dict[FieldKind, int | date]]  # doc_id -> printed values


def build_corpus(
    config: CorpusConfig,
    plan: DiscrepancyPlan | None = None,
    train_count: int = 20,
    specs: list[FieldSpec] | None = None,
) -> CorpusBundle:
    plan = plan if plan is not None else DiscrepancyPlan()
    records = generate_truth(config)
    overrides, expected = inject_discrepancies(records, plan)

    var_rng = random.Random(f"render-{config.seed}")
    documents: list[StatementDocument] = []
    statement_truth: dict[str, dict[FieldKind, int | date]] = {}
    mutated_customers = set(overrides)
    clean_docs: list[StatementDocument] = []
    for record in records:
        var_seed = var_rng.getrandbits(32)
        doc = render_statement(
            record, config.template_id, var_seed, overrides.get(record.customer_id)
        )
        documents.append(doc)
        statement_truth[doc.doc_id] = statement_values(record, overrides.get(record.customer_id))
        if record.customer_id not in mutated_customers:
            clean_docs.append(doc)

    labeled = emit_labeled_corpus(records, clean_docs, train_count, specs)
    return CorpusBundle(
        config=config,
        plan=plan,
        records=records,
        documents=documents,
        labeled=labeled,
        expected_exceptions=expected,
        statement_truth=statement_truth,
    )


def encode_value(kind: FieldKind, value: int | date) -> int | str:
    if FIELD_VALUE_TYPES[kind] is ValueType.CURRENCY:
        return int(value)
    assert isinstance(value, date)
    return value.isoformat()


def decode_value(kind: FieldKind, value: int | str) -> int | date:
    if FIELD_VALUE_TYPES[kind] is ValueType.CURRENCY:
        return int(value)
    return date.fromisoformat(str(value))


TRUTH_CSV_HEADER = [
    "customer_id",
    "account_number",
    "minimum_payment",
    "due_date",
    "statement_balance",
    "period",
]


def write_corpus(bundle: CorpusBundle, out_dir: Path) -> None:
    """Persist stage files, truth table, labels, and expected exceptions."""
    out_dir = Path(out_dir)
    stage = out_dir / "stage"
    stage.mkdir(parents=True, exist_ok=True)
    for doc in bundle.documents:
        (out_dir / doc.uri).write_text(doc.text + "\n", encoding="utf-8")

    with open(out_dir / "truth.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRUTH_CSV_HEADER)
        for r in bundle.records:
            writer.writerow(
                [
                    r.customer_id,
                    r.account_number,
                    render_canonical(ValueType.CURRENCY, r.minimum_payment_cents),
                    r.due_date.isoformat(),
                    render_canonical(ValueType.CURRENCY, r.statement_balance_cents),
                    r.period,
                ]
            )

    with open(out_dir / "labeled.jsonl", "w", encoding="utf-8") as fh:
        for ld in bundle.labeled:
            fh.write(json.dumps(_labeled_to_json(ld), sort_keys=True) + "\n")

    with open(out_dir / "expected_exceptions.jsonl", "w", encoding="utf-8") as fh:
        for exc in bundle.expected_exceptions:
            fh.write(
                json.dumps(
                    {
                        "doc_id": exc.doc_id,
                        "customer_id": exc.customer_id,
                        "field_kind": exc.field_kind.value,
                        "source_value": encode_value(exc.field_kind, exc.source_value),
                        "statement_value": encode_value(exc.field_kind, exc.statement_value),
                    },
                    sort_keys=True,
                )
                + "\n"
            )


def _labeled_to_json(ld: LabeledDocument) -> dict:
    return {
        "doc_id": ld.document.doc_id,
        "customer_id": ld.document.customer_id,
        "template_id": ld.document.template_id,
        "uri": ld.document.uri,
        "lines": list(ld.document.lines),
        "labels": {
            kind.value: {
                "raw_text": lab.raw_text,
                "canonical": encode_value(kind, lab.canonical),
            }
            for kind, lab in ld.labels.items()
        },
        "prompts": {kind.value: prompt for kind, prompt in ld.prompts.items()},
    }


def read_labeled_corpus(path: Path) -> list[LabeledDocument]:
    labeled = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        obj = json.loads(line)
        doc = StatementDocument(
            doc_id=obj["doc_id"],
            customer_id=obj["customer_id"],
            lines=tuple(obj["lines"]),
            template_id=obj["template_id"],
            uri=obj["uri"],
        )
        labels = {
            FieldKind(k): FieldLabel(
                raw_text=v["raw_text"],
                canonical=decode_value(FieldKind(k), v["canonical"]),
            )
            for k, v in obj["labels"].items()
        }
        prompts = {FieldKind(k): p for k, p in obj["prompts"].items()}
        labeled.append(LabeledDocument(document=doc, labels=labels, prompts=prompts))
    return labeled


def read_expected_exceptions(path: Path) -> list[ExpectedException]:
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        obj = json.loads(line)
        kind = FieldKind(obj["field_kind"])
        out.append(
            ExpectedException(
                doc_id=obj["doc_id"],
                customer_id=obj["customer_id"],
                field_kind=kind,
                source_value=decode_value(kind, obj["source_value"]),
                statement_value=decode_value(kind, obj["statement_value"]),
            )
        )
    return out


def read_truth_csv(path: Path) -> list[SourceRecord]:
    records = []
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            records.append(
                SourceRecord(
                    customer_id=row["customer_id"],
                    account_number=row["account_number"],
                    minimum_payment_cents=_parse_cents(row["minimum_payment"]),
                    due_date=date.fromisoformat(row["due_date"]),
                    statement_balance_cents=_parse_cents(row["statement_balance"]),
                    period=row["period"],
                )
            )
    return records


def _parse_cents(text: str) -> int:
    whole, _, frac = text.partition(".")
    frac = (frac or "0").ljust(2, "0")[:2]
    sign = -1 if whole.startswith("-") else 1
    return sign * (abs(int(whole)) * 100 + int(frac))
