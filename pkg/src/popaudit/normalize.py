"""Deterministic normalization of extracted field text.

Currency strings canonicalize to integer cents, date strings to a calendar
date rendered YYYY-MM-DD. Anything outside the registered surface forms is
rejected with a typed reason so it can be routed for exception review; this
module never raises on bad input.

Amounts are held as integers of cents, never binary floating point, so the
reconciler can compare with exact equality. Inputs carrying more than two
fractional digits are rejected rather than rounded: silently rounding could
mask a real statement error.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import date
from enum import Enum
from typing import Union

from .fields import ValueType


class NormalizeReason(str, Enum):
    EMPTY = "empty"
    MALFORMED_NUMBER = "malformed_number"
    MULTIPLE_DECIMAL_POINTS = "multiple_decimal_points"
    UNRECOGNIZED_DATE_FORMAT = "unrecognized_date_format"
    INVALID_CALENDAR_DATE = "invalid_calendar_date"


@dataclass(frozen=True)
class NormalizedValue:
    kind: ValueType
    canonical: Union[int, date]  # cents for currency, calendar date otherwise
    source_raw: str

    def canonical_str(self) -> str:
        return render_canonical(self.kind, self.canonical)


@dataclass(frozen=True)
class NormalizeError:
    reason: NormalizeReason
    source_raw: str


NormalizeResult = Union[NormalizedValue, NormalizeError]

# registered date surface forms; the registry is closed on purpose: fuzzy
# parsing would make ambiguous strings like "03/04/05" silently guessable
_SLASH_DATE = re.compile(r"^(\d{1,2})/(\d{1,2})/(\d{4})$")
_ISO_DATE = re.compile(r"^(\d{4})-(\d{2})-(\d{2})$")
_MONTH_NAME_DATE = re.compile(r"^([A-Za-z]+)\s+(\d{1,2}),\s*(\d{4})$")

_MONTHS = {
    name.lower(): i + 1
    for i, name in enumerate(
        [
            "January", "February", "March", "April", "May", "June",
            "July", "August", "September", "October", "November", "December",
        ]
    )
}

_SIGN_CHARS = ("-", "−")  # ASCII hyphen-minus and Unicode minus

# commas are stripped only when they are genuine thousands separators
_INT_PART = re.compile(r"^\d+$|^\d{1,3}(?:,\d{3})+$")


def normalize_currency(raw: str) -> NormalizeResult:
    """Canonicalize a currency string to integer cents.

    Accepts optional surrounding whitespace, "$" and "USD" markers, thousands
    commas, and a negative sign expressed as a leading minus or enclosing
    parentheses. Zero or one fractional digits are zero-padded to two.
    """
    s = raw.strip()
    if not s:
        return NormalizeError(NormalizeReason.EMPTY, raw)

    negative = False
    if s.startswith("(") and s.endswith(")") and len(s) > 2:
        negative = True
        s = s[1:-1].strip()

    # currency word markers, prefix or suffix
    if s.upper().startswith("USD"):
        s = s[3:].strip()
    if s.upper().endswith("USD"):
        s = s[:-3].strip()

    dollar_seen = False
    for _ in range(2):  # sign may sit on either side of the "$"
        if s[:1] in _SIGN_CHARS:
            if negative:
                return NormalizeError(NormalizeReason.MALFORMED_NUMBER, raw)
            negative = True
            s = s[1:].strip()
        if s[:1] == "$":
            if dollar_seen:
                return NormalizeError(NormalizeReason.MALFORMED_NUMBER, raw)
            dollar_seen = True
            s = s[1:].strip()

    if not s:
        return NormalizeError(NormalizeReason.MALFORMED_NUMBER, raw)
    if s.count(".") > 1:
        return NormalizeError(NormalizeReason.MULTIPLE_DECIMAL_POINTS, raw)

    int_part, _, frac_part = s.partition(".")
    if not _INT_PART.match(int_part):
        return NormalizeError(NormalizeReason.MALFORMED_NUMBER, raw)
    int_digits = int_part.replace(",", "")
    if "." in s:
        if not frac_part.isdigit():
            return NormalizeError(NormalizeReason.MALFORMED_NUMBER, raw)
        if len(frac_part) > 2:
            return NormalizeError(NormalizeReason.MALFORMED_NUMBER, raw)

    frac_cents = int(frac_part.ljust(2, "0")) if frac_part else 0
    cents = int(int_digits) * 100 + frac_cents
    if negative:
        cents = -cents
    return NormalizedValue(ValueType.CURRENCY, cents, raw)


def normalize_date(raw: str) -> NormalizeResult:
    """Parse one of the registered date formats into a calendar date.

    Registered forms: MM/DD/YYYY (or M/D/YYYY), "Month D, YYYY" with a full
    English month name, and YYYY-MM-DD. Real-calendar validity is enforced
    separately from shape so Feb 30 reports invalid_calendar_date.
    """
    s = raw.strip()
    if not s:
        return NormalizeError(NormalizeReason.EMPTY, raw)

    m = _SLASH_DATE.match(s)
    if m:
        month, day, year = int(m.group(1)), int(m.group(2)), int(m.group(3))
        return _build_date(year, month, day, raw)

    m = _ISO_DATE.match(s)
    if m:
        year, month, day = int(m.group(1)), int(m.group(2)), int(m.group(3))
        return _build_date(year, month, day, raw)

    m = _MONTH_NAME_DATE.match(s)
    if m:
        month = _MONTHS.get(m.group(1).lower())
        if month is None:
            return NormalizeError(NormalizeReason.UNRECOGNIZED_DATE_FORMAT, raw)
        return _build_date(int(m.group(3)), month, int(m.group(2)), raw)

    return NormalizeError(NormalizeReason.UNRECOGNIZED_DATE_FORMAT, raw)


def _build_date(year: int, month: int, day: int, raw: str) -> NormalizeResult:
    try:
        value = date(year, month, day)
    except ValueError:
        return NormalizeError(NormalizeReason.INVALID_CALENDAR_DATE, raw)
    return NormalizedValue(ValueType.DATE, value, raw)


def normalize_field(kind: ValueType, raw: str | None) -> NormalizeResult:
    """Dispatch to the kind-specific normalizer; absent input is an error."""
    if raw is None:
        return NormalizeError(NormalizeReason.EMPTY, "")
    if kind is ValueType.CURRENCY:
        return normalize_currency(raw)
    if kind is ValueType.DATE:
        return normalize_date(raw)
    raise ValueError(f"unknown value type: {kind!r}")


def render_canonical(kind: ValueType, canonical: Union[int, date]) -> str:
    """Render a canonical value back to its reference surface form."""
    if kind is ValueType.CURRENCY:
        cents = int(canonical)
        sign = "-" if cents < 0 else ""
        cents = abs(cents)
        return f"{sign}{cents // 100}.{cents % 100:02d}"
    if kind is ValueType.DATE:
        assert isinstance(canonical, date)
        return canonical.isoformat()
    raise ValueError(f"unknown value type: {kind!r}")
