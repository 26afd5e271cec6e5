"""Rendering table: how a literal may surface inside an abstract.

A triple counts as supported by its abstract when at least one rendering of
its object occurs verbatim (case-sensitive, after Unicode NFC normalization
of both sides).  Strings and years render as themselves; a date renders as
the two common prose forms with unpadded day plus the ISO form.

The same table is used in reverse by the heuristic extractor, which is why
the date-scanning helpers live here too (scanning is month-case-insensitive,
matching is not).
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass

from .turtle_light import DATE, Literal

MONTHS = (
    "January", "February", "March", "April", "May", "June",
    "July", "August", "September", "October", "November", "December",
)
_MONTH_INDEX = {m.lower(): i + 1 for i, m in enumerate(MONTHS)}

_MONTH_ALT = "|".join(MONTHS)
_DAY_MONTH_YEAR_RE = re.compile(
    rf"\b([1-9]|[12][0-9]|3[01]) ({_MONTH_ALT}) ([0-9]{{4}})\b", re.IGNORECASE
)
_MONTH_DAY_YEAR_RE = re.compile(
    rf"\b({_MONTH_ALT}) ([1-9]|[12][0-9]|3[01]), ([0-9]{{4}})\b", re.IGNORECASE
)
_ISO_DATE_RE = re.compile(r"\b([0-9]{4})-(0[1-9]|1[0-2])-(0[1-9]|[12][0-9]|3[01])\b")
_YEAR_RE = re.compile(r"\b([0-9]{4})\b")


def nfc(text: str) -> str:
    return unicodedata.normalize("NFC", text)


def renderings(literal: Literal) -> tuple[str, ...]:
    """Every surface form under which the literal may appear in text."""
    if literal.datatype == DATE:
        year, month, day = literal.lexical.split("-")
        month_name = MONTHS[int(month) - 1]
        return (
            f"{int(day)} {month_name} {year}",
            f"{month_name} {int(day)}, {year}",
            literal.lexical,
        )
    return (literal.lexical,)


def found_in(abstract: str, literal: Literal) -> bool:
    """True iff some rendering of the literal occurs in the abstract."""
    haystack = nfc(abstract)
    return any(nfc(r) in haystack for r in renderings(literal))


def find_spans(abstract: str, literal: Literal) -> list[tuple[int, int]]:
    """All (start, end) occurrences of any rendering, over the NFC abstract."""
    haystack = nfc(abstract)
    spans = []
    for r in renderings(literal):
        needle = nfc(r)
        start = haystack.find(needle)
        while start != -1:
            spans.append((start, start + len(needle)))
            start = haystack.find(needle, start + 1)
    return sorted(set(spans))


@dataclass(frozen=True)
class DateMention:
    """A date found in running text, normalized to ISO form."""

    iso: str
    start: int
    end: int


def find_dates(text: str) -> list[DateMention]:
    """Scan text for dates in any rendered form, earliest first."""
    mentions = []
    for m in _DAY_MONTH_YEAR_RE.finditer(text):
        day, month, year = m.group(1), m.group(2), m.group(3)
        iso = f"{year}-{_MONTH_INDEX[month.lower()]:02d}-{int(day):02d}"
        mentions.append(DateMention(iso, m.start(), m.end()))
    for m in _MONTH_DAY_YEAR_RE.finditer(text):
        month, day, year = m.group(1), m.group(2), m.group(3)
        iso = f"{year}-{_MONTH_INDEX[month.lower()]:02d}-{int(day):02d}"
        mentions.append(DateMention(iso, m.start(), m.end()))
    for m in _ISO_DATE_RE.finditer(text):
        mentions.append(DateMention(m.group(), m.start(), m.end()))
    return sorted(mentions, key=lambda d: (d.start, d.end))


def find_years(text: str) -> list[DateMention]:
    """Scan text for standalone 4-digit years, earliest first."""
    return [
        DateMention(m.group(1), m.start(1), m.end(1))
        for m in _YEAR_RE.finditer(text)
    ]
