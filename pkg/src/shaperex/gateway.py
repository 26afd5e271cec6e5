"""Bridge to the extraction model: prompts, remote calls, and a built-in
heuristic extractor.

The remote protocol is deliberately minimal so any model server can sit
behind it: HTTP POST with body ``{"prompt": "<entity_URI> : <abstract>"}``,
plain-text response containing the one-line factorized graph.  Transport
failures and non-parses are never raised to the caller; they surface as
predictions with ``parse_ok=False`` and an error note, which is how they
enter the parse-rate metrics.

The heuristic extractor is a deterministic, model-free stand-in: regex and
cue-word rules over the abstract.  It is intentionally imperfect (it
produces false positives and false negatives) so the downstream review
loop always has material to exercise.
"""

from __future__ import annotations

import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import requests

from .corpus import Example, local_name
from .rendering import MONTHS, find_dates, find_years
from .turtle_light import Graph, Literal, TurtleLightError, parse, serialize

SEPARATOR = " : "


class EmptyFieldError(ValueError):
    """Prompt construction needs both an entity and an abstract."""


@dataclass(frozen=True)
class Prompt:
    """Model input: the entity IRI and its abstract joined by ' : '."""

    text: str

    @classmethod
    def build(cls, example: Example) -> "Prompt":
        if not example.entity or not example.abstract:
            raise EmptyFieldError("entity and abstract must be non-empty")
        return cls(example.entity + SEPARATOR + example.abstract)

    @property
    def entity(self) -> str:
        return self.text.split(SEPARATOR, 1)[0]


@dataclass(frozen=True)
class Prediction:
    """Raw model output plus its parse/subject classification."""

    entity: str
    raw: str
    parsed: Graph | None
    parse_ok: bool
    uri_ok: bool
    error: str | None = None

    @classmethod
    def from_raw(cls, entity: str, raw: str) -> "Prediction":
        try:
            graph = parse(raw)
        except TurtleLightError as err:
            return cls(entity, raw, None, False, False, error=str(err))
        return cls(entity, raw, graph, True, graph.subject == local_name(entity))

    @classmethod
    def failed(cls, entity: str, raw: str, error: str) -> "Prediction":
        return cls(entity, raw, None, False, False, error=error)

    def to_record(self) -> dict:
        return {
            "entity": self.entity,
            "raw": self.raw,
            "parse_ok": self.parse_ok,
            "uri_ok": self.uri_ok,
            "error": self.error,
        }

    @classmethod
    def from_record(cls, record: dict) -> "Prediction":
        if record.get("error") is not None:
            return cls.failed(record["entity"], record["raw"], record["error"])
        return cls.from_raw(record["entity"], record["raw"])


def extract_remote(prompt: Prompt, endpoint: str, timeout: float = 30.0) -> Prediction:
    """POST the prompt to a model endpoint; the response body is the raw
    linearized graph.  Timeouts and HTTP errors become failed predictions
    (they count against the parse rate), never exceptions."""
    entity = prompt.entity
    try:
        response = requests.post(
            endpoint, json={"prompt": prompt.text}, timeout=timeout
        )
    except requests.Timeout:
        return Prediction.failed(entity, "", f"timeout after {timeout}s")
    except requests.RequestException as err:
        return Prediction.failed(entity, "", f"transport error: {err}")
    if response.status_code != 200:
        return Prediction.failed(
            entity, response.text, f"http status {response.status_code}"
        )
    return Prediction.from_raw(entity, response.text)


# Wide enough for "born <first middle last> on <date>"; the nearest cue in
# the window wins, so "born ... died <date>" still classifies as a death.
_CUE_WINDOW = 32
_DASHES = {"-", "–", "—"}
_LEADING_NAME_RE = re.compile(r"^\s*(?P<name>[^\s(,.;][^(,.;]*?)(?:\s+\(|,| is | was |\.)")
_BORN_NAME_RE = re.compile(r"\bborn (?:as )?(?P<name>[^(),;.]+)")
_ALIAS_RE = re.compile(r"\b(?:better|also) known as (?P<name>[^(),;.]+)")
_MONTH_WORDS = {m.lower() for m in MONTHS}


def _clean_span(value: str) -> str | None:
    value = value.strip()
    if not value or not value[0].isupper():
        return None
    try:
        Literal.of(value)
    except ValueError:
        return None
    return value


def _name_after_cue(match: re.Match) -> str | None:
    candidate = match.group("name")
    for stop in (" on ", " in ", " is ", " was "):
        if stop in candidate:
            candidate = candidate.split(stop, 1)[0]
    candidate = candidate.strip()
    if not candidate:
        return None
    first = candidate.split()[0].lower()
    if first in _MONTH_WORDS or candidate[0].isdigit():
        return None
    if re.search(r"[0-9]{4}", candidate):
        return None
    return _clean_span(candidate)


def _life_mentions(abstract: str):
    dates = find_dates(abstract)
    taken = [(d.start, d.end) for d in dates]
    years = [
        y
        for y in find_years(abstract)
        if not any(s <= y.start and y.end <= e for s, e in taken)
    ]
    mentions = sorted(dates + years, key=lambda m: (m.start, m.end))
    labels: dict[int, str] = {}
    for i, m in enumerate(mentions):
        context = abstract[max(0, m.start - _CUE_WINDOW) : m.start].lower()
        cues = {
            "birth": context.rfind("born"),
            "death": max(context.rfind("died"), context.rfind("death")),
        }
        nearest = max(cues, key=cues.get)
        if cues[nearest] != -1:
            labels[i] = nearest
    for i in range(len(mentions) - 1):
        if i in labels or i + 1 in labels:
            continue
        between = abstract[mentions[i].end : mentions[i + 1].start].strip()
        if between in _DASHES:
            labels[i] = "birth"
            labels[i + 1] = "death"
            break
    first: dict[tuple[str, bool], object] = {}
    for i, m in enumerate(mentions):
        label = labels.get(i)
        if label is None:
            continue
        key = (label, len(m.iso) == 10)
        first.setdefault(key, m)
    return first


def extract_heuristic(
    example: Example, predicate_order: Sequence[str] | None = None
) -> Prediction:
    """Rule-based extraction over the abstract.

    Dates in any rendered form are classified birth/death by the nearest
    cue word ("born", "died", "death") or by a dash-delimited lifespan;
    years are projected from dates, or taken standalone when cued.  The
    label is the abstract's leading name span; birth names and aliases come
    from "born ...", "better/also known as ..." cue phrases.  Output is
    serialized, so a non-empty prediction always parses.
    """
    abstract = example.abstract
    subject = local_name(example.entity)
    pairs: list[tuple[str, str]] = []

    m = _LEADING_NAME_RE.match(abstract)
    if m:
        label = _clean_span(m.group("name"))
        if label and " " in label:
            pairs.append(("label", label))

    mentions = _life_mentions(abstract)
    birth_date = mentions.get(("birth", True))
    death_date = mentions.get(("death", True))
    if birth_date:
        pairs.append(("birthDate", birth_date.iso))
        pairs.append(("birthYear", birth_date.iso[:4]))
    elif ("birth", False) in mentions:
        pairs.append(("birthYear", mentions[("birth", False)].iso))
    if death_date:
        pairs.append(("deathDate", death_date.iso))
        pairs.append(("deathYear", death_date.iso[:4]))
    elif ("death", False) in mentions:
        pairs.append(("deathYear", mentions[("death", False)].iso))

    m = _BORN_NAME_RE.search(abstract)
    if m:
        birth_name = _name_after_cue(m)
        if birth_name:
            pairs.append(("birthName", birth_name))

    m = _ALIAS_RE.search(abstract)
    if m:
        alias = _name_after_cue(m)
        if alias:
            pairs.append(("alias", alias))

    graph = Graph.of(subject, [(p, Literal.of(o)) for p, o in pairs])
    if graph.is_empty:
        return Prediction.failed(example.entity, "", "empty prediction")
    raw = serialize(graph, predicate_order)
    return Prediction.from_raw(example.entity, raw)


def make_extractor(
    mode: str,
    endpoint: str | None = None,
    timeout: float = 30.0,
    predicate_order: Sequence[str] | None = None,
) -> Callable[[Example], Prediction]:
    if mode == "heuristic":
        return lambda example: extract_heuristic(example, predicate_order)
    if mode == "remote":
        if not endpoint:
            raise ValueError("remote extraction needs an endpoint")
        return lambda example: extract_remote(Prompt.build(example), endpoint, timeout)
    raise ValueError(f"unknown extractor mode {mode!r}")


def extract_many(
    examples: Iterable[Example],
    extractor: Callable[[Example], Prediction],
    parallel: int = 1,
) -> list[Prediction]:
    """Run the extractor over examples, optionally with bounded parallelism;
    results keep the input order regardless of completion order."""
    examples = list(examples)
    if parallel <= 1:
        return [extractor(e) for e in examples]
    with ThreadPoolExecutor(max_workers=parallel) as pool:
        return list(pool.map(extractor, examples))
