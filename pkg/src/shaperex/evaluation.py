"""Metrics over (expected graph, predicted graph) pairs.

Triple comparison is strict: a predicted triple counts as correct only when
its predicate and object lexical form match an expected triple exactly.
Predictions that fail to parse contribute every expected triple as a false
negative and nothing else; the predicted subject is tracked separately by
the URI rate and does not enter the triple diff.

True negatives have no natural triple-level universe, so they are counted
at (example, property)-slot level over the shape vocabulary: a slot is a
true negative when neither the expected nor the predicted graph uses that
property.  This gives the FP/FN rates a finite, reproducible denominator.

F1 comes in two flavours: micro pools triples over the whole pair set;
macro averages per-property F1 over the shape vocabulary, excluding
properties with neither expected nor predicted triples.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Iterable, Sequence

from .corpus import Example
from .gateway import Prediction
from .shapes import Shape, names_shape_valid
from .turtle_light import Graph, Triple


@dataclass(frozen=True)
class EvalPair:
    """One expected example matched with its prediction."""

    example: Example
    prediction: Prediction
    fold: int | None = None

    def __post_init__(self):
        if self.example.entity != self.prediction.entity:
            raise ValueError(
                f"pair mixes entities {self.example.entity!r} and "
                f"{self.prediction.entity!r}"
            )

    @property
    def expected(self) -> Graph:
        return self.example.graph

    @property
    def predicted(self) -> Graph | None:
        return self.prediction.parsed


@dataclass(frozen=True)
class TripleDiff:
    """Strict per-pair triple comparison."""

    tp: frozenset[Triple]
    fp: frozenset[Triple]
    fn: frozenset[Triple]
    parse_ok: bool


def _rekey(graph: Graph, subject: str) -> frozenset[Triple]:
    return frozenset(Triple(subject, t.predicate, t.object) for t in graph.triples)


def diff(pair: EvalPair) -> TripleDiff:
    """TP/FP/FN triple sets for one pair.  Predicted triples are re-keyed
    to the expected subject first: comparison is on (predicate, object)
    and the subject is judged by the URI rate, not here."""
    expected = pair.expected.triples
    if not pair.prediction.parse_ok:
        return TripleDiff(frozenset(), frozenset(), frozenset(expected), False)
    predicted = _rekey(pair.predicted, pair.expected.subject)
    return TripleDiff(
        tp=predicted & expected,
        fp=predicted - expected,
        fn=frozenset(expected) - predicted,
        parse_ok=True,
    )


@dataclass
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


def confusion(pairs: Iterable[EvalPair], shape: Shape) -> ConfusionCounts:
    """Pooled triple-level TP/FP/FN plus slot-level TN over the vocabulary."""
    counts = ConfusionCounts()
    for pair in pairs:
        d = diff(pair)
        counts.tp += len(d.tp)
        counts.fp += len(d.fp)
        counts.fn += len(d.fn)
        expected_props = pair.expected.predicates()
        predicted_props = (
            pair.predicted.predicates() if pair.prediction.parse_ok else frozenset()
        )
        used = expected_props | predicted_props
        counts.tn += sum(1 for name in shape.property_names if name not in used)
    return counts


def rates(pairs: Sequence[EvalPair]) -> tuple[float, float | None]:
    """(parse rate over all pairs, correct-subject rate over parsed pairs)."""
    total = len(pairs)
    if not total:
        return 0.0, None
    parsed = [p for p in pairs if p.prediction.parse_ok]
    r_parse = len(parsed) / total
    if not parsed:
        return r_parse, None
    r_uri = sum(p.prediction.uri_ok for p in parsed) / len(parsed)
    return r_parse, r_uri


def _f1_from(tp: int, fp: int, fn: int) -> float:
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    if not precision + recall:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def f1(
    pairs: Iterable[EvalPair], shape: Shape, macro_axis: str = "property"
) -> tuple[float, float]:
    """(micro, macro) strict F1.  Micro pools all triples.  Macro averages
    per-property F1 over the vocabulary by default (untouched properties
    excluded); ``macro_axis="example"`` averages per-pair F1 instead."""
    if macro_axis not in ("property", "example"):
        raise ValueError(f"unknown macro axis {macro_axis!r}")
    per_property: dict[str, list[int]] = {name: [0, 0, 0] for name in shape.property_names}
    per_example: list[float] = []
    pooled = [0, 0, 0]
    for pair in pairs:
        d = diff(pair)
        for i, triples in enumerate((d.tp, d.fp, d.fn)):
            pooled[i] += len(triples)
            for t in triples:
                if t.predicate in per_property:
                    per_property[t.predicate][i] += 1
        per_example.append(_f1_from(len(d.tp), len(d.fp), len(d.fn)))
    micro = _f1_from(*pooled)
    if macro_axis == "example":
        macro = sum(per_example) / len(per_example) if per_example else 0.0
        return micro, macro
    scores = [
        _f1_from(tp, fp, fn)
        for tp, fp, fn in per_property.values()
        if tp + fp + fn > 0
    ]
    macro = sum(scores) / len(scores) if scores else 0.0
    return micro, macro


def _parsed_with_profiles(pairs: Iterable[EvalPair]):
    for pair in pairs:
        if pair.prediction.parse_ok:
            yield pair, pair.expected.predicates(), pair.predicted.predicates()


def pattern_equivalence(pairs: Iterable[EvalPair]) -> tuple[float | None, float | None]:
    """Rates of parsed predictions whose property set exactly matches /
    mismatches the expected one; the two sum to 1 over the parsed subset."""
    parsed = list(_parsed_with_profiles(pairs))
    if not parsed:
        return None, None
    equal = sum(1 for _, expected, predicted in parsed if expected == predicted)
    r_eq = equal / len(parsed)
    return r_eq, 1.0 - r_eq


def pec(pairs: Iterable[EvalPair]) -> float | None:
    """Pattern extension capacity: among parsed predictions whose property
    set mismatches the expected one, the fraction that strictly extend it
    (every expected property present plus at least one more).  None when
    there are no mismatches."""
    mismatched = extensions = 0
    for _, expected, predicted in _parsed_with_profiles(pairs):
        if expected == predicted:
            continue
        mismatched += 1
        if expected < predicted:
            extensions += 1
    if not mismatched:
        return None
    return extensions / mismatched


def mismatch_pattern_sets(
    pairs: Iterable[EvalPair], shape: Shape
) -> tuple[int, int, float | None, float | None]:
    """Over parsed pattern-mismatched pairs: distinct expected patterns,
    distinct predicted patterns (vocabulary subsets only), and the
    pattern-level shape-validity rate of each side."""
    vocabulary = set(shape.property_names)
    expected_patterns: set[frozenset[str]] = set()
    predicted_patterns: set[frozenset[str]] = set()
    total = valid_expected = valid_predicted = 0
    for _, expected, predicted in _parsed_with_profiles(pairs):
        if expected == predicted:
            continue
        total += 1
        expected_patterns.add(expected)
        if predicted <= vocabulary:
            predicted_patterns.add(predicted)
        valid_expected += names_shape_valid(expected, shape)
        valid_predicted += names_shape_valid(predicted, shape)
    if not total:
        return 0, 0, None, None
    return (
        len(expected_patterns),
        len(predicted_patterns),
        valid_expected / total,
        valid_predicted / total,
    )


@dataclass(frozen=True)
class EvalReport:
    size: int
    r_tll: float
    r_uri_ok: float | None
    f1_micro: float
    f1_macro: float
    r_fp: float | None
    r_fn: float | None
    r_pattern_eq: float | None
    r_pattern_neq: float | None
    pec: float | None
    mismatch_expected_patterns: float
    mismatch_predicted_patterns: float
    shape_valid_expected_mismatch: float | None
    shape_valid_predicted_mismatch: float | None
    mean_loss: float | None = None

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def mean(cls, reports: Sequence["EvalReport"]) -> "EvalReport":
        """Field-wise arithmetic mean, skipping undefined values."""
        if not reports:
            raise ValueError("no reports to average")
        values = {}
        for f in fields(cls):
            present = [
                getattr(r, f.name) for r in reports if getattr(r, f.name) is not None
            ]
            values[f.name] = sum(present) / len(present) if present else None
        values["size"] = sum(r.size for r in reports) / len(reports)
        return cls(**values)


def evaluate(
    pairs: Sequence[EvalPair], shape: Shape, mean_loss: float | None = None
) -> EvalReport:
    """Compute the full metric suite over a pair set."""
    r_parse, r_uri = rates(pairs)
    micro, macro = f1(pairs, shape)
    counts = confusion(pairs, shape)
    denominator = counts.total()
    r_fp = counts.fp / denominator if denominator else None
    r_fn = counts.fn / denominator if denominator else None
    r_eq, r_neq = pattern_equivalence(pairs)
    n_expected, n_predicted, valid_expected, valid_predicted = mismatch_pattern_sets(
        pairs, shape
    )
    return EvalReport(
        size=len(pairs),
        r_tll=r_parse,
        r_uri_ok=r_uri,
        f1_micro=micro,
        f1_macro=macro,
        r_fp=r_fp,
        r_fn=r_fn,
        r_pattern_eq=r_eq,
        r_pattern_neq=r_neq,
        pec=pec(pairs),
        mismatch_expected_patterns=n_expected,
        mismatch_predicted_patterns=n_predicted,
        shape_valid_expected_mismatch=valid_expected,
        shape_valid_predicted_mismatch=valid_predicted,
        mean_loss=mean_loss,
    )


def pair_up(
    dataset, predictions: Iterable[Prediction]
) -> list[EvalPair]:
    """Match predictions to dataset examples by entity, carrying fold ids."""
    by_entity = {p.entity: p for p in predictions}
    pairs = []
    for i, example in enumerate(dataset.examples):
        prediction = by_entity.get(example.entity)
        if prediction is None:
            prediction = Prediction.failed(example.entity, "", "missing prediction")
        fold = dataset.folds[i] if dataset.folds is not None else None
        pairs.append(EvalPair(example, prediction, fold))
    return pairs


def evaluate_folds(
    pairs: Sequence[EvalPair], shape: Shape
) -> tuple[EvalReport, dict[int, EvalReport], EvalReport | None]:
    """(overall report, per-fold reports, mean of the fold reports)."""
    overall = evaluate(pairs, shape)
    folds = sorted({p.fold for p in pairs if p.fold is not None})
    per_fold = {
        f: evaluate([p for p in pairs if p.fold == f], shape) for f in folds
    }
    fold_mean = EvalReport.mean(list(per_fold.values())) if per_fold else None
    return overall, per_fold, fold_mean


def diff_records(pairs: Sequence[EvalPair]) -> list[dict]:
    """Per-pair diff dump (JSONL-ready) consumed by the review loop."""

    def triples(ts: frozenset[Triple]) -> list[dict]:
        return [
            {"p": t.predicate, "o": t.object.lexical, "dt": t.object.datatype}
            for t in sorted(ts, key=Triple.sort_key)
        ]

    records = []
    for pair in pairs:
        d = diff(pair)
        records.append(
            {
                "entity": pair.example.entity,
                "fold": pair.fold,
                "parse_ok": d.parse_ok,
                "uri_ok": pair.prediction.uri_ok,
                "tp": triples(d.tp),
                "fp": triples(d.fp),
                "fn": triples(d.fn),
            }
        )
    return records
