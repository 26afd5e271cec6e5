"""Human review loop: collect FP/FN triples, ingest judgements, build gold
datasets, and compute annotation metrics.

A review item is one false-positive or false-negative triple shown to the
annotator next to its abstract.  The verdict is a polarity — "+" means the
triple is actually supported by the abstract, "-" means it is not — plus,
for erroneous false positives only, one of nine error categories.

Judgements are append-only: the store replays its audit log on load, and
corrections are derived views, so a gold dataset is reproducible from the
log alone.  Gold construction removes the expected triples judged wrong
(FN-), adds the predicted discoveries (FP+), and drops any example whose
graph empties out.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import DISCOVERY, Example, Provenance
from .sampling import Dataset
from .turtle_light import Literal, Triple

FP = "FP"
FN = "FN"

CATEGORIES = {
    "FH": "factual hallucination: in range, but not supported by the abstract",
    "AC": "abusive completion: partly in the abstract, completed with plausible tokens",
    "IAC": "illogical abusive completion: completed and out of the expected range",
    "WV": "wrong value: in the abstract but belongs to another predicate",
    "TMI": "typographic minor issue: encoding, case, spacing or punctuation slip",
    "SG": "stuttered generation: correct value with repeated fragments",
    "ICE": "incomplete context: only part of the expected value",
    "LCE": "larger context: expected value plus surrounding extra tokens",
    "MCE": "mixed context: fragments of several values found in the abstract",
}

PENDING = "pending"
JUDGED = "judged"


class ReviewError(ValueError):
    pass


class UnknownItemError(ReviewError):
    pass


class AlreadyJudgedError(ReviewError):
    pass


class MissingCategoryError(ReviewError):
    pass


class PendingItemsError(ReviewError):
    pass


@dataclass(frozen=True)
class ReviewItem:
    id: str
    entity: str
    abstract: str
    triple: Triple
    kind: str
    fold: int | None
    model: str
    status: str = PENDING

    @property
    def key(self) -> tuple:
        """Judgement identity: one verdict per distinct (entity, triple,
        kind), whatever fold produced it."""
        return (self.entity, self.kind, self.triple.predicate, self.triple.object.lexical)


@dataclass(frozen=True)
class Judgement:
    item_key: tuple
    polarity: str
    category: str | None
    annotator: str
    timestamp: float

    def __post_init__(self):
        if self.polarity not in ("+", "-"):
            raise ValueError(f"polarity must be '+' or '-', got {self.polarity!r}")
        if self.category is not None and self.category not in CATEGORIES:
            raise ValueError(f"unknown category {self.category!r}")


def _item_id(model: str, fold, entity: str, kind: str, triple: Triple) -> str:
    payload = "|".join(
        [model, str(fold), entity, kind, triple.predicate, triple.object.lexical]
    )
    return hashlib.sha1(payload.encode("utf-8")).hexdigest()[:16]


def collect(
    diff_records: Iterable[dict], dataset: Dataset, model: str
) -> list[ReviewItem]:
    """One review item per FP/FN triple of a model run, ordered by
    (entity, kind, predicate, value) so queues are deterministic."""
    by_entity = {e.entity: e for e in dataset.examples}
    items = []
    for record in diff_records:
        example = by_entity.get(record["entity"])
        if example is None:
            continue
        subject = example.graph.subject
        for kind, slot in ((FP, "fp"), (FN, "fn")):
            for t in record.get(slot, ()):
                triple = Triple(subject, t["p"], Literal(t["o"], t.get("dt", "string")))
                items.append(
                    ReviewItem(
                        id=_item_id(model, record.get("fold"), example.entity, kind, triple),
                        entity=example.entity,
                        abstract=example.abstract,
                        triple=triple,
                        kind=kind,
                        fold=record.get("fold"),
                        model=model,
                    )
                )
    items.sort(key=lambda i: (i.entity, i.kind, i.triple.predicate, i.triple.object.lexical))
    return items


class ReviewStore:
    """Single-writer judgement store with an append-only audit log.

    Reads return snapshots; mutation happens only through :meth:`judge`
    and :meth:`revoke`, each appending one record to ``judgements.jsonl``.
    """

    def __init__(self, items: Sequence[ReviewItem], dataset: Dataset, model: str,
                 log_path=None):
        self.dataset = dataset
        self.model = model
        self.log_path = Path(log_path) if log_path else None
        self._items: dict[str, ReviewItem] = {}
        for item in items:
            if item.id in self._items:
                raise ValueError(f"duplicate review item id {item.id}")
            self._items[item.id] = item
        self._judgements: dict[tuple, Judgement] = {}
        if self.log_path and self.log_path.exists():
            self._replay()

    def _replay(self):
        with open(self.log_path, encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                record = json.loads(line)
                key = tuple(record["item_key"])
                if record.get("action") == "revoke":
                    self._judgements.pop(key, None)
                else:
                    self._judgements[key] = Judgement(
                        item_key=key,
                        polarity=record["polarity"],
                        category=record.get("category"),
                        annotator=record.get("annotator", "anonymous"),
                        timestamp=record.get("timestamp", 0.0),
                    )

    def _append(self, record: dict):
        if self.log_path is None:
            return
        self.log_path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.log_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")

    def items(self, status: str | None = None) -> list[ReviewItem]:
        snapshot = [self._with_status(i) for i in self._items.values()]
        snapshot.sort(key=lambda i: (i.entity, i.kind, i.triple.predicate,
                                     i.triple.object.lexical))
        if status:
            snapshot = [i for i in snapshot if i.status == status]
        return snapshot

    def get(self, item_id: str) -> ReviewItem:
        try:
            return self._with_status(self._items[item_id])
        except KeyError:
            raise UnknownItemError(f"no review item {item_id!r}")

    def _with_status(self, item: ReviewItem) -> ReviewItem:
        status = JUDGED if item.key in self._judgements else PENDING
        return replace(item, status=status)

    def judge(
        self,
        item_id: str,
        polarity: str,
        category: str | None = None,
        annotator: str = "anonymous",
    ) -> Judgement:
        """Record a verdict.  A category is required exactly when judging a
        false positive as erroneous."""
        item = self.get(item_id)
        if item.status == JUDGED:
            raise AlreadyJudgedError(f"item {item_id} already judged")
        needs_category = item.kind == FP and polarity == "-"
        if needs_category and not category:
            raise MissingCategoryError(
                "an erroneous false positive needs an error category"
            )
        if not needs_category:
            category = None
        judgement = Judgement(item.key, polarity, category, annotator, time.time())
        self._judgements[item.key] = judgement
        self._append(
            {
                "item_key": list(item.key),
                "polarity": polarity,
                "category": category,
                "annotator": annotator,
                "timestamp": judgement.timestamp,
            }
        )
        return judgement

    def revoke(self, item_id: str):
        """Withdraw the verdict on an item (logged, never erased)."""
        item = self.get(item_id)
        if item.key not in self._judgements:
            raise ReviewError(f"item {item_id} has no judgement to revoke")
        del self._judgements[item.key]
        self._append({"action": "revoke", "item_key": list(item.key)})

    def progress(self) -> dict:
        items = self.items()
        judged = sum(1 for i in items if i.status == JUDGED)
        return {
            "dataset": self.dataset.name,
            "model": self.model,
            "total": len(items),
            "judged": judged,
            "pending": len(items) - judged,
        }

    def judged_items(self) -> list[tuple[ReviewItem, Judgement]]:
        return [
            (item, self._judgements[item.key])
            for item in self.items()
            if item.key in self._judgements
        ]

    def ensure_complete(self):
        pending = [i for i in self.items() if i.status == PENDING]
        if pending:
            raise PendingItemsError(f"{len(pending)} items still pending")


@dataclass(frozen=True)
class GoldCorrection:
    """What changed between a dataset and its gold version."""

    dataset: str
    gold: str
    removed: tuple[tuple[str, Triple], ...]
    added: tuple[tuple[str, Triple], ...]
    dropped_entities: tuple[str, ...]

    def to_dict(self) -> dict:
        def rows(entries):
            return [
                {"entity": entity, "p": t.predicate, "o": t.object.lexical,
                 "dt": t.object.datatype}
                for entity, t in entries
            ]

        return {
            "dataset": self.dataset,
            "gold": self.gold,
            "removed": rows(self.removed),
            "added": rows(self.added),
            "dropped_entities": list(self.dropped_entities),
        }


def correct(
    dataset: Dataset, judged_items: Iterable[tuple[ReviewItem, Judgement]]
) -> tuple[Dataset, GoldCorrection]:
    """Build the gold dataset: drop expected triples judged wrong, add
    predicted triples judged correct, discard examples whose graph ends up
    empty.  Reapplying the same judgements to the result changes nothing.
    """
    removals: dict[str, set[Triple]] = {}
    additions: dict[str, set[Triple]] = {}
    for item, judgement in judged_items:
        if item.kind == FN and judgement.polarity == "-":
            removals.setdefault(item.entity, set()).add(item.triple)
        elif item.kind == FP and judgement.polarity == "+":
            additions.setdefault(item.entity, set()).add(item.triple)

    examples: list[Example] = []
    folds: list[int] = []
    removed: list[tuple[str, Triple]] = []
    added: list[tuple[str, Triple]] = []
    dropped: list[str] = []
    for i, example in enumerate(dataset.examples):
        graph = example.graph
        take_out = removals.get(example.entity, set()) & graph.triples
        put_in = additions.get(example.entity, set()) - graph.triples
        removed.extend((example.entity, t) for t in sorted(take_out, key=Triple.sort_key))
        added.extend((example.entity, t) for t in sorted(put_in, key=Triple.sort_key))
        graph = graph.without_triples(take_out).with_triples(put_in)
        if graph.is_empty:
            dropped.append(example.entity)
            continue
        provenance = {
            t: example.provenance.get(t, Provenance(DISCOVERY, found=True))
            for t in graph.triples
        }
        examples.append(example.with_graph(graph, provenance))
        if dataset.folds is not None:
            folds.append(dataset.folds[i])

    gold_name = dataset.name + "+"
    gold = Dataset(
        name=gold_name,
        examples=tuple(examples),
        seed=dataset.seed,
        constraint=dataset.constraint,
        folds=tuple(folds) if dataset.folds is not None else None,
    )
    correction = GoldCorrection(
        dataset=dataset.name,
        gold=gold_name,
        removed=tuple(removed),
        added=tuple(added),
        dropped_entities=tuple(dropped),
    )
    return gold, correction


@dataclass(frozen=True)
class AnnotationMetrics:
    fn_minus: int
    fn_plus: int
    fp_minus: int
    fp_plus: int
    omission_rate: float | None
    discovery_rate: float | None
    categories: dict
    per_fold: dict

    def to_dict(self) -> dict:
        return {
            "fn_minus": self.fn_minus,
            "fn_plus": self.fn_plus,
            "fp_minus": self.fp_minus,
            "fp_plus": self.fp_plus,
            "omission_rate": self.omission_rate,
            "discovery_rate": self.discovery_rate,
            "categories": self.categories,
            "per_fold": {str(k): v for k, v in sorted(self.per_fold.items())},
        }


def annotation_metrics(
    judged_items: Sequence[tuple[ReviewItem, Judgement]], dataset: Dataset
) -> AnnotationMetrics:
    """Omission rate (true omissions over all expected triples), discovery
    rate among false positives, and the error-category histogram, with a
    per-fold breakdown."""
    counts = {("FN", "-"): 0, ("FN", "+"): 0, ("FP", "-"): 0, ("FP", "+"): 0}
    categories = {code: 0 for code in CATEGORIES}
    per_fold: dict = {}
    for item, judgement in judged_items:
        counts[(item.kind, judgement.polarity)] += 1
        fold_counts = per_fold.setdefault(
            item.fold, {"FN-": 0, "FN+": 0, "FP-": 0, "FP+": 0}
        )
        fold_counts[f"{item.kind}{judgement.polarity}"] += 1
        if judgement.category:
            categories[judgement.category] += 1
    expected_total = sum(len(e.graph) for e in dataset.examples)
    fn_plus = counts[("FN", "+")]
    fp_plus, fp_minus = counts[("FP", "+")], counts[("FP", "-")]
    omission = fn_plus / expected_total if expected_total else None
    discovery = fp_plus / (fp_plus + fp_minus) if fp_plus + fp_minus else None
    return AnnotationMetrics(
        fn_minus=counts[("FN", "-")],
        fn_plus=fn_plus,
        fp_minus=fp_minus,
        fp_plus=fp_plus,
        omission_rate=omission,
        discovery_rate=discovery,
        categories=categories,
        per_fold=per_fold,
    )
