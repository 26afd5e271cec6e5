"""Distillation pipeline: project, enrich, and text-check a dual corpus.

Three single-pass stages, each pure per example so the pipeline streams
with bounded memory:

1. ``filter_pattern``  — project each graph onto the shape vocabulary and
   keep the example iff at least one vocabulary property remains.
2. ``apply_rules``     — materialize inference rules (e.g. a year projected
   from a date) for properties the graph lacks; new triples are tagged
   ``inferred``.
3. ``wikicheck``       — keep only triples whose object has a rendering
   occurring verbatim in the abstract; examples whose graph empties out
   are dropped.

``distill`` composes the stages, writes the partitioned store
(``initialKB/``, ``inferences/``, ``foundInAbstract/``) and accumulates a
:class:`DistillReport` with per-property counts per stage.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .corpus import (
    INFERRED,
    INITIAL_KB,
    Example,
    Provenance,
    dump_record,
    example_to_record,
)
from .rendering import found_in
from .shapes import Shape
from .turtle_light import DATE, GYEAR, Graph, Literal, Triple

logger = logging.getLogger(__name__)


class ProjectionError(ValueError):
    """A rule's lexical transform cannot apply to the source literal."""


def _project_year(source: Literal) -> Literal:
    if source.datatype != DATE:
        raise ProjectionError(f"{source.lexical!r} is not a date")
    return Literal(source.lexical[:4], GYEAR)


PROJECTIONS = {"year": _project_year}


@dataclass(frozen=True)
class InferenceRule:
    """Derive a missing target property from a source property."""

    source: str
    target: str
    projection: str = "year"

    def __post_init__(self):
        if self.projection not in PROJECTIONS:
            raise ValueError(f"unknown projection {self.projection!r}")
        if self.source == self.target:
            raise ValueError("rule source and target must differ")

    def project(self, source: Literal) -> Literal:
        return PROJECTIONS[self.projection](source)


def default_rules() -> tuple[InferenceRule, ...]:
    return (
        InferenceRule("birthDate", "birthYear", "year"),
        InferenceRule("deathDate", "deathYear", "year"),
    )


def load_rules(path) -> tuple[InferenceRule, ...]:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    return tuple(
        InferenceRule(r["source"], r["target"], r.get("projection", "year"))
        for r in data
    )


def _check_acyclic(rules: Iterable[InferenceRule]):
    edges: dict[str, set[str]] = {}
    for rule in rules:
        edges.setdefault(rule.source, set()).add(rule.target)
    for start in edges:
        frontier, seen = {start}, set()
        while frontier:
            nxt = set()
            for node in frontier:
                for target in edges.get(node, ()):
                    if target == start:
                        raise ValueError(f"inference rules form a cycle at {start!r}")
                    if target not in seen:
                        nxt.add(target)
            seen |= frontier
            frontier = nxt


@dataclass
class StageCounts:
    """Triples per property plus entity count at one pipeline stage."""

    triples: dict[str, int] = field(default_factory=dict)
    entities: int = 0

    def add(self, graph: Graph):
        self.entities += 1
        for t in graph.triples:
            self.triples[t.predicate] = self.triples.get(t.predicate, 0) + 1

    def total_triples(self) -> int:
        return sum(self.triples.values())


@dataclass
class DistillReport:
    shape: str
    examples_read: int = 0
    examples_no_vocabulary: int = 0
    examples_dropped_unfound: int = 0
    triples_dropped_nonvocab: int = 0
    projection_errors: int = 0
    initial: StageCounts = field(default_factory=StageCounts)
    after_rules: StageCounts = field(default_factory=StageCounts)
    found: StageCounts = field(default_factory=StageCounts)

    def part_found(self, prop: str) -> float | None:
        denominator = self.after_rules.triples.get(prop, 0)
        if not denominator:
            return None
        return self.found.triples.get(prop, 0) / denominator

    def entity_retention(self) -> float | None:
        if not self.initial.entities:
            return None
        return self.found.entities / self.initial.entities

    def to_dict(self) -> dict:
        props = sorted(
            set(self.initial.triples)
            | set(self.after_rules.triples)
            | set(self.found.triples)
        )
        return {
            "shape": self.shape,
            "examples_read": self.examples_read,
            "examples_no_vocabulary": self.examples_no_vocabulary,
            "examples_dropped_unfound": self.examples_dropped_unfound,
            "triples_dropped_nonvocab": self.triples_dropped_nonvocab,
            "projection_errors": self.projection_errors,
            "entities": {
                "initial": self.initial.entities,
                "after_rules": self.after_rules.entities,
                "found": self.found.entities,
                "retention": self.entity_retention(),
            },
            "properties": {
                p: {
                    "initial": self.initial.triples.get(p, 0),
                    "after_rules": self.after_rules.triples.get(p, 0),
                    "found": self.found.triples.get(p, 0),
                    "part_found": self.part_found(p),
                }
                for p in props
            },
        }


def filter_pattern(
    examples: Iterable[Example], shape: Shape, report: DistillReport | None = None
) -> Iterator[Example]:
    """Project graphs onto the shape vocabulary; keep examples realizing a
    non-empty pattern.  Non-vocabulary triples are dropped from the graph,
    not the example."""
    vocabulary = set(shape.property_names)
    for example in examples:
        if report is not None:
            report.examples_read += 1
        kept = {t for t in example.graph.triples if t.predicate in vocabulary}
        dropped = len(example.graph.triples) - len(kept)
        if report is not None:
            report.triples_dropped_nonvocab += dropped
        if not kept:
            if report is not None:
                report.examples_no_vocabulary += 1
            continue
        graph = Graph(example.graph.subject, frozenset(kept))
        provenance = {t: Provenance(INITIAL_KB) for t in kept}
        yield Example(example.entity, example.abstract, graph, provenance)


def _enrich(
    example: Example,
    rules: tuple[InferenceRule, ...],
    report: DistillReport | None,
) -> Example:
    added: dict[Triple, Provenance] = {}
    graph = example.graph
    for rule in rules:
        if rule.target in graph.predicates():
            continue
        for source in graph.objects_of(rule.source):
            try:
                target = rule.project(source)
            except ProjectionError as err:
                if report is not None:
                    report.projection_errors += 1
                logger.warning(
                    "rule %s->%s skipped for %s: %s",
                    rule.source, rule.target, example.entity, err,
                )
                continue
            triple = Triple(graph.subject, rule.target, target)
            added[triple] = Provenance(INFERRED)
            graph = graph.with_triples([triple])
            break
    if not added:
        return example
    provenance = dict(example.provenance)
    provenance.update(added)
    return Example(example.entity, example.abstract, graph, provenance)


def apply_rules(
    examples: Iterable[Example],
    rules: Iterable[InferenceRule],
    report: DistillReport | None = None,
) -> Iterator[Example]:
    """Materialize rule closures: for each rule, add the projected target
    triple when the graph has the source property but no target triple
    (targets are single-valued).  Applying the stage twice adds nothing."""
    rules = tuple(rules)
    _check_acyclic(rules)
    for example in examples:
        yield _enrich(example, rules, report)


def wikicheck(example: Example) -> Example:
    """Keep only triples supported by the abstract (some rendering of the
    object occurs verbatim); kept triples are flagged ``found``.  The
    returned graph may be empty, which marks the example as dropped."""
    kept = {
        t: Provenance(example.provenance_of(t).source, found=True)
        for t in example.graph.triples
        if found_in(example.abstract, t.object)
    }
    graph = Graph(example.graph.subject, frozenset(kept))
    return Example(example.entity, example.abstract, graph, kept)


class _PartitionWriter:
    def __init__(self, store_dir):
        self.root = Path(store_dir)
        self.handles = {}
        for name in (INITIAL_KB, "inferences", "foundInAbstract"):
            directory = self.root / name
            directory.mkdir(parents=True, exist_ok=True)
            self.handles[name] = open(
                directory / "examples.jsonl", "w", encoding="utf-8"
            )

    def write(self, partition: str, record: dict):
        self.handles[partition].write(dump_record(record) + "\n")

    def close(self):
        for handle in self.handles.values():
            handle.close()


def distill(
    examples: Iterable[Example],
    shape: Shape,
    rules: Iterable[InferenceRule] = (),
    store_dir=None,
) -> DistillReport:
    """Run the three stages over a stream of examples, one pass, bounded
    memory.  When ``store_dir`` is given the partitioned store is written:
    ``initialKB/`` holds the projected examples, ``inferences/`` only the
    rule-produced triples, ``foundInAbstract/`` the surviving examples with
    their confirmed triples."""
    report = DistillReport(shape=shape.name)
    rules = tuple(rules)
    _check_acyclic(rules)
    writer = _PartitionWriter(store_dir) if store_dir is not None else None
    try:
        for example in filter_pattern(examples, shape, report):
            report.initial.add(example.graph)
            if writer:
                writer.write(INITIAL_KB, example_to_record(example))

            enriched = _enrich(example, rules, report)
            report.after_rules.add(enriched.graph)
            inferred = sorted(
                (
                    t
                    for t in enriched.graph.triples
                    if enriched.provenance_of(t).source == INFERRED
                ),
                key=Triple.sort_key,
            )
            if writer and inferred:
                writer.write(
                    "inferences",
                    {
                        "entity": enriched.entity,
                        "triples": [
                            {"p": t.predicate, "o": t.object.lexical, "dt": t.object.datatype}
                            for t in inferred
                        ],
                    },
                )

            checked = wikicheck(enriched)
            if checked.graph.is_empty:
                report.examples_dropped_unfound += 1
                continue
            report.found.add(checked.graph)
            if writer:
                writer.write("foundInAbstract", example_to_record(checked))
    finally:
        if writer:
            writer.close()

    if store_dir is not None:
        report_path = Path(store_dir) / "distill_report.json"
        report_path.write_text(
            json.dumps(report.to_dict(), indent=2, sort_keys=True, ensure_ascii=False)
            + "\n",
            encoding="utf-8",
        )
    return report


def store_examples(store_dir) -> Iterator[Example]:
    """Stream the distilled (found-in-abstract) partition of a store."""
    from .corpus import read_jsonl

    return read_jsonl(Path(store_dir) / "foundInAbstract" / "examples.jsonl")
